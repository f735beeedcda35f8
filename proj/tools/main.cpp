// Command-line front end: check a specification, generate scene files,
// compare against a naive rejection sampler, and validate exported scenes.
//
// Exit codes: 0 success, 1 lex/parse error, 2 semantic/validation error,
// 3 I/O error, 4 sampling budget exhausted. Diagnostics go to stderr;
// stdout carries only machine-readable JSON reports.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "prs/error.hpp"
#include "prs/parser.hpp"
#include "prs/resolve.hpp"
#include "prs/rng.hpp"
#include "prs/scene_io.hpp"
#include "prs/scenegen.hpp"

namespace {

using namespace prs;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Lex:
    case ErrorCode::Parse:
      return 1;
    case ErrorCode::Io:
      return 3;
    case ErrorCode::RetriesExhausted:
    case ErrorCode::BudgetExhausted:
      return 4;
    default:
      return 2;
  }
}

AABB parse_workspace(const std::string& text) {
  double v[6] = {0, 0, 0, 0, 0, 0};
  int consumed = 0;
  const int got =
      std::sscanf(text.c_str(), " %lf , %lf , %lf , %lf , %lf , %lf %n", &v[0],
                  &v[1], &v[2], &v[3], &v[4], &v[5], &consumed);
  if (got != 6 || consumed != static_cast<int>(text.size())) {
    throw CLI::ValidationError(
        "--workspace", "expected six comma-separated numbers x0,y0,z0,x1,y1,z1");
  }
  const AABB ws{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  if (!(ws.min.x < ws.max.x && ws.min.y < ws.max.y && ws.min.z < ws.max.z)) {
    throw CLI::ValidationError(
        "--workspace", "minimum corner must be strictly below maximum corner");
  }
  return ws;
}

// Options shared by every subcommand.
struct CommonArgs {
  std::string spec_path;
  std::string models_path;
  std::string workspace_text = "-5,-5,-5,5,5,5";
  SceneGenOptions opts;

  void finalize() { opts.workspace = parse_workspace(workspace_text); }
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("spec", a.spec_path, "scene specification file (.prs)")
      ->required();
  sub->add_option("--models", a.models_path, "object model file (.pm)")
      ->required();
  sub->add_option("--workspace", a.workspace_text,
                  "sampling bounds as x0,y0,z0,x1,y1,z1")
      ->capture_default_str();
  sub->add_option("--max-retries", a.opts.max_retries,
                  "whole-scene redraws before giving up on a seed")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--mix-iters", a.opts.mix_iterations,
                  "hit-and-run steps per region draw (0 = auto)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--collision-eps", a.opts.collision_eps,
                  "minimum separation treated as a collision")
      ->capture_default_str();
}

SpecAST load_spec(const CommonArgs& a) {
  const std::string models_text = read_text_file(a.models_path);
  const std::string spec_text = read_text_file(a.spec_path);
  std::vector<ModelClass> classes = parse_model(models_text);
  return parse_spec(spec_text, std::move(classes), fnv1a(models_text));
}

// ----- check -----------------------------------------------------------------

int cmd_check(const CommonArgs& a) {
  const SpecAST spec = load_spec(a);
  const ResolvedScene resolved = build_dependency_order(spec);

  // Drawing each property once proves its combined region is non-empty.
  // Region failures are collected (with a placeholder value so dependents can
  // still be inspected) so every infeasible property is reported, not just
  // the first.
  Context ctx;
  SampleStats stats;
  RandomStream rng(0);
  std::vector<std::string> diagnostics;
  auto flush = [&] {
    for (const std::string& d : diagnostics) {
      std::fprintf(stderr, "error: %s\n", d.c_str());
    }
  };
  for (const PropertyNode& node : resolved.order) {
    try {
      draw_property(spec, node, rng, ctx, a.opts, stats);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::EmptyCombinedRegion:
        case ErrorCode::IncompatibleCarriers:
        case ErrorCode::ConstantViolatesConstraint: {
          diagnostics.push_back(e.what());
          ObjectState& state = ctx[node.object];
          if (node.property == "position") state.has_position = true;
          if (node.property == "orientation") state.has_orientation = true;
          break;
        }
        default:
          flush();
          throw;
      }
    }
  }
  if (!diagnostics.empty()) {
    flush();
    std::fprintf(stderr, "check: %zu infeasible propert%s\n",
                 diagnostics.size(), diagnostics.size() == 1 ? "y" : "ies");
    return 2;
  }
  std::fprintf(stderr, "check: OK (%zu objects, %zu properties)\n",
               spec.declarations.size(), resolved.order.size());
  return 0;
}

// ----- generate ----------------------------------------------------------------

int cmd_generate(const CommonArgs& a, int n, std::uint64_t seed,
                 const std::string& out_dir) {
  const SpecAST spec = load_spec(a);
  const ResolvedScene resolved = build_dependency_order(spec);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    fail(ErrorCode::Io,
         "cannot create output directory '" + out_dir + "': " + ec.message());
  }

  SampleStats stats;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < n; ++k) {
    const Scene scene =
        sample_scene(spec, resolved, seed + static_cast<std::uint64_t>(k),
                     a.opts, stats);
    const fs::path out = fs::path(out_dir) / ("scene_" + std::to_string(k) +
                                              ".json");
    write_scene_file(scene, out.string());
  }
  stats.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const std::string report = stats_to_json(stats);
  write_text_file((fs::path(out_dir) / "stats.json").string(), report);
  std::fputs(report.c_str(), stdout);
  std::fprintf(stderr, "generate: wrote %d scene(s) and stats.json to %s\n", n,
               out_dir.c_str());
  return 0;
}

// ----- baseline ----------------------------------------------------------------

std::string ratio(std::uint64_t count, int n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g",
                static_cast<double>(count) / static_cast<double>(n));
  return buf;
}

int cmd_baseline(const CommonArgs& a, int n, std::uint64_t seed, int budget) {
  const SpecAST spec = load_spec(a);
  const ResolvedScene resolved = build_dependency_order(spec);

  BaselineCounts naive;
  for (int i = 0; i < n; ++i) {
    baseline_rejection_sample(spec, resolved,
                              seed + static_cast<std::uint64_t>(i), budget,
                              a.opts, naive);
  }
  SampleStats engine;
  for (int i = 0; i < n; ++i) {
    sample_scene(spec, resolved, seed + static_cast<std::uint64_t>(i), a.opts,
                 engine);
  }
  // The engine only ever rejects on collision: containment and relative
  // position hold by construction of the sampled regions.
  std::string out = "{\n";
  out += "  \"samples\": " + std::to_string(n) + ",\n";
  out += "  \"budget\": " + std::to_string(budget) + ",\n";
  out += "  \"naive_avg_rejections\": {\n";
  out += "    \"containment\": " + ratio(naive.containment, n) + ",\n";
  out += "    \"relative_position\": " + ratio(naive.relative_position, n) +
         ",\n";
  out += "    \"collision\": " + ratio(naive.collision, n) + ",\n";
  out += "    \"total\": " + ratio(naive.total(), n) + "\n";
  out += "  },\n";
  out += "  \"engine_avg_rejections\": {\n";
  out += "    \"containment\": 0,\n";
  out += "    \"relative_position\": 0,\n";
  out += "    \"collision\": " + ratio(engine.collision_rejections, n) + ",\n";
  out += "    \"total\": " + ratio(engine.collision_rejections, n) + "\n";
  out += "  }\n";
  out += "}\n";
  std::fputs(out.c_str(), stdout);
  return 0;
}

// ----- validate ----------------------------------------------------------------

int cmd_validate(const CommonArgs& a, const std::string& scene_path) {
  const SpecAST spec = load_spec(a);
  const Scene scene = read_scene_file(scene_path);
  if (scene.spec_hash != spec.content_hash) {
    std::fprintf(stderr,
                 "warning: scene was generated from source with hash %016" PRIx64
                 ", current source hash is %016" PRIx64 "\n",
                 scene.spec_hash, spec.content_hash);
  }
  const std::vector<Violation> violations = check_scene(spec, scene, a.opts);
  std::string out = "[";
  for (size_t i = 0; i < violations.size(); ++i) {
    const Violation& v = violations[i];
    out += i == 0 ? "\n" : ",\n";
    out += "  {\n";
    out += "    \"kind\": " +
           json_quote(reject_reason_name(v.reason)) + ",\n";
    out += "    \"object\": " + json_quote(v.object) + ",\n";
    out += "    \"detail\": " + json_quote(v.detail) + "\n";
    out += "  }";
  }
  out += violations.empty() ? "]\n" : "\n]\n";
  std::fputs(out.c_str(), stdout);
  if (violations.empty()) {
    std::fprintf(stderr, "validate: OK (%zu objects)\n", scene.objects.size());
    return 0;
  }
  std::fprintf(stderr, "validate: %zu violation(s)\n", violations.size());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probabilistic scene specification compiler and sampler"};
  app.require_subcommand(1);

  CommonArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check", "parse a specification and prove every position region is "
               "non-empty");
  add_common(check, check_args);

  CommonArgs gen_args;
  int gen_n = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out = ".";
  std::string gen_format = "json";
  CLI::App* generate = app.add_subcommand(
      "generate", "sample scenes and write scene_<k>.json plus stats.json");
  add_common(generate, gen_args);
  generate->add_option("--n", gen_n, "number of scenes")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  generate->add_option("--seed", gen_seed, "base seed; scene k uses seed + k")
      ->capture_default_str();
  generate->add_option("--out", gen_out, "output directory")
      ->capture_default_str();
  generate->add_option("--format", gen_format, "output format")
      ->check(CLI::IsMember({"json"}))
      ->capture_default_str();

  CommonArgs base_args;
  int base_n = 100;
  std::uint64_t base_seed = 0;
  int base_budget = 100000;
  CLI::App* baseline = app.add_subcommand(
      "baseline",
      "compare naive rejection sampling against the constraint engine");
  add_common(baseline, base_args);
  baseline->add_option("--n", base_n, "accepted scenes per sampler")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  baseline->add_option("--seed", base_seed, "base seed; sample i uses seed + i")
      ->capture_default_str();
  baseline->add_option("--budget", base_budget,
                       "naive draws allowed per accepted scene")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CommonArgs val_args;
  std::string val_scene;
  CLI::App* validate = app.add_subcommand(
      "validate", "re-check an exported scene file against its source files");
  add_common(validate, val_args);
  validate->add_option("scene", val_scene, "scene file (.json)")->required();

  int rc = 0;
  check->callback([&] {
    check_args.finalize();
    rc = cmd_check(check_args);
  });
  generate->callback([&] {
    gen_args.finalize();
    rc = cmd_generate(gen_args, gen_n, gen_seed, gen_out);
  });
  baseline->callback([&] {
    base_args.finalize();
    rc = cmd_baseline(base_args, base_n, base_seed, base_budget);
  });
  validate->callback([&] {
    val_args.finalize();
    rc = cmd_validate(val_args, val_scene);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int cli_rc = app.exit(e);
    return cli_rc == 0 ? 0 : 2;
  } catch (const prs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
  return rc;
}
