// End-to-end acceptance gate. Each check prints exactly one PASS/FAIL line
// with its measured runtime; the process exits nonzero if any check fails.
//
// Run from the repository root (the CTest registration does this) so the
// specs/ corpus resolves. argv[1] may override the path to the command-line
// binary, which defaults to build/tools/prs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <sys/wait.h>
#endif

#include "prs/convex.hpp"
#include "prs/error.hpp"
#include "prs/parser.hpp"
#include "prs/resolve.hpp"
#include "prs/rng.hpp"
#include "prs/scene_io.hpp"
#include "prs/scenegen.hpp"

namespace {

using namespace prs;
namespace fs = std::filesystem;

// ----- pinned thresholds ------------------------------------------------------

constexpr double kParseBudgetSeconds = 1.0;
constexpr double kUniformityBudgetSeconds = 10.0;
constexpr int kUniformitySamples = 10000;
constexpr double kMeanTolerance = 0.0087;   // 3 * (1/sqrt(12)) / sqrt(10^4)
constexpr double kChiSquareMax = 24.32;     // p = 0.001 at 7 degrees of freedom
constexpr double kErosionBudgetSeconds = 30.0;
constexpr int kErosionPolygons = 50;
constexpr int kErosionGrid = 100;
constexpr double kErosionBoundaryTol = 1e-6;
constexpr int kProbePairs = 20;
constexpr int kProbesPerPair = 1000;
constexpr double kPipelineBudgetSeconds = 60.0;
constexpr int kPipelineSeeds = 100;
constexpr double kPipelineEps = 1e-9;
constexpr int kBaselineAccepts = 100;
constexpr int kBaselineBudget = 100000;
constexpr double kBaselineMinAvg = 50.0;
constexpr double kBaselineMinRatio = 50.0;

int g_failures = 0;

void run_check(const char* name, double budget_seconds,
               const std::function<bool(std::string&)>& fn) {
  std::string detail;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (ok && budget_seconds > 0 && secs >= budget_seconds) {
    ok = false;
    detail += (detail.empty() ? "" : "; ");
    detail += "runtime " + std::to_string(secs) + " s exceeds budget " +
              std::to_string(budget_seconds) + " s";
  }
  std::printf("%s %s (%.3f s)%s%s\n", ok ? "PASS" : "FAIL", name, secs,
              detail.empty() ? "" : " — ", detail.c_str());
  if (!ok) ++g_failures;
}

int run_cli(const std::string& command) {
  const int status = std::system(command.c_str());
#ifdef _WIN32
  return status;
#else
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
#endif
}

SpecAST load_corpus(const std::string& spec_path,
                    const std::string& models_path) {
  const std::string models_text = read_text_file(models_path);
  const std::string spec_text = read_text_file(spec_path);
  return parse_spec(spec_text, parse_model(models_text), fnv1a(models_text));
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ----- 1. table-cube corpus parses, resolves, and counts specifiers ------------

bool check_parser_acceptance(const std::string& bin, std::string& detail) {
  const int rc = run_cli(bin +
                         " check specs/table_cube.prs --models "
                         "specs/tabletop.pm >/dev/null 2>&1");
  if (rc != 0) {
    detail = "check subcommand exited with " + std::to_string(rc);
    return false;
  }
  const SpecAST spec =
      load_corpus("specs/table_cube.prs", "specs/tabletop.pm");
  const ObjectDecl* tr1 = spec.find_declaration("tr_1");
  if (!tr1) {
    detail = "tr_1 not found";
    return false;
  }
  int containment = 0, directional = 0;
  for (const Specifier& s : tr1->specifiers) {
    if (std::holds_alternative<SpecOn>(s.node) ||
        std::holds_alternative<SpecIn>(s.node) ||
        std::holds_alternative<SpecAt>(s.node)) {
      ++containment;
    } else if (std::holds_alternative<SpecDirectional>(s.node)) {
      ++directional;
    }
  }
  detail = "check exit 0; tr_1 carries " + std::to_string(containment) +
           " containment + " + std::to_string(directional) +
           " directional specifiers";
  return containment == 1 && directional == 2;
}

// ----- 2. chain sampling of the unit cube is uniform ----------------------------

bool check_uniformity(std::string& detail) {
  HsiBuilder b(3);
  Eigen::VectorXd lo(3), hi(3);
  lo << -0.5, -0.5, -0.5;
  hi << 0.5, 0.5, 0.5;
  b.add_box(lo, hi);
  const HSI cube = b.build();
  const int iters = default_mixing_iterations(3);

  RandomStream rng(0x5eedu);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  int octants[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  for (int i = 0; i < kUniformitySamples; ++i) {
    const Eigen::VectorXd x = sample_uniform(cube, iters, rng);
    sum += x.head<3>();
    const int cell =
        (x[0] < 0 ? 1 : 0) | (x[1] < 0 ? 2 : 0) | (x[2] < 0 ? 4 : 0);
    ++octants[cell];
  }
  const Eigen::Vector3d mean = sum / kUniformitySamples;
  const double expect = kUniformitySamples / 8.0;
  double chi2 = 0.0;
  for (const int o : octants) {
    chi2 += (o - expect) * (o - expect) / expect;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "means (%.4f, %.4f, %.4f) each within %.4f; octant chi-square "
                "%.2f < %.2f",
                mean.x(), mean.y(), mean.z(), kMeanTolerance, chi2,
                kChiSquareMax);
  detail = buf;
  return std::abs(mean.x()) < kMeanTolerance &&
         std::abs(mean.y()) < kMeanTolerance &&
         std::abs(mean.z()) < kMeanTolerance && chi2 < kChiSquareMax;
}

// ----- 3. row-wise erosion matches the corner-shift oracle ----------------------

bool check_erosion_oracle(std::string& detail) {
  RandomStream rng(0xE20DEu);
  long long grid_points = 0;
  for (int trial = 0; trial < kErosionPolygons; ++trial) {
    // Random convex polygon: hull of 5..12 points in [-1, 1]^2. Degenerate
    // hulls (no interior) are rare; redraw until construction succeeds.
    std::vector<Eigen::Vector2d> pts;
    HSI poly(Eigen::MatrixXd::Zero(0, 2), Eigen::VectorXd::Zero(0));
    for (;;) {
      pts.clear();
      const int n = 5 + static_cast<int>(rng.next_u64() % 8);
      for (int i = 0; i < n; ++i) {
        pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
      try {
        poly = hull_to_hsi_2d(pts);
        break;
      } catch (const Error&) {
      }
    }
    const double au = rng.uniform(0.02, 0.3);
    const double av = rng.uniform(0.02, 0.3);
    HsiBuilder rb(2);
    Eigen::VectorXd rlo(2), rhi(2);
    rlo << -au, -av;
    rhi << au, av;
    rb.add_box(rlo, rhi);
    const HSI rect = rb.build();
    const HSI eroded = erode(poly, rect);

    Eigen::Vector2d lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Eigen::Vector2d corners[4] = {
        {au, av}, {au, -av}, {-au, av}, {-au, -av}};
    for (int gy = 0; gy < kErosionGrid; ++gy) {
      for (int gx = 0; gx < kErosionGrid; ++gx) {
        Eigen::VectorXd p(2);
        p << lo.x() + (hi.x() - lo.x()) * (gx + 0.5) / kErosionGrid,
            lo.y() + (hi.y() - lo.y()) * (gy + 0.5) / kErosionGrid;
        bool oracle = true;
        for (const auto& c : corners) {
          Eigen::VectorXd shifted = p;
          shifted[0] += c.x();
          shifted[1] += c.y();
          if (!poly.contains(shifted, 0.0)) {
            oracle = false;
            break;
          }
        }
        const bool rowwise = eroded.contains(p, 0.0);
        ++grid_points;
        if (oracle != rowwise &&
            std::abs(eroded.boundary_distance(p)) > kErosionBoundaryTol) {
          char buf[200];
          std::snprintf(buf, sizeof(buf),
                        "polygon %d: grid point (%.6f, %.6f) disagrees %.3g "
                        "from the eroded boundary",
                        trial, p[0], p[1], eroded.boundary_distance(p));
          detail = buf;
          return false;
        }
      }
    }
  }
  detail = std::to_string(kErosionPolygons) + " polygons, " +
           std::to_string(grid_points) +
           " grid memberships, no disagreement farther than 1e-6 from the "
           "boundary";
  return true;
}

// ----- 4. stacked constraints behave exactly like a conjunction ----------------

HSI random_polytope(RandomStream& rng) {
  HsiBuilder b(3);
  Eigen::VectorXd lo(3), hi(3);
  lo << -1, -1, -1;
  hi << 1, 1, 1;
  b.add_box(lo, hi);
  const int extra = 3 + static_cast<int>(rng.next_u64() % 4);
  for (int i = 0; i < extra; ++i) {
    Eigen::VectorXd a(3);
    do {
      a << rng.normal(), rng.normal(), rng.normal();
    } while (a.norm() < 1e-6);
    b.add(a, rng.uniform(0.2, 1.2) * a.norm());
  }
  return b.build();
}

bool check_intersection_soundness(std::string& detail) {
  RandomStream rng(0xCAFEu);
  long long probes = 0;
  for (int pair = 0; pair < kProbePairs; ++pair) {
    const HSI p = random_polytope(rng);
    const HSI q = random_polytope(rng);
    const HSI both = intersect(p, q);
    for (int i = 0; i < kProbesPerPair; ++i) {
      Eigen::VectorXd x(3);
      x << rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
          rng.uniform(-1.5, 1.5);
      const bool stacked = both.contains(x, 0.0);
      const bool separate = p.contains(x, 0.0) && q.contains(x, 0.0);
      ++probes;
      if (stacked != separate) {
        detail = "pair " + std::to_string(pair) + ", probe " +
                 std::to_string(i) + ": stacked membership diverged";
        return false;
      }
    }
  }
  detail = std::to_string(probes) + " probes, membership identical";
  return true;
}

// ----- 5. sampled scenes validate clean with no interpenetration ----------------

bool check_pipeline_soundness(std::string& detail) {
  const SpecAST spec =
      load_corpus("specs/table_cube.prs", "specs/tabletop.pm");
  const ResolvedScene resolved = build_dependency_order(spec);
  SceneGenOptions opts;
  opts.collision_eps = kPipelineEps;
  SampleStats stats;
  for (int seed = 0; seed < kPipelineSeeds; ++seed) {
    const Scene scene = sample_scene(spec, resolved,
                                     static_cast<std::uint64_t>(seed), opts,
                                     stats);
    const std::vector<Violation> violations = check_scene(spec, scene, opts);
    if (!violations.empty()) {
      detail = "seed " + std::to_string(seed) + ": " +
               violations.front().object + ": " + violations.front().detail;
      return false;
    }
    for (size_t i = 0; i < scene.objects.size(); ++i) {
      for (size_t j = i + 1; j < scene.objects.size(); ++j) {
        if (obb_overlap(scene.objects[i].obb(), scene.objects[j].obb(),
                        kPipelineEps)) {
          detail = "seed " + std::to_string(seed) + ": " +
                   scene.objects[i].name + " interpenetrates " +
                   scene.objects[j].name;
          return false;
        }
      }
    }
  }
  detail = std::to_string(kPipelineSeeds) +
           " seeds sampled; zero violations, zero interpenetrations";
  return true;
}

// ----- 6. naive rejection needs far more draws than the engine ------------------

bool check_baseline_gap(std::string& detail) {
  const SpecAST spec =
      load_corpus("specs/table_cube.prs", "specs/tabletop.pm");
  const ResolvedScene resolved = build_dependency_order(spec);
  const SceneGenOptions opts;

  BaselineCounts naive;
  for (int i = 0; i < kBaselineAccepts; ++i) {
    baseline_rejection_sample(spec, resolved,
                              1000 + static_cast<std::uint64_t>(i),
                              kBaselineBudget, opts, naive);
  }
  SampleStats engine;
  for (int i = 0; i < kBaselineAccepts; ++i) {
    sample_scene(spec, resolved, 1000 + static_cast<std::uint64_t>(i), opts,
                 engine);
  }
  const double naive_avg =
      static_cast<double>(naive.total()) / kBaselineAccepts;
  const double engine_avg =
      static_cast<double>(engine.collision_rejections) / kBaselineAccepts;
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "naive avg rejections: containment %.2f, relative position "
                "%.2f, collision %.2f, total %.2f; engine total %.2f",
                static_cast<double>(naive.containment) / kBaselineAccepts,
                static_cast<double>(naive.relative_position) /
                    kBaselineAccepts,
                static_cast<double>(naive.collision) / kBaselineAccepts,
                naive_avg, engine_avg);
  detail = buf;
  return naive_avg >= kBaselineMinAvg &&
         static_cast<double>(naive.total()) >=
             kBaselineMinRatio *
                 static_cast<double>(engine.collision_rejections);
}

// ----- 7. derived orientations order after position; cycles are named -----------

bool check_dependency_resolution(std::string& detail) {
  const SpecAST spec =
      load_corpus("specs/facing_cubes.prs", "specs/tabletop.pm");
  const ResolvedScene resolved = build_dependency_order(spec);
  int pos_at = -1, ori_at = -1;
  for (size_t i = 0; i < resolved.order.size(); ++i) {
    const PropertyNode& n = resolved.order[i];
    if (n.object == "c2" && n.property == "position") {
      pos_at = static_cast<int>(i);
    }
    if (n.object == "c2" && n.property == "orientation") {
      ori_at = static_cast<int>(i);
    }
  }
  if (pos_at < 0 || ori_at < 0 || pos_at >= ori_at) {
    detail = "c2 evaluation order wrong: position at " +
             std::to_string(pos_at) + ", orientation at " +
             std::to_string(ori_at);
    return false;
  }

  // Source text cannot express this cycle (forward references are rejected
  // at parse time), so build the two mutually-referring declarations
  // directly.
  SpecAST cyclic;
  for (const char* name : {"a", "b"}) {
    ObjectDecl d;
    d.name = name;
    d.class_name = "Cube";
    Specifier s;
    s.node = SpecAt{make_expr(VarRef{name[0] == 'a' ? "b" : "a"}), nullptr};
    d.specifiers.push_back(std::move(s));
    cyclic.declarations.push_back(std::move(d));
  }
  try {
    build_dependency_order(cyclic);
    detail = "two-object positional cycle was not detected";
    return false;
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (e.code() != ErrorCode::CyclicDependency ||
        msg.find("a.position") == std::string::npos ||
        msg.find("b.position") == std::string::npos) {
      detail = std::string("unexpected cycle diagnostic: ") + msg;
      return false;
    }
  }
  detail = "c2 position sampled before orientation (" +
           std::to_string(pos_at) + " < " + std::to_string(ori_at) +
           "); cycle diagnostic names a.position and b.position";
  return true;
}

// ----- 8. identical inputs give byte-identical exports across processes ---------

bool check_determinism(const std::string& bin, std::string& detail) {
  const fs::path base = fs::temp_directory_path() / "prs_acceptance";
  const fs::path dir_a = base / "run_a";
  const fs::path dir_b = base / "run_b";
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);
  const std::string args =
      " generate specs/table_cube.prs --models specs/tabletop.pm"
      " --n 2 --seed 20260814 --out ";
  if (run_cli(bin + args + dir_a.string() + " >/dev/null 2>&1") != 0 ||
      run_cli(bin + args + dir_b.string() + " >/dev/null 2>&1") != 0) {
    detail = "generate subcommand failed";
    return false;
  }
  for (int k = 0; k < 2; ++k) {
    const std::string name = "scene_" + std::to_string(k) + ".json";
    if (read_bytes(dir_a / name) != read_bytes(dir_b / name)) {
      detail = name + " differs between the two runs";
      return false;
    }
  }

  // A third, in-process generation must reproduce the same bytes.
  const SpecAST spec =
      load_corpus("specs/table_cube.prs", "specs/tabletop.pm");
  const ResolvedScene resolved = build_dependency_order(spec);
  const SceneGenOptions opts;
  SampleStats stats;
  const Scene scene = sample_scene(spec, resolved, 20260814ull, opts, stats);
  if (scene_to_json(scene) != read_bytes(dir_a / "scene_0.json")) {
    detail = "in-process serialization differs from the exported file";
    return false;
  }
  detail = "two process runs and one in-process run: byte-identical JSON";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string bin = argc > 1 ? argv[1] : "build/tools/prs";
  if (!fs::exists("specs/table_cube.prs")) {
    std::fprintf(stderr,
                 "acceptance must run from the repository root (specs/ not "
                 "found)\n");
    return 2;
  }

  run_check("parser acceptance: table-cube corpus", kParseBudgetSeconds,
            [&](std::string& d) { return check_parser_acceptance(bin, d); });
  run_check("chain sampling uniformity: unit cube", kUniformityBudgetSeconds,
            check_uniformity);
  run_check("erosion equals corner-shift oracle", kErosionBudgetSeconds,
            check_erosion_oracle);
  run_check("intersection equals membership conjunction", 0.0,
            check_intersection_soundness);
  run_check("pipeline soundness: 100 seeds validate clean",
            kPipelineBudgetSeconds, check_pipeline_soundness);
  run_check("baseline gap: naive rejections dwarf engine", 0.0,
            check_baseline_gap);
  run_check("dependency resolution: order and cycle naming", 0.0,
            check_dependency_resolution);
  run_check("determinism: byte-identical scene exports", 0.0,
            [&](std::string& d) { return check_determinism(bin, d); });

  if (g_failures == 0) {
    std::printf("acceptance: all 8 checks passed\n");
    return 0;
  }
  std::printf("acceptance: %d check(s) failed\n", g_failures);
  return 1;
}
