#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "prs/error.hpp"
#include "prs/parser.hpp"
#include "prs/resolve.hpp"
#include "prs/scene_io.hpp"
#include "prs/scenegen.hpp"
#include "test_util.hpp"

namespace {

using namespace prs;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("cannot open " + path).c_str());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ModelClass> corpus_models() {
  return parse_model(slurp("specs/tabletop.pm"));
}

const std::vector<ModelClass>& box_models() {
  static const std::vector<ModelClass> models = parse_model(
      "class Box:\n"
      "  width: 0.2\n"
      "  length: 0.2\n"
      "  height: 0.2\n");
  return models;
}

struct Loaded {
  SpecAST spec;
  ResolvedScene resolved;
};

Loaded load(const std::string& path) {
  Loaded out{parse_spec(slurp(path), corpus_models()), {}};
  out.resolved = build_dependency_order(out.spec);
  return out;
}

Loaded load_text(const std::string& text) {
  Loaded out{parse_spec(text, box_models()), {}};
  out.resolved = build_dependency_order(out.spec);
  return out;
}

const SceneObject& find_object(const Scene& scene, const std::string& name) {
  for (const auto& obj : scene.objects) {
    if (obj.name == name) return obj;
  }
  REQUIRE_MESSAGE(false, ("no object named " + name).c_str());
  return scene.objects.front();
}

TEST_CASE("a constant-only declaration samples with zero rejections") {
  const Loaded l = load_text("m = Box at V3D(1, 2, 3)\n");
  SceneGenOptions opts;
  SampleStats stats;
  const Scene scene = sample_scene(l.spec, l.resolved, 9, opts, stats);
  REQUIRE(scene.objects.size() == 1);
  CHECK(scene.objects[0].position.x == doctest::Approx(1.0));
  CHECK(scene.objects[0].position.y == doctest::Approx(2.0));
  CHECK(scene.objects[0].position.z == doctest::Approx(3.0));
  CHECK(scene.objects[0].dims.x == doctest::Approx(0.2));
  CHECK(stats.scenes_requested == 1);
  CHECK(stats.scenes_emitted == 1);
  CHECK(stats.collision_rejections == 0);
}

TEST_CASE("table-cube scenes pass the independent validator") {
  const Loaded l = load("specs/table_cube.prs");
  SceneGenOptions opts;
  SampleStats stats;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scene scene = sample_scene(l.spec, l.resolved, seed, opts, stats);
    const auto violations = check_scene(l.spec, scene, opts);
    for (const auto& v : violations) {
      MESSAGE("seed ", seed, ": ", reject_reason_name(v.reason), " ",
              v.object, " ", v.detail);
    }
    CHECK(violations.empty());

    // Spot-check the fixed placements against hand-worked values.
    const SceneObject& t = find_object(scene, "t");
    CHECK(t.position.z == doctest::Approx(0.35).epsilon(1e-12));
    const SceneObject& r1 = find_object(scene, "r1");
    CHECK(r1.position.x == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(r1.position.z == doctest::Approx(1.05).epsilon(1e-12));
    const SceneObject& tray = find_object(scene, "tr_1");
    CHECK(tray.position.z == doctest::Approx(0.72).epsilon(1e-12));
    CHECK(tray.position.x <= 1e-9);
    CHECK(tray.position.x >= -0.71 - 1e-9);
    const SceneObject& cube = find_object(scene, "_obj5");
    CHECK(cube.position.z == doctest::Approx(0.79).epsilon(1e-9));
  }
  CHECK(stats.scenes_emitted == 20);
  CHECK(stats.hit_and_run_steps_total > 0);
}

TEST_CASE("regions corpus samples validate with zero engine rejections") {
  const Loaded l = load("specs/regions.prs");
  SceneGenOptions opts;
  SampleStats stats;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene scene = sample_scene(l.spec, l.resolved, seed, opts, stats);
    CHECK(check_scene(l.spec, scene, opts).empty());
  }
  CHECK(stats.collision_rejections == 0);
}

TEST_CASE("facing-toward objects look at their targets in sampled scenes") {
  const Loaded l = load("specs/facing_cubes.prs");
  SceneGenOptions opts;
  SampleStats stats;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene scene = sample_scene(l.spec, l.resolved, seed, opts, stats);
    CHECK(check_scene(l.spec, scene, opts).empty());
    const SceneObject& c1 = find_object(scene, "c1");
    const SceneObject& c2 = find_object(scene, "c2");
    const Vec3 expect = (c1.position - c2.position).normalized();
    const Vec3 fwd = c2.rotation().forward();
    CHECK((fwd - expect).norm() < 1e-9);
    // Displacement chain: c3 sits 0.5 beyond c2 along the c1-to-c2 ray.
    const SceneObject& c3 = find_object(scene, "c3");
    const Vec3 ray = (c2.position - c1.position).normalized();
    CHECK((c3.position - (c2.position + ray * 0.5)).norm() < 1e-9);
  }
  CHECK(stats.collision_rejections == 0);
}

TEST_CASE("identical seeds give byte-identical scene JSON") {
  const Loaded l = load("specs/table_cube.prs");
  SceneGenOptions opts;
  SampleStats s1, s2;
  const std::string a =
      scene_to_json(sample_scene(l.spec, l.resolved, 42, opts, s1));
  const std::string b =
      scene_to_json(sample_scene(l.spec, l.resolved, 42, opts, s2));
  CHECK(a == b);
}

TEST_CASE("adjacent seeds give different scenes") {
  const Loaded l = load("specs/table_cube.prs");
  SceneGenOptions opts;
  SampleStats stats;
  int differing = 0;
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const Scene a = sample_scene(l.spec, l.resolved, seed, opts, stats);
    const Scene b = sample_scene(l.spec, l.resolved, seed + 1, opts, stats);
    bool moved = false;
    for (size_t i = 0; i < a.objects.size(); ++i) {
      if ((a.objects[i].position - b.objects[i].position).norm() > 1e-6) {
        moved = true;
      }
    }
    differing += moved;
  }
  CHECK(differing >= 95);
}

TEST_CASE("every corpus spec validates clean across 100 seeds") {
  namespace fs = std::filesystem;
  int specs_checked = 0;
  for (const auto& entry : fs::directory_iterator("specs")) {
    if (entry.path().extension() != ".prs") continue;
    ++specs_checked;
    const Loaded l = load(entry.path().string());
    SceneGenOptions opts;
    SampleStats stats;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Scene scene = sample_scene(l.spec, l.resolved, seed, opts, stats);
      const auto violations = check_scene(l.spec, scene, opts);
      for (const auto& v : violations) {
        MESSAGE(entry.path().string(), " seed ", seed, ": ",
                reject_reason_name(v.reason), " ", v.object, " ", v.detail);
      }
      CHECK(violations.empty());
    }
  }
  CHECK(specs_checked >= 3);
}

TEST_CASE("engine rejections never exceed naive rejections on corpus seeds") {
  namespace fs = std::filesystem;
  for (const auto& entry : fs::directory_iterator("specs")) {
    if (entry.path().extension() != ".prs") continue;
    const Loaded l = load(entry.path().string());
    SceneGenOptions opts;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SampleStats stats;
      sample_scene(l.spec, l.resolved, seed, opts, stats);
      if (stats.collision_rejections == 0) continue;  // 0 <= anything
      BaselineCounts counts;
      baseline_rejection_sample(l.spec, l.resolved, seed, 1000000, opts,
                                counts);
      CHECK(counts.total() >= stats.collision_rejections);
    }
  }
}

TEST_CASE("appending a declaration does not disturb earlier draws") {
  const Loaded base = load_text(
      "a = Box in Cuboid(V3D(0, 0, 1), V3D(0, 0, 0), V3D(1, 1, 1))\n");
  const Loaded extended = load_text(
      "a = Box in Cuboid(V3D(0, 0, 1), V3D(0, 0, 0), V3D(1, 1, 1))\n"
      "b = Box at V3D(3, 3, 3)\n");
  SceneGenOptions opts;
  SampleStats s1, s2;
  const Scene sa = sample_scene(base.spec, base.resolved, 7, opts, s1);
  const Scene sb = sample_scene(extended.spec, extended.resolved, 7, opts, s2);
  CHECK((sa.objects[0].position - sb.objects[0].position).norm() == 0.0);
}

TEST_CASE("collisions force whole-scene redraws until a clear draw") {
  // Two cubes confined to a tight box collide often but not always.
  const Loaded l = load_text(
      "a = Box in Cuboid(V3D(0, 0, 1), V3D(0, 0, 0), V3D(0.6, 0.6, 0.6))\n"
      "b = Box in Cuboid(V3D(0, 0, 1), V3D(0, 0, 0), V3D(0.6, 0.6, 0.6))\n");
  SceneGenOptions opts;
  SampleStats stats;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scene scene = sample_scene(l.spec, l.resolved, seed, opts, stats);
    CHECK(check_scene(l.spec, scene, opts).empty());
  }
  CHECK(stats.scenes_emitted == 30);
  CHECK(stats.collision_rejections > 0);
}

TEST_CASE("an unsatisfiable collision constraint exhausts its retries") {
  const Loaded l = load_text(
      "a = Box at V3D(0, 0, 0)\n"
      "b = Box at V3D(0, 0, 0)\n");
  SceneGenOptions opts;
  opts.max_retries = 5;
  SampleStats stats;
  try {
    sample_scene(l.spec, l.resolved, 1, opts, stats);
    FAIL("expected retry exhaustion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RetriesExhausted);
    const std::string msg = e.what();
    CHECK(msg.find("5 attempts") != std::string::npos);
    CHECK(msg.find("collision rejections: 5") != std::string::npos);
  }
  CHECK(stats.collision_rejections == 5);
}

TEST_CASE("the validator flags corrupted scenes") {
  const Loaded l = load("specs/table_cube.prs");
  SceneGenOptions opts;
  SampleStats stats;
  const Scene good = sample_scene(l.spec, l.resolved, 11, opts, stats);
  REQUIRE(check_scene(l.spec, good, opts).empty());

  Scene off_surface = good;
  for (auto& obj : off_surface.objects) {
    if (obj.name == "_obj5") obj.position.x += 1.0;
  }
  const auto violations = check_scene(l.spec, off_surface, opts);
  REQUIRE_FALSE(violations.empty());
  bool cube_containment = false;
  for (const auto& v : violations) {
    if (v.object == "_obj5" &&
        v.reason == RejectReason::ContainmentViolation) {
      cube_containment = true;
    }
  }
  CHECK(cube_containment);

  Scene overlapped = good;
  Vec3 tr1_pos;
  for (auto& obj : overlapped.objects) {
    if (obj.name == "tr_1") tr1_pos = obj.position;
  }
  for (auto& obj : overlapped.objects) {
    if (obj.name == "tr_2") obj.position = tr1_pos;
  }
  bool collision = false;
  for (const auto& v : check_scene(l.spec, overlapped, opts)) {
    if (v.reason == RejectReason::ObjectCollision) collision = true;
  }
  CHECK(collision);

  Scene truncated = good;
  truncated.objects.pop_back();
  CHECK(test::caught([&] { check_scene(l.spec, truncated, opts); }) ==
        ErrorCode::SpecSceneMismatch);
}

TEST_CASE("the validator flags a wrong-side placement") {
  const Loaded l = load("specs/table_cube.prs");
  SceneGenOptions opts;
  SampleStats stats;
  Scene scene = sample_scene(l.spec, l.resolved, 13, opts, stats);
  for (auto& obj : scene.objects) {
    if (obj.name == "tr_1") obj.position.x = 0.3;  // right of center: wrong
  }
  bool wrong_side = false;
  for (const auto& v : check_scene(l.spec, scene, opts)) {
    if (v.object == "tr_1" &&
        v.reason == RejectReason::RelativePositionViolation) {
      wrong_side = true;
    }
  }
  CHECK(wrong_side);
}

TEST_CASE("scene JSON round-trips exactly") {
  Scene scene;
  scene.spec_hash = 0xdeadbeefcafe1234ull;
  scene.seed = 18446744073709551615ull;  // largest 64-bit seed
  SceneObject a;
  a.name = "odd \"name\"\n";
  a.class_name = "Box";
  a.position = {0.1 + 0.2, -1.0 / 3.0, 1e-17};
  a.orientation = Rotation::from_rpy(0.3, -0.4, 2.9).to_quaternion();
  a.dims = {0.1, 0.25, 1.0 / 7.0};
  a.properties["color"] = std::string("gray");
  a.properties["mass"] = 2.5000000000000004;
  a.properties["offset"] = Vec3{1, 2, 3};
  scene.objects.push_back(a);

  const std::string text = scene_to_json(scene);
  const Scene back = scene_from_json(text);
  CHECK(scene_to_json(back) == text);
  REQUIRE(back.objects.size() == 1);
  CHECK(back.spec_hash == scene.spec_hash);
  CHECK(back.seed == scene.seed);
  CHECK(back.objects[0].name == a.name);
  CHECK(back.objects[0].position.x == a.position.x);
  CHECK(back.objects[0].position.z == a.position.z);
  for (int i = 0; i < 4; ++i) {
    CHECK(back.objects[0].orientation[i] == a.orientation[i]);
  }
  CHECK(std::get<double>(back.objects[0].properties.at("mass")) ==
        2.5000000000000004);
}

TEST_CASE("malformed scene files are rejected") {
  CHECK(test::caught([] { scene_from_json("{]"); }) == ErrorCode::Io);
  CHECK(test::caught([] { scene_from_json("{\"version\": 2}"); }) ==
        ErrorCode::Io);
  const std::string bad_quat =
      "{\"version\":1,\"spec_hash\":\"0\",\"seed\":0,\"objects\":[{"
      "\"name\":\"a\",\"class\":\"B\",\"position\":[0,0,0],"
      "\"orientation\":[1,1,0,0],\"dims\":[1,1,1],\"properties\":{}}]}";
  CHECK(test::caught([&] { scene_from_json(bad_quat); }) == ErrorCode::Io);
}

TEST_CASE("scene files are written atomically and read back") {
  const Loaded l = load_text("m = Box at V3D(0.5, -0.25, 4)\n");
  SceneGenOptions opts;
  SampleStats stats;
  const Scene scene = sample_scene(l.spec, l.resolved, 3, opts, stats);
  const std::string path = "build/test_scene_roundtrip.json";
  write_scene_file(scene, path);
  const Scene back = read_scene_file(path);
  CHECK(scene_to_json(back) == scene_to_json(scene));
  std::remove(path.c_str());
}

TEST_CASE("the naive baseline rejects far more scenes than the engine") {
  const Loaded l = load("specs/table_cube.prs");
  SceneGenOptions opts;

  BaselineCounts counts;
  SampleStats engine_stats;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene scene = baseline_rejection_sample(l.spec, l.resolved, seed,
                                                  200000, opts, counts);
    CHECK(check_scene(l.spec, scene, opts).empty());
    sample_scene(l.spec, l.resolved, seed, opts, engine_stats);
  }
  // Roughly a hundred rejections per acceptance is expected; 200 total over
  // ten acceptances is a conservative floor that still proves the gap.
  CHECK(counts.total() >= 200);
  CHECK(counts.total() >= 10 * engine_stats.collision_rejections);
  CHECK(counts.containment > counts.collision);
}

TEST_CASE("the baseline accepts deterministic specs without rejections") {
  const Loaded l = load("specs/facing_cubes.prs");
  SceneGenOptions opts;
  BaselineCounts counts;
  const Scene scene =
      baseline_rejection_sample(l.spec, l.resolved, 5, 1000, opts, counts);
  CHECK(check_scene(l.spec, scene, opts).empty());
  CHECK(counts.total() == 0);
}

TEST_CASE("an unconstrained object needs no baseline rejections") {
  const Loaded l = load_text("m = Box\n");
  SceneGenOptions opts;
  BaselineCounts counts;
  const Scene scene =
      baseline_rejection_sample(l.spec, l.resolved, 0, 10, opts, counts);
  CHECK(counts.total() == 0);
  CHECK(scene.objects[0].position.norm() == 0.0);
}

TEST_CASE("an impossible spec exhausts the baseline budget") {
  const Loaded l = load_text(
      "a = Box at V3D(0, 0, 0)\n"
      "b = Box at V3D(0, 0, 0)\n");
  SceneGenOptions opts;
  BaselineCounts counts;
  try {
    baseline_rejection_sample(l.spec, l.resolved, 0, 50, opts, counts);
    FAIL("expected budget exhaustion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExhausted);
  }
  CHECK(counts.collision == 50);
}

}  // namespace
