#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prs/ast.hpp"
#include "prs/geom.hpp"
#include "prs/resolve.hpp"
#include "prs/rng.hpp"

namespace prs {

// ----- concrete sampled scenes ------------------------------------------------

struct SceneObject {
  std::string name;
  std::string class_name;
  Vec3 position;
  // Unit quaternion [w, x, y, z], w >= 0. The quaternion is authoritative so
  // that serialized scenes survive read/write cycles bit-for-bit.
  std::array<double, 4> orientation{1, 0, 0, 0};
  Vec3 dims;  // width, length, height
  std::map<std::string, EvalValue> properties;  // extras beyond pose and dims

  Rotation rotation() const { return Rotation::from_quaternion(orientation); }
  OBB obb() const { return OBB{position, rotation(), dims * 0.5}; }
};

struct Scene {
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  std::vector<SceneObject> objects;  // declaration order
};

struct SampleStats {
  std::uint64_t scenes_requested = 0;
  std::uint64_t scenes_emitted = 0;
  std::uint64_t collision_rejections = 0;
  std::uint64_t hit_and_run_steps_total = 0;
  double wall_time_seconds = 0.0;
};

struct SceneGenOptions {
  AABB workspace{{-5, -5, -5}, {5, 5, 5}};
  int max_retries = 100;   // whole-scene redraws on collision
  int mix_iterations = 0;  // 0 = 10 * d^3 per region draw
  double collision_eps = 1e-9;
};

// Draws every property in dependency order, redrawing the whole scene from a
// fresh per-attempt stream whenever two placed boxes overlap. Deterministic in
// (spec text, seed).
Scene sample_scene(const SpecAST& spec, const ResolvedScene& resolved,
                   std::uint64_t seed, const SceneGenOptions& opts,
                   SampleStats& stats);

// Resolves and draws a single property into the context. Exposed so
// diagnostic passes can keep going after one property fails.
void draw_property(const SpecAST& spec, const PropertyNode& node,
                   RandomStream& rng, Context& ctx,
                   const SceneGenOptions& opts, SampleStats& stats);

// ----- independent validation ---------------------------------------------------

enum class RejectReason {
  ContainmentViolation,
  RelativePositionViolation,
  ObjectCollision,
};

const char* reject_reason_name(RejectReason r);

struct Violation {
  RejectReason reason = RejectReason::ContainmentViolation;
  std::string object;  // offending object (or pair, in the detail)
  std::string detail;
};

// Re-checks a concrete scene against the source declarations with direct
// geometric predicates (tolerance 1e-6), entirely separate from the sampler's
// region machinery, plus a pairwise collision sweep.
std::vector<Violation> check_scene(const SpecAST& spec, const Scene& scene,
                                   const SceneGenOptions& opts);

// ----- naive baseline -----------------------------------------------------------

struct BaselineCounts {
  std::uint64_t containment = 0;
  std::uint64_t relative_position = 0;
  std::uint64_t collision = 0;

  std::uint64_t total() const {
    return containment + relative_position + collision;
  }
};

// Rejection sampling without the constraint engine: every position is drawn
// uniformly from the object's own support (surface rectangle, coordinate box,
// or the whole workspace) and all relational structure is re-tested after the
// fact. Each rejected scene increments exactly one counter: the first failing
// category in the order containment, relative position, collision.
Scene baseline_rejection_sample(const SpecAST& spec,
                                const ResolvedScene& resolved,
                                std::uint64_t seed, int budget,
                                const SceneGenOptions& opts,
                                BaselineCounts& counts);

}  // namespace prs
