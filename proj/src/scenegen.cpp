#include "prs/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "prs/convex.hpp"
#include "prs/error.hpp"
#include "prs/rng.hpp"

namespace prs {

namespace {

constexpr double kCheckTol = 1e-6;

std::string fmt_vec(const Vec3& v) {
  std::ostringstream ss;
  ss << "(" << v.x << ", " << v.y << ", " << v.z << ")";
  return ss.str();
}

Vec3 ref_position(const EvalValue& v, const Context& ctx, int line, int col) {
  if (const auto* p = std::get_if<Vec3>(&v)) return *p;
  if (const auto* r = std::get_if<ObjectRef>(&v)) {
    const auto it = ctx.find(r->name);
    if (it == ctx.end() || !it->second.has_position) {
      fail(ErrorCode::UnknownVariable,
           "position of '" + r->name + "' is not available", line, col);
    }
    return it->second.position;
  }
  fail(ErrorCode::TypeMismatch,
       "expected a point or object, got " + eval_value_to_text(v), line, col);
}

EvalValue eval_with_offset(const ExprPtr& base, const ExprPtr& offset,
                           const Context& ctx) {
  if (!offset) return eval_expr(*base, ctx);
  return eval_expr(*make_expr(BinOp{'+', base, offset}), ctx);
}

Vec3 direction_axis(Direction dir, const Rotation& r) {
  switch (dir) {
    case Direction::Left: return r.right() * -1.0;
    case Direction::Right: return r.right();
    case Direction::Ahead: return r.forward();
    case Direction::Behind: return r.forward() * -1.0;
    case Direction::Above: return r.up();
    case Direction::Below: return r.up() * -1.0;
  }
  return {0, 1, 0};
}

int mixing_for(int dim, const SceneGenOptions& opts) {
  return opts.mix_iterations > 0 ? opts.mix_iterations
                                 : default_mixing_iterations(dim);
}

// ----- drawing one property ----------------------------------------------------

Vec3 draw_components(const ComponentUniform& cu, RandomStream& rng) {
  Vec3 out = cu.lo;
  for (int i = 0; i < 3; ++i) {
    if (cu.mask & (1u << i)) {
      (&out.x)[i] = rng.uniform((&cu.lo.x)[i], (&cu.hi.x)[i]);
    }
  }
  return out;
}

void apply_position(const PropertyDist& dist, RandomStream& rng,
                    ObjectState& state, const SceneGenOptions& opts,
                    SampleStats& stats) {
  if (const auto* c = std::get_if<ConstantValue>(&dist)) {
    state.position = std::get<Vec3>(c->value);
  } else if (const auto* cu = std::get_if<ComponentUniform>(&dist)) {
    state.position = draw_components(*cu, rng);
  } else if (const auto* ru = std::get_if<RegionUniform>(&dist)) {
    if (const auto* h = std::get_if<HSI>(&ru->set)) {
      const int iters = mixing_for(h->dim(), opts);
      stats.hit_and_run_steps_total += static_cast<std::uint64_t>(iters);
      state.position = from_eigen(sample_uniform(*h, iters, rng));
    } else {
      const auto& emb = std::get<EmbeddedHSI>(ru->set);
      const int iters = mixing_for(2, opts);
      stats.hit_and_run_steps_total += static_cast<std::uint64_t>(iters);
      state.position = emb.sample(iters, rng);
    }
  } else {
    fail(ErrorCode::TypeMismatch,
         "position of '" + state.name + "' did not resolve to a position");
  }
  state.has_position = true;
}

void apply_orientation(const PropertyDist& dist, RandomStream& rng,
                       const Context& ctx, ObjectState& state) {
  if (const auto* c = std::get_if<ConstantRotation>(&dist)) {
    state.orientation = c->value;
  } else if (const auto* cu = std::get_if<ComponentUniform>(&dist)) {
    const Vec3 rpy = draw_components(*cu, rng);
    state.orientation = Rotation::from_rpy(rpy.x, rpy.y, rpy.z);
  } else if (const auto* d = std::get_if<DerivedFacingToward>(&dist)) {
    const Vec3 target =
        ref_position(eval_expr(*d->target, ctx), ctx, d->target->line,
                     d->target->col);
    const Vec3 dir = target - state.position;
    if (dir.norm() <= 1e-12) {
      fail(ErrorCode::ZeroVector,
           "'" + state.name + "' cannot face a target at its own position");
    }
    state.orientation = rotation_from_forward(dir, {0, 0, 1});
  } else {
    fail(ErrorCode::TypeMismatch,
         "orientation of '" + state.name + "' did not resolve to a rotation");
  }
  state.has_orientation = true;
}

void apply_custom(const std::string& property, const PropertyDist& dist,
                  RandomStream& rng, ObjectState& state) {
  EvalValue value;
  if (const auto* c = std::get_if<ConstantValue>(&dist)) {
    value = c->value;
  } else if (const auto* su = std::get_if<ScalarUniform>(&dist)) {
    value = rng.uniform(su->lo, su->hi);
  } else if (const auto* cu = std::get_if<ComponentUniform>(&dist)) {
    value = draw_components(*cu, rng);
  } else {
    fail(ErrorCode::TypeMismatch,
         "property '" + property + "' of '" + state.name +
             "' did not resolve to a value");
  }

  const int dim_index = property == "width"    ? 0
                        : property == "length" ? 1
                        : property == "height" ? 2
                                               : -1;
  if (dim_index >= 0) {
    const auto* d = std::get_if<double>(&value);
    if (!d) {
      fail(ErrorCode::TypeMismatch,
           "'" + property + "' of '" + state.name + "' must be a number");
    }
    (&state.dims.x)[dim_index] = *d;
  } else {
    state.properties[property] = value;
  }
}

Context fresh_context(const SpecAST& spec) {
  Context ctx;
  for (const ObjectDecl& decl : spec.declarations) {
    ObjectState s;
    s.name = decl.name;
    s.class_name = decl.class_name;
    ctx[decl.name] = std::move(s);
  }
  return ctx;
}

std::vector<RandomStream> attempt_streams(std::uint64_t seed, int attempt,
                                          size_t count) {
  std::vector<RandomStream> streams;
  streams.reserve(count);
  const std::uint64_t base =
      RandomStream::mix(seed, static_cast<std::uint64_t>(attempt));
  for (size_t i = 0; i < count; ++i) {
    streams.emplace_back(RandomStream::mix(base, static_cast<std::uint64_t>(i)));
  }
  return streams;
}

void draw_all(const SpecAST& spec, const ResolvedScene& resolved,
              std::vector<RandomStream>& streams, Context& ctx,
              const SceneGenOptions& opts, SampleStats& stats,
              const std::function<bool(const PropertyNode&)>& use_engine_draw) {
  for (const PropertyNode& node : resolved.order) {
    RandomStream& rng = streams[static_cast<size_t>(node.decl_index)];
    if (node.property == "position" && !use_engine_draw(node)) {
      continue;  // caller substitutes its own draw
    }
    draw_property(spec, node, rng, ctx, opts, stats);
  }
}

std::optional<std::pair<std::string, std::string>> first_collision(
    const SpecAST& spec, const Context& ctx, double eps) {
  for (size_t i = 0; i < spec.declarations.size(); ++i) {
    for (size_t j = i + 1; j < spec.declarations.size(); ++j) {
      const ObjectState& a = ctx.at(spec.declarations[i].name);
      const ObjectState& b = ctx.at(spec.declarations[j].name);
      if (obb_overlap(a.obb(), b.obb(), eps)) {
        return std::make_pair(a.name, b.name);
      }
    }
  }
  return std::nullopt;
}

Scene assemble(const SpecAST& spec, const Context& ctx, std::uint64_t seed) {
  Scene scene;
  scene.spec_hash = spec.content_hash;
  scene.seed = seed;
  for (const ObjectDecl& decl : spec.declarations) {
    const ObjectState& s = ctx.at(decl.name);
    SceneObject obj;
    obj.name = s.name;
    obj.class_name = s.class_name;
    obj.position = s.position;
    obj.orientation = s.orientation.to_quaternion();
    obj.dims = s.dims;
    obj.properties = s.properties;
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

}  // namespace

void draw_property(const SpecAST& spec, const PropertyNode& node,
                   RandomStream& rng, Context& ctx,
                   const SceneGenOptions& opts, SampleStats& stats) {
  const ObjectDecl& decl =
      spec.declarations[static_cast<size_t>(node.decl_index)];
  ObjectState& state = ctx[node.object];
  if (state.name.empty()) {
    state.name = decl.name;
    state.class_name = decl.class_name;
  }
  const PropertyDist dist =
      resolve_property(spec, decl, node.property, ctx, opts.workspace);
  if (node.property == "position") {
    apply_position(dist, rng, state, opts, stats);
  } else if (node.property == "orientation") {
    apply_orientation(dist, rng, ctx, state);
  } else {
    apply_custom(node.property, dist, rng, state);
  }
}

Scene sample_scene(const SpecAST& spec, const ResolvedScene& resolved,
                   std::uint64_t seed, const SceneGenOptions& opts,
                   SampleStats& stats) {
  ++stats.scenes_requested;
  const int attempts = std::max(1, opts.max_retries);
  std::uint64_t rejected_here = 0;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Context ctx = fresh_context(spec);
    auto streams = attempt_streams(seed, attempt, spec.declarations.size());
    draw_all(spec, resolved, streams, ctx, opts, stats,
             [](const PropertyNode&) { return true; });
    if (first_collision(spec, ctx, opts.collision_eps)) {
      ++stats.collision_rejections;
      ++rejected_here;
      continue;
    }
    ++stats.scenes_emitted;
    return assemble(spec, ctx, seed);
  }
  fail(ErrorCode::RetriesExhausted,
       "no collision-free scene for seed " + std::to_string(seed) + " after " +
           std::to_string(attempts) + " attempts (collision rejections: " +
           std::to_string(rejected_here) + ")");
}

// ----- independent predicate checks ---------------------------------------------

namespace {

// Collects violations for one declaration using direct geometric predicates.
struct PredicateChecker {
  const Context& ctx;
  std::vector<Violation> containment;
  std::vector<Violation> relative;

  void add(std::vector<Violation>& out, RejectReason reason,
           const std::string& object, const Specifier& s,
           const std::string& extra) {
    Violation v;
    v.reason = reason;
    v.object = object;
    v.detail = "'" + to_text(s) + "': " + extra;
    out.push_back(std::move(v));
  }

  static bool region_contains(const RegionDesc& desc, const Context& ctx,
                              const Vec3& p) {
    const auto arg_vec = [&](size_t i) -> Vec3 {
      return ref_position(eval_expr(*desc.args[i], ctx), ctx,
                          desc.args[i]->line, desc.args[i]->col);
    };
    switch (desc.kind) {
      case RegionKind::Cuboid: {
        const Vec3 o = arg_vec(0), rpy = arg_vec(1), dims = arg_vec(2);
        const Rotation r = Rotation::from_rpy(rpy.x, rpy.y, rpy.z);
        const Vec3 d = p - o;
        return std::abs(d.dot(r.right())) <= dims.x * 0.5 + kCheckTol &&
               std::abs(d.dot(r.forward())) <= dims.y * 0.5 + kCheckTol &&
               std::abs(d.dot(r.up())) <= dims.z * 0.5 + kCheckTol;
      }
      case RegionKind::Rect3D: {
        const Vec3 o = arg_vec(0), rpy = arg_vec(1), dims = arg_vec(2);
        const Rotation r = Rotation::from_rpy(rpy.x, rpy.y, rpy.z);
        const Vec3 d = p - o;
        return std::abs(d.dot(r.right())) <= dims.x * 0.5 + kCheckTol &&
               std::abs(d.dot(r.forward())) <= dims.y * 0.5 + kCheckTol &&
               std::abs(d.dot(r.up())) <= kCheckTol;
      }
      case RegionKind::Halfspace: {
        const Vec3 o = arg_vec(0);
        const Vec3 n = arg_vec(1).normalized();
        return (p - o).dot(n) >= -kCheckTol;
      }
      case RegionKind::All:
        return true;
      case RegionKind::Empty:
        return false;
    }
    return false;
  }

  void check_point_match(const std::string& object, const Specifier& s,
                         const Vec3& actual, const EvalValue& expected,
                         std::vector<Violation>& out, RejectReason reason) {
    if (const auto* p = std::get_if<Vec3>(&expected)) {
      if ((actual - *p).norm() > kCheckTol) {
        add(out, reason, object,
            s, "expected " + fmt_vec(*p) + ", got " + fmt_vec(actual));
      }
      return;
    }
    if (const auto* r = std::get_if<RangedVec3>(&expected)) {
      for (int i = 0; i < 3; ++i) {
        const double x = (&actual.x)[i];
        if (x < (&r->lo.x)[i] - kCheckTol || x > (&r->hi.x)[i] + kCheckTol) {
          add(out, reason, object, s,
              "coordinate " + std::to_string(i) + " = " + std::to_string(x) +
                  " outside its interval");
          return;
        }
      }
      return;
    }
    add(out, reason, object, s,
        "expected a position, got " + eval_value_to_text(expected));
  }

  void check_on(const ObjectDecl& decl, const SpecOn& on, const Specifier& s,
                const ObjectState& self) {
    Vec3 plane_origin, n, tu, tv;
    double hu = 0, hv = 0;
    if (on.region) {
      const auto arg_vec = [&](size_t i) -> Vec3 {
        return ref_position(eval_expr(*on.region->args[i], ctx), ctx,
                            on.region->args[i]->line, on.region->args[i]->col);
      };
      if (on.region->kind != RegionKind::Rect3D) {
        add(containment, RejectReason::ContainmentViolation, decl.name, s,
            "surface placements require a Rect3D region");
        return;
      }
      const Vec3 o = arg_vec(0), rpy = arg_vec(1), dims = arg_vec(2);
      const Rotation r = Rotation::from_rpy(rpy.x, rpy.y, rpy.z);
      plane_origin = o;
      n = r.up();
      tu = r.right();
      tv = r.forward();
      hu = dims.x * 0.5;
      hv = dims.y * 0.5;
    } else {
      const EvalValue v = eval_expr(*on.target, ctx);
      if (const auto* point = std::get_if<Vec3>(&v)) {
        const Vec3 expected = *point + Vec3{0, 0, self.dims.z * 0.5};
        if ((self.position - expected).norm() > kCheckTol) {
          add(containment, RejectReason::ContainmentViolation, decl.name, s,
              "expected contact at " + fmt_vec(expected) + ", got " +
                  fmt_vec(self.position));
        }
        return;
      }
      const auto* r = std::get_if<ObjectRef>(&v);
      if (!r) {
        add(containment, RejectReason::ContainmentViolation, decl.name, s,
            "unsupported surface " + eval_value_to_text(v));
        return;
      }
      const ObjectState& carrier = ctx.at(r->name);
      n = carrier.orientation.up();
      tu = carrier.orientation.right();
      tv = carrier.orientation.forward();
      plane_origin = carrier.position + n * (carrier.dims.z * 0.5);
      hu = carrier.dims.x * 0.5;
      hv = carrier.dims.y * 0.5;
    }

    const Vec3 d = self.position - plane_origin;
    if (std::abs(d.dot(n) - self.dims.z * 0.5) > kCheckTol) {
      add(containment, RejectReason::ContainmentViolation, decl.name, s,
          "base is not resting on the surface plane");
      return;
    }
    if (!on.completely) {
      if (std::abs(d.dot(tu)) > hu + kCheckTol ||
          std::abs(d.dot(tv)) > hv + kCheckTol) {
        add(containment, RejectReason::ContainmentViolation, decl.name, s,
            "center " + fmt_vec(self.position) + " lies off the surface");
      }
      return;
    }
    // Every corner of the base must project inside the carrier rectangle.
    const Vec3 r = self.orientation.right() * (self.dims.x * 0.5);
    const Vec3 f = self.orientation.forward() * (self.dims.y * 0.5);
    const Vec3 base = self.position - self.orientation.up() * (self.dims.z * 0.5);
    for (const double su : {-1.0, 1.0}) {
      for (const double sv : {-1.0, 1.0}) {
        const Vec3 corner = base + r * su + f * sv;
        const Vec3 dc = corner - plane_origin;
        if (std::abs(dc.dot(tu)) > hu + kCheckTol ||
            std::abs(dc.dot(tv)) > hv + kCheckTol) {
          add(containment, RejectReason::ContainmentViolation, decl.name, s,
              "footprint corner " + fmt_vec(corner) +
                  " overhangs the surface");
          return;
        }
      }
    }
  }

  void check_declaration(const ObjectDecl& decl) {
    const ObjectState& self = ctx.at(decl.name);
    for (const Specifier& s : decl.specifiers) {
      if (const auto* w = std::get_if<SpecWith>(&s.node)) {
        if (w->property == "position") {
          check_point_match(decl.name, s, self.position,
                            eval_expr(*w->value, ctx), containment,
                            RejectReason::ContainmentViolation);
        } else if (w->property == "orientation") {
          const EvalValue v = eval_expr(*w->value, ctx);
          if (const auto* rpy = std::get_if<Vec3>(&v)) {
            const Rotation expect = Rotation::from_rpy(rpy->x, rpy->y, rpy->z);
            if ((self.orientation.right() - expect.right()).norm() > kCheckTol ||
                (self.orientation.up() - expect.up()).norm() > kCheckTol) {
              add(relative, RejectReason::RelativePositionViolation, decl.name,
                  s, "orientation differs from the assigned angles");
            }
          }
          // Ranged angles admit a continuum; the draw itself guarantees them.
        }
      } else if (const auto* at = std::get_if<SpecAt>(&s.node)) {
        check_point_match(decl.name, s, self.position,
                          eval_with_offset(at->where, at->relative_to, ctx),
                          containment, RejectReason::ContainmentViolation);
      } else if (const auto* b = std::get_if<SpecBeyond>(&s.node)) {
        const Vec3 x =
            ref_position(eval_expr(*b->target, ctx), ctx, s.line, s.col);
        const Vec3 y =
            ref_position(eval_expr(*b->from, ctx), ctx, s.line, s.col);
        const Vec3 dir = x - y;
        if (dir.norm() <= 1e-12) continue;  // unsatisfiable; caught upstream
        const EvalValue by = eval_expr(*b->by, ctx);
        Vec3 expected;
        if (const auto* dist = std::get_if<double>(&by)) {
          expected = x + dir.normalized() * (*dist);
        } else if (const auto* off = std::get_if<Vec3>(&by)) {
          expected = x + rotation_from_forward(dir, {0, 0, 1}) * (*off);
        } else {
          continue;
        }
        if ((self.position - expected).norm() > kCheckTol) {
          add(relative, RejectReason::RelativePositionViolation, decl.name, s,
              "expected " + fmt_vec(expected) + ", got " +
                  fmt_vec(self.position));
        }
      } else if (const auto* in = std::get_if<SpecIn>(&s.node)) {
        if (!region_contains(in->region, ctx, self.position)) {
          add(containment, RejectReason::ContainmentViolation, decl.name, s,
              "position " + fmt_vec(self.position) + " is outside the region");
        }
      } else if (const auto* dir = std::get_if<SpecDirectional>(&s.node)) {
        const EvalValue v = eval_expr(*dir->of, ctx);
        Vec3 origin;
        Rotation axes;
        if (const auto* r = std::get_if<ObjectRef>(&v)) {
          const ObjectState& st = ctx.at(r->name);
          origin = st.position;
          axes = st.orientation;
        } else if (const auto* p = std::get_if<Vec3>(&v)) {
          origin = *p;
        } else {
          continue;
        }
        const Vec3 axis = direction_axis(dir->dir, axes);
        if ((self.position - origin).dot(axis) < -kCheckTol) {
          add(relative, RejectReason::RelativePositionViolation, decl.name, s,
              "position is on the wrong side of " + fmt_vec(origin));
        }
      } else if (const auto* on = std::get_if<SpecOn>(&s.node)) {
        check_on(decl, *on, s, self);
      } else if (const auto* al = std::get_if<SpecAlignedWith>(&s.node)) {
        const Vec3 target =
            ref_position(eval_expr(*al->target, ctx), ctx, s.line, s.col);
        const int axis = al->axis == Axis::X ? 0 : al->axis == Axis::Y ? 1 : 2;
        if (std::abs((&self.position.x)[axis] - (&target.x)[axis]) >
            kCheckTol) {
          add(relative, RejectReason::RelativePositionViolation, decl.name, s,
              "coordinates differ along the shared axis");
        }
      } else if (const auto* f = std::get_if<SpecFacing>(&s.node)) {
        const EvalValue v = eval_expr(*f->direction, ctx);
        const auto* dirv = std::get_if<Vec3>(&v);
        if (!dirv || dirv->norm() <= 1e-12) continue;
        if ((self.orientation.forward() - dirv->normalized()).norm() >
            kCheckTol) {
          add(relative, RejectReason::RelativePositionViolation, decl.name, s,
              "forward axis is not the assigned direction");
        }
      } else if (const auto* ft = std::get_if<SpecFacingToward>(&s.node)) {
        const Vec3 target =
            ref_position(eval_expr(*ft->target, ctx), ctx, s.line, s.col);
        const Vec3 dir2 = target - self.position;
        if (dir2.norm() <= 1e-12) continue;
        if ((self.orientation.forward() - dir2.normalized()).norm() >
            kCheckTol) {
          add(relative, RejectReason::RelativePositionViolation, decl.name, s,
              "forward axis does not point at " + fmt_vec(target));
        }
      }
    }
  }
};

Context scene_context(const SpecAST& spec, const Scene& scene) {
  if (scene.objects.size() != spec.declarations.size()) {
    fail(ErrorCode::SpecSceneMismatch,
         "scene has " + std::to_string(scene.objects.size()) +
             " objects, declarations require " +
             std::to_string(spec.declarations.size()));
  }
  Context ctx;
  for (const SceneObject& obj : scene.objects) {
    ObjectState s;
    s.name = obj.name;
    s.class_name = obj.class_name;
    s.position = obj.position;
    s.orientation = obj.rotation();
    s.dims = obj.dims;
    s.has_position = true;
    s.has_orientation = true;
    s.properties = obj.properties;
    ctx[obj.name] = std::move(s);
  }
  for (const ObjectDecl& decl : spec.declarations) {
    const auto it = ctx.find(decl.name);
    if (it == ctx.end() || it->second.class_name != decl.class_name) {
      fail(ErrorCode::SpecSceneMismatch,
           "scene is missing object '" + decl.name + "' of class '" +
               decl.class_name + "'");
    }
  }
  return ctx;
}

}  // namespace

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::ContainmentViolation: return "ContainmentViolation";
    case RejectReason::RelativePositionViolation:
      return "RelativePositionViolation";
    case RejectReason::ObjectCollision: return "ObjectCollision";
  }
  return "unknown";
}

std::vector<Violation> check_scene(const SpecAST& spec, const Scene& scene,
                                   const SceneGenOptions& opts) {
  const Context ctx = scene_context(spec, scene);
  PredicateChecker checker{ctx, {}, {}};
  for (const ObjectDecl& decl : spec.declarations) {
    checker.check_declaration(decl);
  }
  std::vector<Violation> out = std::move(checker.containment);
  out.insert(out.end(), checker.relative.begin(), checker.relative.end());
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    for (size_t j = i + 1; j < scene.objects.size(); ++j) {
      if (obb_overlap(scene.objects[i].obb(), scene.objects[j].obb(),
                      opts.collision_eps)) {
        Violation v;
        v.reason = RejectReason::ObjectCollision;
        v.object = scene.objects[i].name;
        v.detail = "'" + scene.objects[i].name + "' interpenetrates '" +
                   scene.objects[j].name + "'";
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

// ----- naive baseline ------------------------------------------------------------

namespace {

// Uninformed per-object position supports: relational structure is dropped and
// later re-tested, mirroring a hand-written rejection sampler.
struct Proposal {
  enum Kind { Exact, Rect, BoxK, Plane, Workspace } kind = Workspace;
  Vec3 point;                  // Exact
  Vec3 origin, tu, tv;         // Rect (origin already lifted)
  double hu = 0, hv = 0;       // Rect half extents
  Vec3 lo, hi;                 // BoxK bounds
  unsigned mask = 0;           // BoxK drawn components
  int plane_axis = 0;          // Plane
  double plane_value = 0;      // Plane
};

Proposal build_proposal(const SpecAST& spec, const ObjectDecl& decl,
                        const Context& ctx) {
  const ObjectState& self = ctx.at(decl.name);
  const auto position_value = [&](const Specifier& s) -> std::optional<EvalValue> {
    if (const auto* w = std::get_if<SpecWith>(&s.node)) {
      if (w->property == "position") return eval_expr(*w->value, ctx);
      return std::nullopt;
    }
    if (const auto* at = std::get_if<SpecAt>(&s.node)) {
      return eval_with_offset(at->where, at->relative_to, ctx);
    }
    return std::nullopt;
  };

  // Deterministic placements first: exact coordinates, displacements, and
  // point contacts admit exactly one position.
  for (const Specifier& s : decl.specifiers) {
    if (const auto v = position_value(s)) {
      if (const auto* p = std::get_if<Vec3>(&*v)) {
        Proposal out;
        out.kind = Proposal::Exact;
        out.point = *p;
        return out;
      }
      continue;
    }
    if (const auto* b = std::get_if<SpecBeyond>(&s.node)) {
      const Vec3 x = ref_position(eval_expr(*b->target, ctx), ctx, s.line, s.col);
      const Vec3 y = ref_position(eval_expr(*b->from, ctx), ctx, s.line, s.col);
      const Vec3 dir = x - y;
      if (dir.norm() <= 1e-12) continue;
      const EvalValue by = eval_expr(*b->by, ctx);
      Proposal out;
      out.kind = Proposal::Exact;
      if (const auto* d = std::get_if<double>(&by)) {
        out.point = x + dir.normalized() * (*d);
      } else if (const auto* off = std::get_if<Vec3>(&by)) {
        out.point = x + rotation_from_forward(dir, {0, 0, 1}) * (*off);
      } else {
        continue;
      }
      return out;
    }
    if (const auto* on = std::get_if<SpecOn>(&s.node)) {
      if (!on->region) {
        const EvalValue v = eval_expr(*on->target, ctx);
        if (const auto* p = std::get_if<Vec3>(&v)) {
          Proposal out;
          out.kind = Proposal::Exact;
          out.point = *p + Vec3{0, 0, self.dims.z * 0.5};
          return out;
        }
      }
    }
  }

  // Surface rectangles: the full carrier, with no erosion or side cuts.
  for (const Specifier& s : decl.specifiers) {
    const auto* on = std::get_if<SpecOn>(&s.node);
    if (!on) continue;
    Proposal out;
    out.kind = Proposal::Rect;
    if (on->region) {
      if (on->region->kind != RegionKind::Rect3D) continue;
      const auto arg_vec = [&](size_t i) -> Vec3 {
        return ref_position(eval_expr(*on->region->args[i], ctx), ctx,
                            on->region->args[i]->line, on->region->args[i]->col);
      };
      const Vec3 o = arg_vec(0), rpy = arg_vec(1), dims = arg_vec(2);
      const Rotation r = Rotation::from_rpy(rpy.x, rpy.y, rpy.z);
      out.origin = o + r.up() * (self.dims.z * 0.5);
      out.tu = r.right();
      out.tv = r.forward();
      out.hu = dims.x * 0.5;
      out.hv = dims.y * 0.5;
      return out;
    }
    const EvalValue v = eval_expr(*on->target, ctx);
    const auto* r = std::get_if<ObjectRef>(&v);
    if (!r) continue;
    const ObjectState& carrier = ctx.at(r->name);
    const Vec3 n = carrier.orientation.up();
    out.origin = carrier.position +
                 n * (carrier.dims.z * 0.5 + self.dims.z * 0.5);
    out.tu = carrier.orientation.right();
    out.tv = carrier.orientation.forward();
    out.hu = carrier.dims.x * 0.5;
    out.hv = carrier.dims.y * 0.5;
    return out;
  }

  // Coordinate boxes from ranged assignments.
  for (const Specifier& s : decl.specifiers) {
    if (const auto v = position_value(s)) {
      if (const auto* r = std::get_if<RangedVec3>(&*v)) {
        Proposal out;
        out.kind = Proposal::BoxK;
        out.lo = r->lo;
        out.hi = r->hi;
        out.mask = r->mask;
        return out;
      }
    }
  }

  // Shared-coordinate planes.
  for (const Specifier& s : decl.specifiers) {
    if (const auto* al = std::get_if<SpecAlignedWith>(&s.node)) {
      const Vec3 target =
          ref_position(eval_expr(*al->target, ctx), ctx, s.line, s.col);
      Proposal out;
      out.kind = Proposal::Plane;
      out.plane_axis = al->axis == Axis::X ? 0 : al->axis == Axis::Y ? 1 : 2;
      out.plane_value = (&target.x)[out.plane_axis];
      return out;
    }
  }

  // Constrained but unsupported elsewhere: fall back to the workspace box.
  for (const Specifier& s : decl.specifiers) {
    if (std::holds_alternative<SpecIn>(s.node) ||
        std::holds_alternative<SpecDirectional>(s.node)) {
      Proposal out;
      out.kind = Proposal::Workspace;
      return out;
    }
  }

  // No positional language at all: the class default applies, as in the
  // engine, so unconstrained specs reject nothing.
  const ModelClass* cls = spec.find_class(decl.class_name);
  const ExprPtr* def = cls ? cls->find_default("position") : nullptr;
  Proposal out;
  if (!def) {
    out.kind = Proposal::Exact;
    out.point = {0, 0, 0};
    return out;
  }
  const EvalValue v = eval_expr(**def, ctx);
  if (const auto* p = std::get_if<Vec3>(&v)) {
    out.kind = Proposal::Exact;
    out.point = *p;
  } else if (const auto* r = std::get_if<RangedVec3>(&v)) {
    out.kind = Proposal::BoxK;
    out.lo = r->lo;
    out.hi = r->hi;
    out.mask = r->mask;
  }
  return out;
}

Vec3 draw_proposal(const Proposal& p, const AABB& ws, RandomStream& rng) {
  switch (p.kind) {
    case Proposal::Exact:
      return p.point;
    case Proposal::Rect: {
      const double u = rng.uniform(-p.hu, p.hu);
      const double v = rng.uniform(-p.hv, p.hv);
      return p.origin + p.tu * u + p.tv * v;
    }
    case Proposal::BoxK: {
      Vec3 out = p.lo;
      for (int i = 0; i < 3; ++i) {
        if (p.mask & (1u << i)) {
          (&out.x)[i] = rng.uniform((&p.lo.x)[i], (&p.hi.x)[i]);
        }
      }
      return out;
    }
    case Proposal::Plane: {
      Vec3 out{rng.uniform(ws.min.x, ws.max.x), rng.uniform(ws.min.y, ws.max.y),
               rng.uniform(ws.min.z, ws.max.z)};
      (&out.x)[p.plane_axis] = p.plane_value;
      return out;
    }
    case Proposal::Workspace:
      return {rng.uniform(ws.min.x, ws.max.x), rng.uniform(ws.min.y, ws.max.y),
              rng.uniform(ws.min.z, ws.max.z)};
  }
  return {0, 0, 0};
}

}  // namespace

Scene baseline_rejection_sample(const SpecAST& spec,
                                const ResolvedScene& resolved,
                                std::uint64_t seed, int budget,
                                const SceneGenOptions& opts,
                                BaselineCounts& counts) {
  if (budget < 1) {
    fail(ErrorCode::BudgetExhausted, "baseline budget must be at least 1");
  }
  SampleStats ignored;
  for (int attempt = 0; attempt < budget; ++attempt) {
    Context ctx = fresh_context(spec);
    auto streams = attempt_streams(seed, attempt, spec.declarations.size());
    draw_all(spec, resolved, streams, ctx, opts, ignored,
             [&](const PropertyNode& node) {
               ObjectState& state = ctx[node.object];
               const Proposal p = build_proposal(
                   spec, spec.declarations[static_cast<size_t>(node.decl_index)],
                   ctx);
               state.position = draw_proposal(
                   p, opts.workspace,
                   streams[static_cast<size_t>(node.decl_index)]);
               state.has_position = true;
               return false;  // position handled here
             });

    PredicateChecker checker{ctx, {}, {}};
    for (const ObjectDecl& decl : spec.declarations) {
      checker.check_declaration(decl);
    }
    if (!checker.containment.empty()) {
      ++counts.containment;
      continue;
    }
    if (!checker.relative.empty()) {
      ++counts.relative_position;
      continue;
    }
    if (first_collision(spec, ctx, opts.collision_eps)) {
      ++counts.collision;
      continue;
    }
    return assemble(spec, ctx, seed);
  }
  fail(ErrorCode::BudgetExhausted,
       "no accepted scene for seed " + std::to_string(seed) + " within " +
           std::to_string(budget) + " draws (containment " +
           std::to_string(counts.containment) + ", relative position " +
           std::to_string(counts.relative_position) + ", collision " +
           std::to_string(counts.collision) + ")");
}

}  // namespace prs
