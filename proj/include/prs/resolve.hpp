#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prs/ast.hpp"
#include "prs/convex.hpp"
#include "prs/geom.hpp"

namespace prs {

// ----- evaluated expression values ------------------------------------------

struct ScalarRange {
  double lo = 0.0, hi = 0.0;
};

// A vector whose components may independently be exact or uniform ranges.
struct RangedVec3 {
  Vec3 lo, hi;        // equal on unmasked components
  unsigned mask = 0;  // bit i set => component i is a range
};

struct ObjectRef {
  std::string name;
};

using EvalValue =
    std::variant<double, ScalarRange, Vec3, RangedVec3, std::string, ObjectRef>;

std::string eval_value_to_text(const EvalValue& v);

// ----- concrete object state during evaluation -------------------------------

struct ObjectState {
  std::string name;
  std::string class_name;
  Vec3 position;
  Rotation orientation;
  Vec3 dims{0.1, 0.1, 0.1};  // width, length, height; fallback when unmodeled
  bool has_position = false;
  bool has_orientation = false;
  std::map<std::string, EvalValue> properties;  // every sampled property

  OBB obb() const { return OBB{position, orientation, dims * 0.5}; }
};

using Context = std::map<std::string, ObjectState>;

// Evaluates an expression against already-concrete objects. Bare references
// evaluate to ObjectRef; arithmetic coerces them to the object's position.
EvalValue eval_expr(const Expr& e, const Context& ctx);

// ----- per-property distributions --------------------------------------------

struct ConstantValue {
  EvalValue value;  // double | string | Vec3
};
struct ConstantRotation {
  Rotation value;
};
struct ScalarUniform {
  double lo = 0.0, hi = 0.0;
};
struct ComponentUniform {
  Vec3 lo, hi;
  unsigned mask = 0;  // which components are drawn; others are exact
};
struct RegionUniform {
  RegionSet set;  // 3D rows or a plane-embedded 2D set
};
// Orientation computed after this object's own position is known.
struct DerivedFacingToward {
  ExprPtr target;
};

using PropertyDist =
    std::variant<ConstantValue, ConstantRotation, ScalarUniform,
                 ComponentUniform, RegionUniform, DerivedFacingToward>;

// ----- dependency ordering ----------------------------------------------------

struct PropertyNode {
  int decl_index = 0;
  std::string object;
  std::string property;
};

struct DependencyGraph {
  std::vector<PropertyNode> nodes;
  std::vector<std::pair<size_t, size_t>> edges;  // prerequisite -> dependent
};

struct ResolvedScene {
  DependencyGraph graph;
  std::vector<PropertyNode> order;  // a deterministic topological order
};

// Builds the (object, property) graph and a topological order. Ties are broken
// by declaration index, then property name, so the order is reproducible.
ResolvedScene build_dependency_order(const SpecAST& spec);

// Turns one property of one declaration into a concrete distribution, given
// every prerequisite object/property already evaluated in `ctx` (including
// this object's own dimensions and, unless derived, its orientation).
PropertyDist resolve_property(const SpecAST& spec, const ObjectDecl& decl,
                              const std::string& property, const Context& ctx,
                              const AABB& workspace);

// The properties a declaration owns: position, orientation, class defaults,
// and any with-assigned extras, deduplicated, in a stable order.
std::vector<std::string> object_properties(const SpecAST& spec,
                                           const ObjectDecl& decl);

}  // namespace prs
