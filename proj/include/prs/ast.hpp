#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prs/geom.hpp"

namespace prs {

// Expression tree. Nodes are immutable and shared; a parsed file is a value.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumLit {
  double value = 0.0;
};
struct StringLit {
  std::string value;
};
struct RangeLit {  // uniform range (lo, hi); endpoints are literal numbers
  double lo = 0.0, hi = 0.0;
};
struct VarRef {
  std::string name;
};
struct Vec3Lit {  // V3D(x, y, z); components may be ranges
  ExprPtr x, y, z;
};
struct AnchorExpr {  // e.g. (top back t): a point on the target's bounding box
  unsigned faces = 0;  // bitmask of Face values
  std::string target;
};
struct BinOp {
  char op = '+';  // '+' or '-'
  ExprPtr lhs, rhs;
};

using ExprNode =
    std::variant<NumLit, StringLit, RangeLit, VarRef, Vec3Lit, AnchorExpr, BinOp>;

struct Expr {
  ExprNode node;
  int line = 0, col = 0;
};

ExprPtr make_expr(ExprNode node, int line = 0, int col = 0);

// Region constructors admissible in source text. The two half-space-matrix
// constructors (ConvexPolygon3D, ConvexPolyhedron) exist only as library
// values and are rejected by the parser.
enum class RegionKind { Cuboid, Rect3D, Halfspace, All, Empty };

struct RegionDesc {
  RegionKind kind = RegionKind::All;
  std::vector<ExprPtr> args;
  int line = 0, col = 0;
};

enum class Direction { Left, Right, Ahead, Behind, Above, Below };
enum class Axis { X, Y, Z };

const char* direction_name(Direction d);

struct SpecWith {
  std::string property;
  ExprPtr value;
};
struct SpecAt {
  ExprPtr where;
  ExprPtr relative_to;  // optional; a point or object reference
};
struct SpecBeyond {
  ExprPtr target;  // X in "beyond X by d from Y"
  ExprPtr by;      // scalar or vector displacement
  ExprPtr from;    // Y
};
struct SpecIn {
  RegionDesc region;
};
struct SpecDirectional {
  Direction dir = Direction::Ahead;
  ExprPtr of;
};
struct SpecOn {
  ExprPtr target;                    // object, point-valued expression, or
  std::optional<RegionDesc> region;  // an explicit rectangle region
  bool completely = false;
};
struct SpecAlignedWith {
  ExprPtr target;
  Axis axis = Axis::Z;
};
struct SpecFacing {
  ExprPtr direction;
};
struct SpecFacingToward {
  ExprPtr target;
};

using SpecifierNode =
    std::variant<SpecWith, SpecAt, SpecBeyond, SpecIn, SpecDirectional, SpecOn,
                 SpecAlignedWith, SpecFacing, SpecFacingToward>;

struct Specifier {
  SpecifierNode node;
  int line = 0, col = 0;
};

struct ObjectDecl {
  std::string name;  // binding, or synthesized "_obj<k>" when unbound
  bool bound = false;
  std::string class_name;
  std::vector<Specifier> specifiers;
  int line = 0, col = 0;
};

struct ModelClass {
  std::string name;
  // Ordered so printing is deterministic; names unique. `position` and
  // `orientation` are always present after loading.
  std::vector<std::pair<std::string, ExprPtr>> defaults;
  int line = 0, col = 0;

  const ExprPtr* find_default(const std::string& property) const;
};

struct SpecAST {
  std::vector<ModelClass> classes;
  std::vector<ObjectDecl> declarations;
  uint64_t content_hash = 0;  // FNV-1a over model text then spec text

  const ModelClass* find_class(const std::string& name) const;
  const ObjectDecl* find_declaration(const std::string& name) const;
};

// FNV-1a, the hash recorded in exported scenes to tie them to their source.
uint64_t fnv1a(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ull);

// Printers. Printing a parsed tree and re-parsing it yields the same tree;
// numbers are emitted with 17 significant digits so values survive exactly.
std::string to_text(const Expr& e);
std::string to_text(const Specifier& s);
std::string to_text(const ObjectDecl& d);
std::string spec_to_text(const SpecAST& ast);     // declarations only
std::string models_to_text(const std::vector<ModelClass>& classes);

}  // namespace prs
