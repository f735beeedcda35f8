#include "prs/resolve.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "prs/error.hpp"

namespace prs {

namespace {

std::string fmt_vec(const Vec3& v) {
  std::ostringstream ss;
  ss << "(" << v.x << ", " << v.y << ", " << v.z << ")";
  return ss.str();
}

const ObjectState& require_object(const Context& ctx, const std::string& name,
                                  int line, int col) {
  const auto it = ctx.find(name);
  if (it == ctx.end()) {
    fail(ErrorCode::UnknownVariable,
         "object '" + name + "' is not available yet", line, col);
  }
  return it->second;
}

RangedVec3 widen(const Vec3& v) { return RangedVec3{v, v, 0}; }

Vec3 position_of(const EvalValue& v, const Context& ctx, int line, int col) {
  if (const auto* p = std::get_if<Vec3>(&v)) return *p;
  if (const auto* r = std::get_if<ObjectRef>(&v)) {
    const ObjectState& s = require_object(ctx, r->name, line, col);
    if (!s.has_position) {
      fail(ErrorCode::UnknownVariable,
           "position of '" + r->name + "' is not sampled yet", line, col);
    }
    return s.position;
  }
  fail(ErrorCode::TypeMismatch,
       "expected a point or object, got " + eval_value_to_text(v), line, col);
}

EvalValue add_values(const EvalValue& a, const EvalValue& b, char op, int line,
                     int col, const Context& ctx) {
  const double sign = op == '-' ? -1.0 : 1.0;

  // Object references participate in arithmetic as their positions.
  const auto deref = [&](const EvalValue& v) -> EvalValue {
    if (std::holds_alternative<ObjectRef>(v)) {
      return position_of(v, ctx, line, col);
    }
    return v;
  };
  const EvalValue lhs = deref(a), rhs = deref(b);

  const auto is_scalar = [](const EvalValue& v) {
    return std::holds_alternative<double>(v) ||
           std::holds_alternative<ScalarRange>(v);
  };
  const auto is_vector = [](const EvalValue& v) {
    return std::holds_alternative<Vec3>(v) ||
           std::holds_alternative<RangedVec3>(v);
  };

  if (is_scalar(lhs) && is_scalar(rhs)) {
    const auto as_range = [](const EvalValue& v) {
      if (const auto* d = std::get_if<double>(&v)) return ScalarRange{*d, *d};
      return std::get<ScalarRange>(v);
    };
    const ScalarRange x = as_range(lhs), y = as_range(rhs);
    ScalarRange out;
    if (op == '+') {
      out = {x.lo + y.lo, x.hi + y.hi};
    } else {
      out = {x.lo - y.hi, x.hi - y.lo};
    }
    if (out.lo == out.hi) return out.lo;
    return out;
  }

  if (is_vector(lhs) && is_vector(rhs)) {
    const auto as_ranged = [](const EvalValue& v) {
      if (const auto* p = std::get_if<Vec3>(&v)) return widen(*p);
      return std::get<RangedVec3>(v);
    };
    const RangedVec3 x = as_ranged(lhs), y = as_ranged(rhs);
    RangedVec3 out;
    out.mask = x.mask | y.mask;
    if (op == '+') {
      out.lo = x.lo + y.lo;
      out.hi = x.hi + y.hi;
    } else {
      out.lo = x.lo - y.hi;
      out.hi = x.hi - y.lo;
    }
    if (out.mask == 0) return out.lo;
    return out;
  }

  (void)sign;
  fail(ErrorCode::TypeMismatch,
       std::string("cannot apply '") + op + "' to " + eval_value_to_text(a) +
           " and " + eval_value_to_text(b),
       line, col);
}

}  // namespace

std::string eval_value_to_text(const EvalValue& v) {
  struct Printer {
    std::string operator()(double d) const {
      std::ostringstream ss;
      ss << d;
      return ss.str();
    }
    std::string operator()(const ScalarRange& r) const {
      std::ostringstream ss;
      ss << "(" << r.lo << ", " << r.hi << ")";
      return ss.str();
    }
    std::string operator()(const Vec3& p) const { return fmt_vec(p); }
    std::string operator()(const RangedVec3& r) const {
      return "V3D" + fmt_vec(r.lo) + ".." + fmt_vec(r.hi);
    }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(const ObjectRef& o) const { return o.name; }
  };
  return std::visit(Printer{}, v);
}

EvalValue eval_expr(const Expr& e, const Context& ctx) {
  struct Eval {
    const Context& ctx;
    const Expr& expr;

    EvalValue operator()(const NumLit& n) const { return n.value; }
    EvalValue operator()(const StringLit& s) const { return s.value; }
    EvalValue operator()(const RangeLit& r) const {
      return ScalarRange{r.lo, r.hi};
    }
    EvalValue operator()(const VarRef& v) const { return ObjectRef{v.name}; }
    EvalValue operator()(const Vec3Lit& v) const {
      RangedVec3 out;
      const Expr* comps[3] = {v.x.get(), v.y.get(), v.z.get()};
      for (int i = 0; i < 3; ++i) {
        const EvalValue c = eval_expr(*comps[i], ctx);
        double lo, hi;
        if (const auto* d = std::get_if<double>(&c)) {
          lo = hi = *d;
        } else if (const auto* r = std::get_if<ScalarRange>(&c)) {
          lo = r->lo;
          hi = r->hi;
          out.mask |= 1u << i;
        } else {
          fail(ErrorCode::TypeMismatch,
               "V3D components must be numbers or ranges", comps[i]->line,
               comps[i]->col);
        }
        (&out.lo.x)[i] = lo;
        (&out.hi.x)[i] = hi;
      }
      if (out.mask == 0) return out.lo;
      return out;
    }
    EvalValue operator()(const AnchorExpr& a) const {
      const ObjectState& s = require_object(ctx, a.target, expr.line, expr.col);
      if (!s.has_position || !s.has_orientation) {
        fail(ErrorCode::UnknownVariable,
             "pose of '" + a.target + "' is not sampled yet", expr.line,
             expr.col);
      }
      return anchor_point(s.obb(), a.faces);
    }
    EvalValue operator()(const BinOp& b) const {
      const EvalValue lhs = eval_expr(*b.lhs, ctx);
      const EvalValue rhs = eval_expr(*b.rhs, ctx);
      return add_values(lhs, rhs, b.op, expr.line, expr.col, ctx);
    }
  };
  return std::visit(Eval{ctx, e}, e.node);
}

// ----- object property inventory ---------------------------------------------

std::vector<std::string> object_properties(const SpecAST& spec,
                                           const ObjectDecl& decl) {
  std::vector<std::string> props = {"position", "orientation"};
  const auto add = [&props](const std::string& name) {
    if (std::find(props.begin(), props.end(), name) == props.end()) {
      props.push_back(name);
    }
  };
  if (const ModelClass* cls = spec.find_class(decl.class_name)) {
    for (const auto& [name, value] : cls->defaults) add(name);
  }
  for (const auto& s : decl.specifiers) {
    if (const auto* w = std::get_if<SpecWith>(&s.node)) add(w->property);
  }
  return props;
}

// ----- dependency graph -------------------------------------------------------

namespace {

void collect_refs(const Expr& e, std::set<std::string>& out) {
  struct Walk {
    std::set<std::string>& out;
    void operator()(const NumLit&) const {}
    void operator()(const StringLit&) const {}
    void operator()(const RangeLit&) const {}
    void operator()(const VarRef& v) const { out.insert(v.name); }
    void operator()(const Vec3Lit& v) const {
      collect_refs(*v.x, out);
      collect_refs(*v.y, out);
      collect_refs(*v.z, out);
    }
    void operator()(const AnchorExpr& a) const { out.insert(a.target); }
    void operator()(const BinOp& b) const {
      collect_refs(*b.lhs, out);
      collect_refs(*b.rhs, out);
    }
  };
  std::visit(Walk{out}, e.node);
}

// Which property of the declaring object a specifier determines, plus every
// object referenced in its expressions.
struct SpecifierInfo {
  std::string property;
  std::set<std::string> refs;
};

SpecifierInfo specifier_info(const Specifier& s) {
  SpecifierInfo info;
  const auto grab_refs = [&info](const ExprPtr& e) {
    if (e) collect_refs(*e, info.refs);
  };
  struct Visit {
    SpecifierInfo& info;
    const decltype(grab_refs)& grab;
    void operator()(const SpecWith& w) const {
      info.property = w.property;
      grab(w.value);
    }
    void operator()(const SpecAt& a) const {
      info.property = "position";
      grab(a.where);
      grab(a.relative_to);
    }
    void operator()(const SpecBeyond& b) const {
      info.property = "position";
      grab(b.target);
      grab(b.by);
      grab(b.from);
    }
    void operator()(const SpecIn& i) const {
      info.property = "position";
      for (const auto& a : i.region.args) grab(a);
    }
    void operator()(const SpecDirectional& d) const {
      info.property = "position";
      grab(d.of);
    }
    void operator()(const SpecOn& o) const {
      info.property = "position";
      grab(o.target);
      if (o.region) {
        for (const auto& a : o.region->args) grab(a);
      }
    }
    void operator()(const SpecAlignedWith& a) const {
      info.property = "position";
      grab(a.target);
    }
    void operator()(const SpecFacing& f) const {
      info.property = "orientation";
      grab(f.direction);
    }
    void operator()(const SpecFacingToward& f) const {
      info.property = "orientation";
      grab(f.target);
    }
  };
  std::visit(Visit{info, grab_refs}, s.node);
  return info;
}

bool has_facing_toward(const ObjectDecl& decl) {
  for (const auto& s : decl.specifiers) {
    if (std::holds_alternative<SpecFacingToward>(s.node)) return true;
  }
  return false;
}

}  // namespace

ResolvedScene build_dependency_order(const SpecAST& spec) {
  ResolvedScene out;
  std::map<std::pair<std::string, std::string>, size_t> index;

  for (size_t d = 0; d < spec.declarations.size(); ++d) {
    const ObjectDecl& decl = spec.declarations[d];
    for (const std::string& prop : object_properties(spec, decl)) {
      index[{decl.name, prop}] = out.graph.nodes.size();
      out.graph.nodes.push_back(
          PropertyNode{static_cast<int>(d), decl.name, prop});
    }
  }

  std::set<std::pair<size_t, size_t>> edges;
  const auto add_edge = [&](const std::string& from_obj,
                            const std::string& from_prop,
                            const std::string& to_obj,
                            const std::string& to_prop) {
    const auto from = index.find({from_obj, from_prop});
    const auto to = index.find({to_obj, to_prop});
    if (from == index.end() || to == index.end()) return;
    if (from->second == to->second) return;
    edges.insert({from->second, to->second});
  };

  static const char* kPoseProps[] = {"position", "orientation", "width",
                                     "length", "height"};

  for (const ObjectDecl& decl : spec.declarations) {
    for (const Specifier& s : decl.specifiers) {
      const SpecifierInfo info = specifier_info(s);
      for (const std::string& ref : info.refs) {
        // Using another object means knowing its full placed box.
        for (const char* q : kPoseProps) {
          add_edge(ref, q, decl.name, info.property);
        }
      }
    }
    // Placing an object requires its own extents (surface lift, footprint).
    for (const char* q : {"width", "length", "height"}) {
      add_edge(decl.name, q, decl.name, "position");
    }
    if (has_facing_toward(decl)) {
      // The derived rotation aims from the sampled position at the target.
      add_edge(decl.name, "position", decl.name, "orientation");
    } else {
      // A settled orientation feeds footprint construction for placement.
      add_edge(decl.name, "orientation", decl.name, "position");
    }
  }
  out.graph.edges.assign(edges.begin(), edges.end());

  // Kahn's algorithm with a deterministic ready queue.
  const size_t n = out.graph.nodes.size();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<size_t>> succ(n);
  for (const auto& [from, to] : out.graph.edges) {
    ++indegree[to];
    succ[from].push_back(to);
  }
  const auto rank = [&](size_t i) {
    return std::make_pair(out.graph.nodes[i].decl_index,
                          out.graph.nodes[i].property);
  };
  std::set<std::pair<std::pair<int, std::string>, size_t>> ready;
  for (size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert({rank(i), i});
  }
  while (!ready.empty()) {
    const size_t i = ready.begin()->second;
    ready.erase(ready.begin());
    out.order.push_back(out.graph.nodes[i]);
    for (const size_t j : succ[i]) {
      if (--indegree[j] == 0) ready.insert({rank(j), j});
    }
  }

  if (out.order.size() != n) {
    // Trim pure downstream nodes so the message names the cycle itself.
    std::vector<bool> left(n, false);
    size_t remaining = 0;
    for (size_t i = 0; i < n; ++i) {
      left[i] = indegree[i] > 0;
      if (left[i]) ++remaining;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < n; ++i) {
        if (!left[i]) continue;
        bool feeds_cycle = false;
        for (const size_t j : succ[i]) {
          if (left[j]) feeds_cycle = true;
        }
        if (!feeds_cycle) {
          left[i] = false;
          --remaining;
          changed = true;
        }
      }
    }
    std::string msg = "cyclic dependency between:";
    for (size_t i = 0; i < n; ++i) {
      if (left[i]) {
        msg += " " + out.graph.nodes[i].object + "." +
               out.graph.nodes[i].property;
      }
    }
    fail(ErrorCode::CyclicDependency, msg);
  }
  return out;
}

// ----- position resolution ----------------------------------------------------

namespace {

struct Contribution {
  enum Kind { Point, Box, Rows3D, Carrier } kind = Point;
  Vec3 point;
  Vec3 box_lo, box_hi;
  unsigned box_mask = 0;  // set bits are ranged components
  std::optional<HSI> rows;
  std::optional<EmbeddedHSI> carrier;
  std::string source;
  int line = 0, col = 0;

  bool contains(const Vec3& p, double tol) const {
    switch (kind) {
      case Point:
        return (p - point).norm() <= tol;
      case Box:
        return p.x >= box_lo.x - tol && p.x <= box_hi.x + tol &&
               p.y >= box_lo.y - tol && p.y <= box_hi.y + tol &&
               p.z >= box_lo.z - tol && p.z <= box_hi.z + tol;
      case Rows3D:
        return rows->contains(to_eigen(p), tol);
      case Carrier:
        return carrier->contains_world(p, tol);
    }
    return false;
  }
};

std::string describe(const Specifier& s) {
  return "'" + to_text(s) + "' (line " + std::to_string(s.line) + ")";
}

Vec3 axis_of(Direction dir, const Rotation& r) {
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

Region region_from_desc(const RegionDesc& desc, const Context& ctx) {
  const auto arg_vec = [&](size_t i) -> Vec3 {
    const EvalValue v = eval_expr(*desc.args[i], ctx);
    if (const auto* p = std::get_if<Vec3>(&v)) return *p;
    if (std::holds_alternative<ObjectRef>(v)) {
      return position_of(v, ctx, desc.line, desc.col);
    }
    fail(ErrorCode::TypeMismatch, "region arguments must be vectors",
         desc.args[i]->line, desc.args[i]->col);
  };
  switch (desc.kind) {
    case RegionKind::Cuboid: {
      const Vec3 o = arg_vec(0), rpy = arg_vec(1), dims = arg_vec(2);
      return RegionCuboid{o, Rotation::from_rpy(rpy.x, rpy.y, rpy.z), dims};
    }
    case RegionKind::Rect3D: {
      const Vec3 o = arg_vec(0), rpy = arg_vec(1), dims = arg_vec(2);
      return RegionRect3D{o, Rotation::from_rpy(rpy.x, rpy.y, rpy.z), dims.x,
                          dims.y};
    }
    case RegionKind::Halfspace:
      return RegionHalfspace{arg_vec(0), arg_vec(1)};
    case RegionKind::All:
      return RegionAll{};
    case RegionKind::Empty:
      return RegionEmpty{};
  }
  return RegionAll{};
}

// Half-extents of the placed object's footprint in the carrier plane. When
// its final yaw is not yet known, a circumscribed square covers every spin.
HSI footprint_hsi(const ObjectState& self, bool orientation_known,
                  const PlaneFrame& frame) {
  const double hw = self.dims.x * 0.5, hl = self.dims.y * 0.5;
  HsiBuilder b(2);
  bool upright = false;
  if (orientation_known) {
    upright = std::abs(self.orientation.up().dot(frame.normal)) > 1.0 - 1e-6;
  }
  if (upright) {
    const Vec3 r = self.orientation.right(), f = self.orientation.forward();
    const Eigen::Vector2d r2{r.dot(frame.tangent_u), r.dot(frame.tangent_v)};
    const Eigen::Vector2d f2{f.dot(frame.tangent_u), f.dot(frame.tangent_v)};
    b.add(r2, hw);
    b.add(-r2, hw);
    b.add(f2, hl);
    b.add(-f2, hl);
  } else {
    const double s = std::hypot(hw, hl);
    b.add_box(Eigen::Vector2d{-s, -s}, Eigen::Vector2d{s, s});
  }
  return b.build();
}

// Re-expresses 2D rows written in `src`'s tangent coordinates in `dst`'s.
void append_coplanar_rows(const EmbeddedHSI& src, const PlaneFrame& dst,
                          HsiBuilder& out) {
  const Vec3 shift = dst.origin - src.frame.origin;
  const double uu = dst.tangent_u.dot(src.frame.tangent_u);
  const double uv = dst.tangent_u.dot(src.frame.tangent_v);
  const double vu = dst.tangent_v.dot(src.frame.tangent_u);
  const double vv = dst.tangent_v.dot(src.frame.tangent_v);
  const double cu = shift.dot(src.frame.tangent_u);
  const double cv = shift.dot(src.frame.tangent_v);
  for (int i = 0; i < src.hsi.rows(); ++i) {
    const double ax = src.hsi.A()(i, 0), ay = src.hsi.A()(i, 1);
    Eigen::Vector2d a;
    a << ax * uu + ay * uv, ax * vu + ay * vv;
    out.add(a, src.hsi.b()(i) - (ax * cu + ay * cv));
  }
}

struct PositionResolver {
  const SpecAST& spec;
  const ObjectDecl& decl;
  const Context& ctx;
  const AABB& workspace;

  const ObjectState& self() const {
    return require_object(ctx, decl.name, decl.line, decl.col);
  }

  [[noreturn]] void empty_error(const std::vector<std::string>& sources,
                                int line, int col) const {
    std::string msg = "combined position region for '" + decl.name +
                      "' is empty; contributing specifiers: ";
    for (size_t i = 0; i < sources.size(); ++i) {
      if (i) msg += ", ";
      msg += sources[i];
    }
    fail(ErrorCode::EmptyCombinedRegion, msg, line, col);
  }

  void require_nonempty(const HSI& h, const std::vector<std::string>& sources,
                        int line, int col) const {
    try {
      if (chebyshev_center(h).radius > 1e-12) return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyRegion) throw;
    }
    empty_error(sources, line, col);
  }

  Contribution from_value(const EvalValue& v, const Specifier& s) const {
    Contribution c;
    c.source = describe(s);
    c.line = s.line;
    c.col = s.col;
    if (const auto* p = std::get_if<Vec3>(&v)) {
      c.kind = Contribution::Point;
      c.point = *p;
      return c;
    }
    if (const auto* r = std::get_if<RangedVec3>(&v)) {
      c.kind = Contribution::Box;
      c.box_lo = r->lo;
      c.box_hi = r->hi;
      c.box_mask = r->mask;
      return c;
    }
    if (std::holds_alternative<ObjectRef>(v)) {
      c.kind = Contribution::Point;
      c.point = position_of(v, ctx, s.line, s.col);
      return c;
    }
    fail(ErrorCode::TypeMismatch,
         "position must be a vector, got " + eval_value_to_text(v), s.line,
         s.col);
  }

  Contribution make_at(const SpecAt& at, const Specifier& s) const {
    EvalValue v = eval_expr(*at.where, ctx);
    if (at.relative_to) {
      EvalValue rel = eval_expr(*at.relative_to, ctx);
      if (std::holds_alternative<ObjectRef>(rel)) {
        rel = position_of(rel, ctx, s.line, s.col);
      }
      v = add_values(v, rel, '+', s.line, s.col, ctx);
    }
    return from_value(v, s);
  }

  Contribution make_beyond(const SpecBeyond& b, const Specifier& s) const {
    const Vec3 x = position_of(eval_expr(*b.target, ctx), ctx, s.line, s.col);
    const Vec3 y = position_of(eval_expr(*b.from, ctx), ctx, s.line, s.col);
    const Vec3 dir = x - y;
    if (dir.norm() <= 1e-12) {
      fail(ErrorCode::ZeroVector,
           "'beyond' target and reference positions coincide", s.line, s.col);
    }
    const EvalValue by = eval_expr(*b.by, ctx);
    Contribution c;
    c.source = describe(s);
    c.line = s.line;
    c.col = s.col;
    c.kind = Contribution::Point;
    if (const auto* d = std::get_if<double>(&by)) {
      c.point = x + dir.normalized() * (*d);
    } else if (const auto* off = std::get_if<Vec3>(&by)) {
      const Rotation frame = rotation_from_forward(dir, {0, 0, 1});
      c.point = x + frame * (*off);
    } else {
      fail(ErrorCode::TypeMismatch,
           "'beyond ... by' takes a number or a vector, got " +
               eval_value_to_text(by),
           s.line, s.col);
    }
    return c;
  }

  Contribution make_in(const SpecIn& in, const Specifier& s) const {
    const Region region = region_from_desc(in.region, ctx);
    const RegionSet set = region_to_hsi(region, workspace);
    Contribution c;
    c.source = describe(s);
    c.line = s.line;
    c.col = s.col;
    if (const auto* h = std::get_if<HSI>(&set)) {
      c.kind = Contribution::Rows3D;
      c.rows = *h;
    } else {
      c.kind = Contribution::Carrier;
      c.carrier = std::get<EmbeddedHSI>(set);
    }
    return c;
  }

  Contribution make_directional(const SpecDirectional& d,
                                const Specifier& s) const {
    const EvalValue v = eval_expr(*d.of, ctx);
    Vec3 origin;
    Rotation axes;
    if (const auto* r = std::get_if<ObjectRef>(&v)) {
      const ObjectState& st = require_object(ctx, r->name, s.line, s.col);
      origin = st.position;
      axes = st.orientation;
    } else if (const auto* p = std::get_if<Vec3>(&v)) {
      origin = *p;
    } else {
      fail(ErrorCode::TypeMismatch,
           "directional reference must be an object or point", s.line, s.col);
    }
    const Vec3 n = axis_of(d.dir, axes);
    HsiBuilder b(3);
    b.add(to_eigen(n * -1.0), -n.dot(origin));
    Contribution c;
    c.kind = Contribution::Rows3D;
    c.rows = b.build();
    c.source = describe(s);
    c.line = s.line;
    c.col = s.col;
    return c;
  }

  Contribution make_on(const SpecOn& on, const Specifier& s) const {
    const double own_height = self().dims.z;
    Contribution c;
    c.source = describe(s);
    c.line = s.line;
    c.col = s.col;

    PlaneFrame frame;
    double half_u = 0, half_v = 0;
    if (on.region) {
      const Region region = region_from_desc(*on.region, ctx);
      const auto* rect = std::get_if<RegionRect3D>(&region);
      if (!rect) {
        fail(ErrorCode::TypeMismatch,
             "'on' takes an object, a point, or a Rect3D region", s.line,
             s.col);
      }
      frame = PlaneFrame::from_rotation(rect->origin, rect->orientation);
      half_u = rect->width * 0.5;
      half_v = rect->length * 0.5;
    } else {
      const EvalValue v = eval_expr(*on.target, ctx);
      if (const auto* p = std::get_if<Vec3>(&v)) {
        // Resting on a point: exact contact along the world vertical.
        c.kind = Contribution::Point;
        c.point = *p + Vec3{0, 0, own_height * 0.5};
        return c;
      }
      const auto* r = std::get_if<ObjectRef>(&v);
      if (!r) {
        fail(ErrorCode::TypeMismatch,
             "'on' takes an object, a point, or a Rect3D region", s.line,
             s.col);
      }
      const ObjectState& st = require_object(ctx, r->name, s.line, s.col);
      const OBB box = st.obb();
      const Vec3 top = box.center + box.rotation.up() * box.half_extents.z;
      frame = PlaneFrame::from_rotation(top, box.rotation);
      half_u = box.half_extents.x;
      half_v = box.half_extents.y;
    }
    // Lift the carrier so the sampled center puts the base in contact.
    frame.origin = frame.origin + frame.normal * (own_height * 0.5);

    HsiBuilder b(2);
    b.add_box(Eigen::Vector2d{-half_u, -half_v},
              Eigen::Vector2d{half_u, half_v});
    HSI rect = b.build();
    if (on.completely) {
      rect = erode(rect, footprint_hsi(self(), self().has_orientation, frame));
    }
    c.kind = Contribution::Carrier;
    c.carrier = EmbeddedHSI{std::move(rect), frame};
    return c;
  }

  Contribution make_aligned(const SpecAlignedWith& a, const Specifier& s) const {
    const Vec3 target = position_of(eval_expr(*a.target, ctx), ctx, s.line, s.col);
    Vec3 normal{0, 0, 0}, origin{0, 0, 0};
    if (a.axis == Axis::X) {
      normal = {1, 0, 0};
      origin = {target.x, 0, 0};
    } else if (a.axis == Axis::Y) {
      normal = {0, 1, 0};
      origin = {0, target.y, 0};
    } else {
      normal = {0, 0, 1};
      origin = {0, 0, target.z};
    }
    Contribution c;
    c.kind = Contribution::Carrier;
    c.carrier = EmbeddedHSI{HsiBuilder(2).build(), // clipped to the workspace later
                            PlaneFrame::from_normal(origin, normal)};
    c.source = describe(s);
    c.line = s.line;
    c.col = s.col;
    return c;
  }

  std::vector<Contribution> gather() const {
    std::vector<Contribution> out;
    for (const Specifier& s : decl.specifiers) {
      if (const auto* w = std::get_if<SpecWith>(&s.node)) {
        if (w->property == "position") {
          out.push_back(from_value(eval_expr(*w->value, ctx), s));
        }
      } else if (const auto* at = std::get_if<SpecAt>(&s.node)) {
        out.push_back(make_at(*at, s));
      } else if (const auto* b = std::get_if<SpecBeyond>(&s.node)) {
        out.push_back(make_beyond(*b, s));
      } else if (const auto* in = std::get_if<SpecIn>(&s.node)) {
        out.push_back(make_in(*in, s));
      } else if (const auto* d = std::get_if<SpecDirectional>(&s.node)) {
        out.push_back(make_directional(*d, s));
      } else if (const auto* on = std::get_if<SpecOn>(&s.node)) {
        out.push_back(make_on(*on, s));
      } else if (const auto* al = std::get_if<SpecAlignedWith>(&s.node)) {
        out.push_back(make_aligned(*al, s));
      }
    }
    return out;
  }

  PropertyDist single(const Contribution& c) const {
    switch (c.kind) {
      case Contribution::Point:
        return ConstantValue{c.point};
      case Contribution::Box:
        if (c.box_mask == 0) return ConstantValue{c.box_lo};
        return ComponentUniform{c.box_lo, c.box_hi, c.box_mask};
      case Contribution::Rows3D: {
        HsiBuilder b(3);
        b.append(*c.rows);
        b.append(workspace_hsi(workspace));
        HSI h = b.build();
        require_nonempty(h, {c.source}, c.line, c.col);
        return RegionUniform{RegionSet{std::move(h)}};
      }
      case Contribution::Carrier: {
        HsiBuilder b(2);
        b.append(c.carrier->hsi);
        if (!append_projected(workspace_hsi(workspace), c.carrier->frame, b)) {
          empty_error({c.source + ", workspace bounds"}, c.line, c.col);
        }
        HSI h = b.build();
        require_nonempty(h, {c.source}, c.line, c.col);
        return RegionUniform{RegionSet{EmbeddedHSI{std::move(h), c.carrier->frame}}};
      }
    }
    fail(ErrorCode::EmptyCombinedRegion, "unreachable", c.line, c.col);
  }

  PropertyDist combine(const std::vector<Contribution>& contribs) const {
    std::vector<std::string> sources;
    for (const auto& c : contribs) sources.push_back(c.source);
    const int line = contribs.front().line, col = contribs.front().col;

    // A constant pins the position; everything else becomes a check.
    for (const auto& c : contribs) {
      if (c.kind != Contribution::Point) continue;
      for (const auto& other : contribs) {
        if (&other == &c) continue;
        if (!other.contains(c.point, 1e-9)) {
          fail(ErrorCode::ConstantViolatesConstraint,
               "constant position " + fmt_vec(c.point) + " from " + c.source +
                   " violates " + other.source,
               other.line, other.col);
        }
      }
      return ConstantValue{c.point};
    }

    // Choose the carrier plane: an explicit 2D carrier, or a plane
    // synthesized from a box whose components pin exactly one axis.
    const Contribution* carrier = nullptr;
    for (const auto& c : contribs) {
      if (c.kind == Contribution::Carrier) {
        carrier = &c;
        break;
      }
    }
    std::optional<PlaneFrame> frame;
    if (carrier) {
      frame = carrier->carrier->frame;
    } else {
      for (const auto& c : contribs) {
        if (c.kind != Contribution::Box) continue;
        unsigned fixed = ~c.box_mask & 7u;
        if (fixed == 1u || fixed == 2u || fixed == 4u) {
          const int axis = fixed == 1u ? 0 : fixed == 2u ? 1 : 2;
          Vec3 normal{0, 0, 0}, origin{0, 0, 0};
          (&normal.x)[axis] = 1.0;
          (&origin.x)[axis] = (&c.box_lo.x)[axis];
          frame = PlaneFrame::from_normal(origin, normal);
          break;
        }
      }
    }

    if (frame) {
      HsiBuilder b(2);
      for (const auto& c : contribs) {
        switch (c.kind) {
          case Contribution::Carrier:
            if (!c.carrier->frame.coplanar_with(*frame, 1e-9)) {
              fail(ErrorCode::IncompatibleCarriers,
                   "carrier planes for '" + decl.name +
                       "' are not coplanar: " + sources.front() + " vs " +
                       c.source,
                   c.line, c.col);
            }
            append_coplanar_rows(*c.carrier, *frame, b);
            break;
          case Contribution::Box: {
            HsiBuilder box3(3);
            box3.add_box(to_eigen(c.box_lo), to_eigen(c.box_hi));
            if (!append_projected(box3.build(), *frame, b)) {
              empty_error(sources, c.line, c.col);
            }
            break;
          }
          case Contribution::Rows3D:
            if (!append_projected(*c.rows, *frame, b)) {
              empty_error(sources, c.line, c.col);
            }
            break;
          case Contribution::Point:
            break;  // handled above
        }
      }
      if (!append_projected(workspace_hsi(workspace), *frame, b)) {
        empty_error(sources, line, col);
      }
      HSI h = b.build();
      require_nonempty(h, sources, line, col);
      return RegionUniform{RegionSet{EmbeddedHSI{std::move(h), *frame}}};
    }

    // Fully three-dimensional combination.
    HsiBuilder b(3);
    for (const auto& c : contribs) {
      if (c.kind == Contribution::Box) {
        b.add_box(to_eigen(c.box_lo), to_eigen(c.box_hi));
      } else if (c.kind == Contribution::Rows3D) {
        b.append(*c.rows);
      }
    }
    b.append(workspace_hsi(workspace));
    HSI h = b.build();
    require_nonempty(h, sources, line, col);
    return RegionUniform{RegionSet{std::move(h)}};
  }

  PropertyDist resolve() const {
    const std::vector<Contribution> contribs = gather();
    if (contribs.empty()) {
      // Fall back to the class default (a literal, possibly ranged).
      const ModelClass* cls = spec.find_class(decl.class_name);
      const ExprPtr* def = cls ? cls->find_default("position") : nullptr;
      if (!def) return ConstantValue{Vec3{0, 0, 0}};
      const EvalValue v = eval_expr(**def, ctx);
      if (const auto* p = std::get_if<Vec3>(&v)) return ConstantValue{*p};
      if (const auto* r = std::get_if<RangedVec3>(&v)) {
        return ComponentUniform{r->lo, r->hi, r->mask};
      }
      fail(ErrorCode::TypeMismatch, "default position must be a vector",
           decl.line, decl.col);
    }
    if (contribs.size() == 1) return single(contribs.front());
    return combine(contribs);
  }
};

PropertyDist resolve_orientation(const SpecAST& spec, const ObjectDecl& decl,
                                 const Context& ctx) {
  for (const Specifier& s : decl.specifiers) {
    if (const auto* f = std::get_if<SpecFacing>(&s.node)) {
      const EvalValue v = eval_expr(*f->direction, ctx);
      const auto* dir = std::get_if<Vec3>(&v);
      if (!dir) {
        fail(ErrorCode::TypeMismatch, "'facing' takes a direction vector",
             s.line, s.col);
      }
      return ConstantRotation{rotation_from_forward(*dir, {0, 0, 1})};
    }
    if (const auto* ft = std::get_if<SpecFacingToward>(&s.node)) {
      return DerivedFacingToward{ft->target};
    }
    if (const auto* w = std::get_if<SpecWith>(&s.node)) {
      if (w->property != "orientation") continue;
      const EvalValue v = eval_expr(*w->value, ctx);
      if (const auto* rpy = std::get_if<Vec3>(&v)) {
        return ConstantRotation{Rotation::from_rpy(rpy->x, rpy->y, rpy->z)};
      }
      if (const auto* r = std::get_if<RangedVec3>(&v)) {
        return ComponentUniform{r->lo, r->hi, r->mask};
      }
      fail(ErrorCode::TypeMismatch,
           "orientation must be a roll/pitch/yaw vector", s.line, s.col);
    }
  }
  const ModelClass* cls = spec.find_class(decl.class_name);
  const ExprPtr* def = cls ? cls->find_default("orientation") : nullptr;
  if (def) {
    const EvalValue v = eval_expr(**def, ctx);
    if (const auto* rpy = std::get_if<Vec3>(&v)) {
      return ConstantRotation{Rotation::from_rpy(rpy->x, rpy->y, rpy->z)};
    }
    if (const auto* r = std::get_if<RangedVec3>(&v)) {
      return ComponentUniform{r->lo, r->hi, r->mask};
    }
  }
  return ConstantRotation{Rotation()};
}

PropertyDist resolve_custom(const SpecAST& spec, const ObjectDecl& decl,
                            const std::string& property, const Context& ctx) {
  const ExprPtr* source = nullptr;
  int line = decl.line, col = decl.col;
  // The last with-assignment wins; otherwise the class default applies.
  for (const Specifier& s : decl.specifiers) {
    if (const auto* w = std::get_if<SpecWith>(&s.node)) {
      if (w->property == property) {
        source = &w->value;
        line = s.line;
        col = s.col;
      }
    }
  }
  if (!source) {
    const ModelClass* cls = spec.find_class(decl.class_name);
    if (cls) source = cls->find_default(property);
  }
  if (!source) {
    fail(ErrorCode::TypeMismatch,
         "object '" + decl.name + "' has no property '" + property + "'", line,
         col);
  }
  const EvalValue v = eval_expr(**source, ctx);
  if (const auto* r = std::get_if<ScalarRange>(&v)) {
    return ScalarUniform{r->lo, r->hi};
  }
  if (const auto* rv = std::get_if<RangedVec3>(&v)) {
    return ComponentUniform{rv->lo, rv->hi, rv->mask};
  }
  if (std::holds_alternative<ObjectRef>(v)) {
    return ConstantValue{position_of(v, ctx, line, col)};
  }
  return ConstantValue{v};
}

}  // namespace

PropertyDist resolve_property(const SpecAST& spec, const ObjectDecl& decl,
                              const std::string& property, const Context& ctx,
                              const AABB& workspace) {
  if (property == "position") {
    return PositionResolver{spec, decl, ctx, workspace}.resolve();
  }
  if (property == "orientation") {
    return resolve_orientation(spec, decl, ctx);
  }
  return resolve_custom(spec, decl, property, ctx);
}

}  // namespace prs
