#include "prs/ast.hpp"

#include <cstdio>

namespace prs {

ExprPtr make_expr(ExprNode node, int line, int col) {
  return std::make_shared<const Expr>(Expr{std::move(node), line, col});
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Ahead: return "ahead";
    case Direction::Behind: return "behind";
    case Direction::Above: return "above";
    case Direction::Below: return "below";
  }
  return "?";
}

const ExprPtr* ModelClass::find_default(const std::string& property) const {
  for (const auto& [name, value] : defaults) {
    if (name == property) return &value;
  }
  return nullptr;
}

const ModelClass* SpecAST::find_class(const std::string& name) const {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const ObjectDecl* SpecAST::find_declaration(const std::string& name) const {
  for (const auto& d : declarations) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

uint64_t fnv1a(std::string_view bytes, uint64_t seed) {
  uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* region_kind_name(RegionKind k) {
  switch (k) {
    case RegionKind::Cuboid: return "Cuboid";
    case RegionKind::Rect3D: return "Rect3D";
    case RegionKind::Halfspace: return "Halfspace";
    case RegionKind::All: return "All";
    case RegionKind::Empty: return "Empty";
  }
  return "?";
}

std::string region_to_text(const RegionDesc& r) {
  std::string out = region_kind_name(r.kind);
  if (!r.args.empty()) {
    out += "(";
    for (size_t i = 0; i < r.args.size(); ++i) {
      if (i) out += ", ";
      out += to_text(*r.args[i]);
    }
    out += ")";
  }
  return out;
}

}  // namespace

std::string to_text(const Expr& e) {
  struct Printer {
    std::string operator()(const NumLit& n) const { return fmt_number(n.value); }
    std::string operator()(const StringLit& s) const {
      return "\"" + s.value + "\"";
    }
    std::string operator()(const RangeLit& r) const {
      return "(" + fmt_number(r.lo) + ", " + fmt_number(r.hi) + ")";
    }
    std::string operator()(const VarRef& v) const { return v.name; }
    std::string operator()(const Vec3Lit& v) const {
      return "V3D(" + to_text(*v.x) + ", " + to_text(*v.y) + ", " +
             to_text(*v.z) + ")";
    }
    std::string operator()(const AnchorExpr& a) const {
      std::string out = "(";
      static constexpr std::pair<unsigned, const char*> kOrder[] = {
          {kFaceTop, "top"},   {kFaceBottom, "bottom"}, {kFaceFront, "front"},
          {kFaceBack, "back"}, {kFaceLeft, "left"},     {kFaceRight, "right"}};
      for (const auto& [bit, name] : kOrder) {
        if (a.faces & bit) {
          out += name;
          out += " ";
        }
      }
      return out + a.target + ")";
    }
    std::string operator()(const BinOp& b) const {
      return to_text(*b.lhs) + " " + b.op + " " + to_text(*b.rhs);
    }
  };
  return std::visit(Printer{}, e.node);
}

std::string to_text(const Specifier& s) {
  struct Printer {
    std::string operator()(const SpecWith& w) const {
      return "with " + w.property + " " + to_text(*w.value);
    }
    std::string operator()(const SpecAt& a) const {
      std::string out = "at " + to_text(*a.where);
      if (a.relative_to) out += " relative to " + to_text(*a.relative_to);
      return out;
    }
    std::string operator()(const SpecBeyond& b) const {
      return "beyond " + to_text(*b.target) + " by " + to_text(*b.by) +
             " from " + to_text(*b.from);
    }
    std::string operator()(const SpecIn& i) const {
      return "in " + region_to_text(i.region);
    }
    std::string operator()(const SpecDirectional& d) const {
      return std::string(direction_name(d.dir)) + " of " + to_text(*d.of);
    }
    std::string operator()(const SpecOn& o) const {
      std::string out = o.completely ? "completely on " : "on ";
      return out + (o.region ? region_to_text(*o.region) : to_text(*o.target));
    }
    std::string operator()(const SpecAlignedWith& a) const {
      const char axis = a.axis == Axis::X ? 'x' : a.axis == Axis::Y ? 'y' : 'z';
      return "aligned with " + to_text(*a.target) + " along " + axis;
    }
    std::string operator()(const SpecFacing& f) const {
      return "facing " + to_text(*f.direction);
    }
    std::string operator()(const SpecFacingToward& f) const {
      return "facing towards " + to_text(*f.target);
    }
  };
  return std::visit(Printer{}, s.node);
}

std::string to_text(const ObjectDecl& d) {
  std::string out;
  if (d.bound) out += d.name + " = ";
  out += d.class_name;
  for (size_t i = 0; i < d.specifiers.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += to_text(d.specifiers[i]);
  }
  return out;
}

std::string spec_to_text(const SpecAST& ast) {
  std::string out;
  for (const auto& d : ast.declarations) {
    out += to_text(d);
    out += "\n";
  }
  return out;
}

std::string models_to_text(const std::vector<ModelClass>& classes) {
  std::string out;
  for (const auto& c : classes) {
    out += "class " + c.name + ":\n";
    for (const auto& [name, value] : c.defaults) {
      out += "  " + name + ": " + to_text(*value) + "\n";
    }
  }
  return out;
}

}  // namespace prs
