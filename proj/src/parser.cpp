#include "prs/parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "prs/error.hpp"
#include "prs/lexer.hpp"

namespace prs {

namespace {

bool is_face_keyword(const Token& t, unsigned* bit = nullptr) {
  if (t.kind != TokenKind::Keyword) return false;
  unsigned b = 0;
  if (t.text == "top") b = kFaceTop;
  else if (t.text == "bottom") b = kFaceBottom;
  else if (t.text == "front") b = kFaceFront;
  else if (t.text == "back") b = kFaceBack;
  else if (t.text == "left") b = kFaceLeft;
  else if (t.text == "right") b = kFaceRight;
  if (b && bit) *bit = b;
  return b != 0;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  const Token& peek(size_t ahead = 0) const {
    const size_t j = std::min(i_ + ahead, toks_.size() - 1);
    return toks_[j];
  }
  const Token& take() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_kw(std::string_view s) const {
    return peek().kind == TokenKind::Keyword && peek().text == s;
  }
  bool eat(TokenKind k) {
    if (!at(k)) return false;
    take();
    return true;
  }
  bool eat_kw(std::string_view s) {
    if (!at_kw(s)) return false;
    take();
    return true;
  }
  const Token& expect(TokenKind k, const std::string& what) {
    if (!at(k)) err("expected " + what + ", got '" + describe(peek()) + "'");
    return take();
  }
  void expect_kw(const std::string& s) {
    if (!eat_kw(s))
      err("expected '" + s + "', got '" + describe(peek()) + "'");
  }
  [[noreturn]] void err(const std::string& msg) const { err(msg, peek()); }
  [[noreturn]] void err(const std::string& msg, const Token& t) const {
    fail(ErrorCode::Parse, msg, t.line, t.col);
  }
  void skip_newlines() {
    while (eat(TokenKind::Newline)) {
    }
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Newline: return "end of line";
      case TokenKind::End: return "end of input";
      default: return t.text;
    }
  }

  // When set, identifier expressions must name an already-declared object.
  const std::set<std::string>* known_vars = nullptr;
  bool literals_only = false;  // model-file mode: no references, no arithmetic

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_primary();
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
      const Token& op = take();
      if (literals_only) err("expected a literal value", op);
      ExprPtr rhs = parse_primary();
      lhs = make_expr(BinOp{op.kind == TokenKind::Plus ? '+' : '-', lhs, rhs},
                      op.line, op.col);
    }
    return lhs;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::Number) {
      take();
      return make_expr(NumLit{t.number}, t.line, t.col);
    }
    if (t.kind == TokenKind::Minus) {
      take();
      const Token& n = expect(TokenKind::Number, "a number after unary '-'");
      return make_expr(NumLit{-n.number}, t.line, t.col);
    }
    if (t.kind == TokenKind::String) {
      take();
      return make_expr(StringLit{t.text}, t.line, t.col);
    }
    if (t.kind == TokenKind::Keyword && t.text == "V3D") {
      take();
      expect(TokenKind::LParen, "'(' after V3D");
      ExprPtr x = parse_expr();
      expect(TokenKind::Comma, "','");
      ExprPtr y = parse_expr();
      expect(TokenKind::Comma, "','");
      ExprPtr z = parse_expr();
      expect(TokenKind::RParen, "')'");
      return make_expr(Vec3Lit{x, y, z}, t.line, t.col);
    }
    if (t.kind == TokenKind::LParen) {
      take();
      unsigned bit = 0;
      if (is_face_keyword(peek(), &bit)) {
        if (literals_only) err("expected a literal value", t);
        unsigned faces = 0;
        while (is_face_keyword(peek(), &bit)) {
          take();
          faces |= bit;
        }
        const Token& target = expect(TokenKind::Ident, "an object name");
        check_var(target);
        expect(TokenKind::RParen, "')'");
        return make_expr(AnchorExpr{faces, target.text}, t.line, t.col);
      }
      ExprPtr first = parse_expr();
      if (eat(TokenKind::Comma)) {
        ExprPtr second = parse_expr();
        expect(TokenKind::RParen, "')'");
        const auto* lo = std::get_if<NumLit>(&first->node);
        const auto* hi = std::get_if<NumLit>(&second->node);
        if (!lo || !hi)
          err("range endpoints must be numeric literals", t);
        if (!(lo->value < hi->value))
          err("range lower bound must be less than upper bound", t);
        return make_expr(RangeLit{lo->value, hi->value}, t.line, t.col);
      }
      expect(TokenKind::RParen, "')'");
      return first;
    }
    if (t.kind == TokenKind::Ident) {
      if (literals_only) err("expected a literal value", t);
      take();
      check_var(t);
      return make_expr(VarRef{t.text}, t.line, t.col);
    }
    err("expected an expression, got '" + describe(t) + "'");
  }

  void check_var(const Token& name) const {
    if (known_vars && !known_vars->count(name.text)) {
      fail(ErrorCode::UnknownVariable, "unknown variable '" + name.text + "'",
           name.line, name.col);
    }
  }

 private:
  std::vector<Token> toks_;
  size_t i_ = 0;
};

bool region_kind_from_name(const std::string& name, RegionKind* out) {
  if (name == "Cuboid") *out = RegionKind::Cuboid;
  else if (name == "Rect3D") *out = RegionKind::Rect3D;
  else if (name == "Halfspace") *out = RegionKind::Halfspace;
  else if (name == "All") *out = RegionKind::All;
  else if (name == "Empty") *out = RegionKind::Empty;
  else return false;
  return true;
}

bool at_region_ctor(Parser& p, RegionKind* kind) {
  if (p.peek().kind != TokenKind::Ident) return false;
  const std::string& name = p.peek().text;
  if (name == "ConvexPolygon3D" || name == "ConvexPolyhedron") return true;
  return region_kind_from_name(name, kind);
}

RegionDesc parse_region_desc(Parser& p) {
  const Token& name = p.take();
  RegionDesc desc;
  desc.line = name.line;
  desc.col = name.col;
  if (name.text == "ConvexPolygon3D" || name.text == "ConvexPolyhedron") {
    p.err("'" + name.text +
              "' takes a half-space matrix and cannot be written in source "
              "text",
          name);
  }
  if (!region_kind_from_name(name.text, &desc.kind)) {
    p.err("unknown region constructor '" + name.text + "'", name);
  }
  if (p.eat(TokenKind::LParen)) {
    if (!p.at(TokenKind::RParen)) {
      desc.args.push_back(p.parse_expr());
      while (p.eat(TokenKind::Comma)) desc.args.push_back(p.parse_expr());
    }
    p.expect(TokenKind::RParen, "')'");
  }
  const auto arity = [&](size_t n, const char* sig) {
    if (desc.args.size() != n) {
      p.err(std::string(name.text) + " expects " + std::to_string(n) +
                " argument(s): " + sig,
            name);
    }
  };
  switch (desc.kind) {
    case RegionKind::Cuboid: arity(3, "(origin, orientation, dims)"); break;
    case RegionKind::Rect3D: arity(3, "(origin, orientation, dims)"); break;
    case RegionKind::Halfspace: arity(2, "(origin, normal)"); break;
    case RegionKind::All: arity(0, "()"); break;
    case RegionKind::Empty: arity(0, "()"); break;
  }
  return desc;
}

Specifier parse_specifier(Parser& p) {
  const Token& t = p.peek();
  Specifier spec;
  spec.line = t.line;
  spec.col = t.col;
  if (t.kind == TokenKind::Ident) {
    RegionKind kind;
    if (region_kind_from_name(t.text, &kind)) {
      p.err("a region constructor must follow 'in'", t);
    }
  }
  if (t.kind != TokenKind::Keyword) {
    p.err("expected a specifier, got '" + Parser::describe(t) + "'");
  }

  if (p.eat_kw("with")) {
    const Token& prop = p.expect(TokenKind::Ident, "a property name");
    spec.node = SpecWith{prop.text, p.parse_expr()};
  } else if (p.eat_kw("at")) {
    SpecAt at;
    at.where = p.parse_expr();
    if (p.eat_kw("relative")) {
      p.expect_kw("to");
      at.relative_to = p.parse_expr();
    }
    spec.node = std::move(at);
  } else if (p.eat_kw("beyond")) {
    SpecBeyond b;
    b.target = p.parse_expr();
    p.expect_kw("by");
    b.by = p.parse_expr();
    p.expect_kw("from");
    b.from = p.parse_expr();
    spec.node = std::move(b);
  } else if (p.eat_kw("in")) {
    RegionKind kind;
    if (!at_region_ctor(p, &kind)) {
      p.err("expected a region constructor after 'in'");
    }
    spec.node = SpecIn{parse_region_desc(p)};
  } else if (p.eat_kw("completely")) {
    p.expect_kw("on");
    SpecOn on;
    on.completely = true;
    RegionKind kind;
    if (at_region_ctor(p, &kind)) on.region = parse_region_desc(p);
    else on.target = p.parse_expr();
    spec.node = std::move(on);
  } else if (p.eat_kw("on")) {
    SpecOn on;
    RegionKind kind;
    if (at_region_ctor(p, &kind)) on.region = parse_region_desc(p);
    else on.target = p.parse_expr();
    spec.node = std::move(on);
  } else if (p.at_kw("ahead") || p.at_kw("left") || p.at_kw("right") ||
             p.at_kw("behind") || p.at_kw("above") || p.at_kw("below")) {
    const Token& dir_tok = p.take();
    Direction dir = Direction::Ahead;
    if (dir_tok.text == "left") dir = Direction::Left;
    else if (dir_tok.text == "right") dir = Direction::Right;
    else if (dir_tok.text == "behind") dir = Direction::Behind;
    else if (dir_tok.text == "above") dir = Direction::Above;
    else if (dir_tok.text == "below") dir = Direction::Below;
    p.expect_kw("of");
    spec.node = SpecDirectional{dir, p.parse_expr()};
  } else if (p.eat_kw("aligned")) {
    p.expect_kw("with");
    SpecAlignedWith a;
    a.target = p.parse_expr();
    // Both prose spellings are accepted: "along z" and "on z".
    if (!p.eat_kw("along") && !p.eat_kw("on")) {
      p.err("expected 'along' or 'on' and an axis");
    }
    const Token& axis = p.expect(TokenKind::Ident, "an axis (x, y, or z)");
    if (axis.text == "x") a.axis = Axis::X;
    else if (axis.text == "y") a.axis = Axis::Y;
    else if (axis.text == "z") a.axis = Axis::Z;
    else p.err("expected an axis (x, y, or z)", axis);
    spec.node = std::move(a);
  } else if (p.eat_kw("facing")) {
    if (p.eat_kw("toward") || p.eat_kw("towards")) {
      spec.node = SpecFacingToward{p.parse_expr()};
    } else {
      spec.node = SpecFacing{p.parse_expr()};
    }
  } else {
    p.err("expected a specifier, got '" + t.text + "'");
  }
  return spec;
}

bool is_literal_expr(const Expr& e) {
  struct Check {
    bool operator()(const NumLit&) const { return true; }
    bool operator()(const StringLit&) const { return true; }
    bool operator()(const RangeLit&) const { return true; }
    bool operator()(const VarRef&) const { return false; }
    bool operator()(const AnchorExpr&) const { return false; }
    bool operator()(const BinOp&) const { return false; }
    bool operator()(const Vec3Lit& v) const {
      const auto comp_ok = [](const Expr& c) {
        return std::holds_alternative<NumLit>(c.node) ||
               std::holds_alternative<RangeLit>(c.node);
      };
      return comp_ok(*v.x) && comp_ok(*v.y) && comp_ok(*v.z);
    }
  };
  return std::visit(Check{}, e.node);
}

int orientation_specifier_count(const ObjectDecl& d) {
  int n = 0;
  for (const auto& s : d.specifiers) {
    if (std::holds_alternative<SpecFacing>(s.node) ||
        std::holds_alternative<SpecFacingToward>(s.node)) {
      ++n;
    } else if (const auto* w = std::get_if<SpecWith>(&s.node)) {
      if (w->property == "orientation") ++n;
    }
  }
  return n;
}

}  // namespace

std::vector<ModelClass> parse_model(std::string_view text) {
  Parser p(text);
  p.literals_only = true;
  std::vector<ModelClass> classes;

  p.skip_newlines();
  while (!p.at(TokenKind::End)) {
    const Token& kw = p.peek();
    if (!p.eat_kw("class")) {
      p.err("expected 'class', got '" + Parser::describe(kw) + "'");
    }
    const Token& name = p.expect(TokenKind::Ident, "a class name");
    for (const auto& existing : classes) {
      if (existing.name == name.text) {
        fail(ErrorCode::DuplicateClass,
             "class '" + name.text + "' is already defined", name.line,
             name.col);
      }
    }
    ModelClass cls;
    cls.name = name.text;
    cls.line = name.line;
    cls.col = name.col;
    p.expect(TokenKind::Colon, "':'");
    p.expect(TokenKind::Newline, "end of line");
    p.skip_newlines();

    while (p.at(TokenKind::Ident)) {
      const Token& prop = p.take();
      if (cls.find_default(prop.text)) {
        fail(ErrorCode::DuplicateProperty,
             "property '" + prop.text + "' is already set on class '" +
                 cls.name + "'",
             prop.line, prop.col);
      }
      p.expect(TokenKind::Colon, "':'");
      ExprPtr value = p.parse_expr();
      if (!is_literal_expr(*value)) {
        fail(ErrorCode::Parse, "model defaults must be literal values",
             value->line, value->col);
      }
      cls.defaults.emplace_back(prop.text, std::move(value));
      if (!p.at(TokenKind::End)) p.expect(TokenKind::Newline, "end of line");
      p.skip_newlines();
    }

    if (!cls.find_default("position")) {
      cls.defaults.emplace_back(
          "position", make_expr(Vec3Lit{make_expr(NumLit{0}), make_expr(NumLit{0}),
                                        make_expr(NumLit{0})}));
    }
    if (!cls.find_default("orientation")) {
      // Roll/pitch/yaw zeros: the identity orientation.
      cls.defaults.emplace_back(
          "orientation", make_expr(Vec3Lit{make_expr(NumLit{0}),
                                           make_expr(NumLit{0}),
                                           make_expr(NumLit{0})}));
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

SpecAST parse_spec(std::string_view text, std::vector<ModelClass> models,
                   uint64_t hash_seed) {
  SpecAST ast;
  ast.content_hash = fnv1a(text, hash_seed);
  ast.classes = std::move(models);

  Parser p(text);
  std::set<std::string> bound;
  p.known_vars = &bound;

  p.skip_newlines();
  size_t decl_index = 0;
  while (!p.at(TokenKind::End)) {
    const Token& first = p.expect(TokenKind::Ident, "a declaration");
    ObjectDecl decl;
    decl.line = first.line;
    decl.col = first.col;

    const Token* class_tok = &first;
    if (p.eat(TokenKind::Equals)) {
      if (bound.count(first.text)) {
        fail(ErrorCode::DuplicateVariable,
             "variable '" + first.text + "' is already bound", first.line,
             first.col);
      }
      decl.name = first.text;
      decl.bound = true;
      class_tok = &p.expect(TokenKind::Ident, "a class name");
    } else {
      decl.name = "_obj" + std::to_string(decl_index);
    }
    decl.class_name = class_tok->text;
    if (!ast.find_class(decl.class_name)) {
      fail(ErrorCode::UnknownClass, "unknown class '" + decl.class_name + "'",
           class_tok->line, class_tok->col);
    }

    if (!p.at(TokenKind::Newline) && !p.at(TokenKind::End)) {
      decl.specifiers.push_back(parse_specifier(p));
      while (p.eat(TokenKind::Comma)) {
        decl.specifiers.push_back(parse_specifier(p));
      }
    }
    if (!p.at(TokenKind::End)) p.expect(TokenKind::Newline, "end of line");

    if (orientation_specifier_count(decl) > 1) {
      fail(ErrorCode::MultipleOrientationSpecifiers,
           "object '" + decl.name + "' has more than one orientation specifier",
           decl.line, decl.col);
    }

    if (decl.bound) bound.insert(decl.name);
    ast.declarations.push_back(std::move(decl));
    ++decl_index;
    p.skip_newlines();
  }
  return ast;
}

}  // namespace prs
