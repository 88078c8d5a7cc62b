// Copyright 2026 the repml authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repml/parser.hpp"

#include <cctype>

#include "repml/lexer.hpp"

namespace repml {

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (!at_eof()) p.push_back(decl());
    return p;
  }

  TypePtr type_only() {
    TypePtr t = type();
    expect_eof();
    return t;
  }

  CostPtr cost_only() {
    CostPtr c = cost();
    expect_eof();
    return c;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t k = 1) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_eof() const { return cur().k == Token::K::Eof; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw CompileError(CompileError::Stage::Parse, cur().loc, msg);
  }
  void expect_punct(const std::string& p) {
    if (!cur().is_punct(p)) fail("expected '" + p + "'");
    ++pos_;
  }
  void expect_kw(const std::string& kw) {
    if (!cur().is_kw(kw)) fail("expected '" + kw + "'");
    ++pos_;
  }
  void expect_eof() {
    if (!at_eof()) fail("trailing input after expression");
  }
  std::string expect_ident() {
    if (cur().k != Token::K::Ident) fail("expected identifier");
    return take().text;
  }
  bool accept_punct(const std::string& p) {
    if (cur().is_punct(p)) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_kw(const std::string& kw) {
    if (cur().is_kw(kw)) {
      ++pos_;
      return true;
    }
    return false;
  }

  // -------------------------------------------------------------------------
  // Declarations

  DeclPtr decl() {
    Loc loc = cur().loc;
    if (accept_kw("type")) return type_decl(loc);
    if (accept_kw("letrepr")) return repr_decl(loc);
    if (accept_kw("letop")) return op_decl(loc);
    if (accept_kw("letimpl")) return impl_decl(loc);
    if (accept_kw("let")) return let_decl(loc);
    if (accept_kw("external")) return extern_decl(loc);
    fail("expected a declaration");
  }

  std::vector<std::string> type_params() {
    std::vector<std::string> params;
    if (cur().k == Token::K::TyVar) {
      params.push_back(take().text);
    } else if (cur().is_punct("(") && peek().k == Token::K::TyVar) {
      ++pos_;
      params.push_back(take().text);
      while (accept_punct(",")) {
        if (cur().k != Token::K::TyVar) fail("expected type parameter");
        params.push_back(take().text);
      }
      expect_punct(")");
    }
    return params;
  }

  DeclPtr type_decl(Loc loc) {
    auto d = std::make_shared<Decl>();
    d->loc = loc;
    d->params = type_params();
    d->name = expect_ident();
    if (!accept_punct("=")) {
      d->k = Decl::K::Type;  // opaque/uninhabited type
      return d;
    }
    // A leading '|' or an uppercase identifier followed by '|' / 'of'-style
    // constructor arguments marks a variant declaration.
    if (cur().is_punct("|") || looks_like_variant()) {
      d->k = Decl::K::Variant;
      accept_punct("|");
      for (;;) {
        VariantCtor ctor;
        ctor.name = expect_ident();
        if (accept_kw("of")) ctor.args.push_back(type());
        d->ctors.push_back(std::move(ctor));
        if (!accept_punct("|")) break;
      }
      return d;
    }
    d->k = Decl::K::Type;
    d->alias = type();
    return d;
  }

  bool looks_like_variant() const {
    if (cur().k != Token::K::Ident) return false;
    char c = cur().text[0];
    if (!std::isupper(static_cast<unsigned char>(c))) return false;
    // Disambiguate from a qualified type constructor (IntSet.t).
    return cur().text.find('.') == std::string::npos;
  }

  DeclPtr repr_decl(Loc loc) {
    auto d = std::make_shared<Decl>();
    d->k = Decl::K::Repr;
    d->loc = loc;
    d->name = expect_ident();
    expect_punct("{");
    d->pattern = type();
    expect_punct("=");
    d->target = type();
    expect_punct("}");
    return d;
  }

  DeclPtr op_decl(Loc loc) {
    auto d = std::make_shared<Decl>();
    d->k = Decl::K::Op;
    d->loc = loc;
    d->name = expect_ident();
    expect_punct(":");
    d->scheme_body = type();
    return d;
  }

  DeclPtr impl_decl(Loc loc) {
    auto d = std::make_shared<Decl>();
    d->k = Decl::K::Impl;
    d->loc = loc;
    expect_punct("[");
    d->cost = cost();
    expect_punct("]");
    d->op = expect_ident();
    d->name = d->op;
    if (accept_punct(":")) d->annot = type();
    expect_punct("=");
    d->body = expr();
    return d;
  }

  DeclPtr let_decl(Loc loc) {
    auto d = std::make_shared<Decl>();
    d->k = Decl::K::Let;
    d->loc = loc;
    d->is_rec = accept_kw("rec");
    d->name = expect_ident();
    auto [params, annot, body] = let_tail();
    d->annot = annot;
    d->body = wrap_params(params, body, loc);
    return d;
  }

  DeclPtr extern_decl(Loc loc) {
    auto d = std::make_shared<Decl>();
    d->k = Decl::K::Extern;
    d->loc = loc;
    d->name = expect_ident();
    expect_punct(":");
    d->scheme_body = type();
    return d;
  }

  // Shared between top-level lets and let-in: parameters, optional annotation,
  // '=' body.
  std::tuple<std::vector<std::string>, std::optional<TypePtr>, ExprPtr>
  let_tail() {
    std::vector<std::string> params;
    while (cur().k == Token::K::Ident || cur().is_punct("_")) {
      params.push_back(take().text);
    }
    std::optional<TypePtr> annot;
    if (accept_punct(":")) annot = type();
    expect_punct("=");
    return {params, annot, expr()};
  }

  static ExprPtr wrap_params(const std::vector<std::string>& params,
                             ExprPtr body, Loc loc) {
    for (auto it = params.rbegin(); it != params.rend(); ++it) {
      auto lam = Expr::make(Expr::K::Lambda, loc);
      lam->name = *it;
      lam->kids = {std::move(body)};
      body = std::move(lam);
    }
    return body;
  }

  // -------------------------------------------------------------------------
  // Types

  TypePtr type() {
    TypePtr left = type_prod();
    if (accept_punct("->")) return SemType::arrow(std::move(left), type());
    return left;
  }

  TypePtr type_prod() {
    TypePtr first = type_postfix();
    if (!cur().is_punct("*")) return first;
    std::vector<TypePtr> elems = {std::move(first)};
    while (accept_punct("*")) elems.push_back(type_postfix());
    return SemType::tuple(std::move(elems));
  }

  TypePtr type_postfix() {
    // A leading comma-list in parens may be a constructor argument list:
    // ('a, 'p) coll.
    std::vector<TypePtr> args;
    TypePtr cur_ty;
    if (cur().is_punct("(")) {
      ++pos_;
      args.push_back(type());
      while (accept_punct(",")) args.push_back(type());
      expect_punct(")");
      if (args.size() == 1) {
        cur_ty = args[0];
        args.clear();
      }
    } else {
      cur_ty = type_atom();
    }
    for (;;) {
      if (cur().k == Token::K::Ident) {
        std::string name = take().text;
        if (cur_ty) {
          cur_ty = SemType::con(std::move(name), {std::move(cur_ty)});
        } else {
          cur_ty = SemType::con(std::move(name), std::move(args));
          args.clear();
        }
        continue;
      }
      if (cur().is_kw("repr")) {
        ++pos_;
        if (!cur_ty) fail("'repr' needs a type argument");
        cur_ty = SemType::repr(std::move(cur_ty));
        continue;
      }
      break;
    }
    if (!cur_ty) fail("expected a type constructor after argument list");
    return cur_ty;
  }

  TypePtr type_atom() {
    if (cur().k == Token::K::TyVar) return SemType::rigid(take().text);
    if (cur().is_punct("_")) {
      ++pos_;
      return SemType::wildcard();
    }
    if (cur().k == Token::K::Ident) return SemType::con(take().text);
    if (accept_punct("!")) {
      std::string rep = expect_ident();
      // The argument is optional: `!list_r -> _` leaves the shape implicit.
      if (cur().is_punct("(") || cur().is_punct("_") ||
          cur().k == Token::K::TyVar || cur().k == Token::K::Ident) {
        return SemType::repr_assign(rep, type_postfix());
      }
      return SemType::repr_assign(rep, SemType::wildcard());
    }
    fail("expected a type");
  }

  // -------------------------------------------------------------------------
  // Cost expressions

  CostPtr cost() {
    CostPtr a = cost_mul();
    while (cur().is_punct("+") || cur().is_punct("-")) {
      auto k = take().text == "+" ? CostExpr::K::Add : CostExpr::K::Sub;
      a = CostExpr::binary(k, std::move(a), cost_mul());
    }
    return a;
  }

  CostPtr cost_mul() {
    CostPtr a = cost_app();
    while (cur().is_punct("*") || cur().is_punct("/")) {
      auto k = take().text == "*" ? CostExpr::K::Mul : CostExpr::K::Div;
      a = CostExpr::binary(k, std::move(a), cost_app());
    }
    return a;
  }

  CostPtr cost_app() {
    if (accept_kw("min")) {
      CostPtr a = cost_atom();
      CostPtr b = cost_atom();
      return CostExpr::binary(CostExpr::K::Min, std::move(a), std::move(b));
    }
    if (accept_kw("max")) {
      CostPtr a = cost_atom();
      CostPtr b = cost_atom();
      return CostExpr::binary(CostExpr::K::Max, std::move(a), std::move(b));
    }
    if (accept_kw("log")) return CostExpr::log(cost_atom());
    return cost_atom();
  }

  CostPtr cost_atom() {
    if (cur().k == Token::K::Int)
      return CostExpr::literal(static_cast<double>(take().ival));
    if (cur().k == Token::K::Float) return CostExpr::literal(take().fval);
    if (cur().k == Token::K::Ident) return CostExpr::var(take().text);
    if (accept_punct("(")) {
      CostPtr c = cost();
      expect_punct(")");
      return c;
    }
    fail("expected a cost expression");
  }

  // -------------------------------------------------------------------------
  // Expressions

  ExprPtr expr() {
    Loc loc = cur().loc;
    if (accept_kw("fun")) {
      std::vector<std::string> params;
      while (cur().k == Token::K::Ident || cur().is_punct("_")) {
        params.push_back(take().text);
      }
      if (params.empty()) fail("'fun' needs at least one parameter");
      expect_punct("->");
      return wrap_params(params, expr(), loc);
    }
    if (accept_kw("let")) {
      auto e = Expr::make(Expr::K::LetIn, loc);
      if (accept_kw("rec")) fail("recursive let-in is not supported");
      e->name = take_binder();
      auto [params, annot, bound] = let_tail();
      if (annot) e->annot = *annot;
      expect_kw("in");
      e->kids = {wrap_params(params, bound, loc), expr()};
      return e;
    }
    if (accept_kw("if")) {
      auto e = Expr::make(Expr::K::If, loc);
      ExprPtr c = expr();
      expect_kw("then");
      ExprPtr t = expr();
      expect_kw("else");
      e->kids = {std::move(c), std::move(t), expr()};
      return e;
    }
    if (cur().is_kw("match")) return match_expr(/*bracketed=*/false);
    return or_expr();
  }

  std::string take_binder() {
    if (cur().k == Token::K::Ident || cur().is_punct("_")) return take().text;
    fail("expected a binder");
  }

  ExprPtr match_expr(bool bracketed) {
    Loc loc = cur().loc;
    expect_kw("match");
    auto e = Expr::make(Expr::K::Match, loc);
    e->kids = {expr()};
    expect_kw("with");
    accept_punct("|");
    for (;;) {
      e->arms.push_back(match_arm());
      if (!accept_punct("|")) break;
    }
    if (bracketed) expect_kw("end");
    return e;
  }

  MatchArm match_arm() {
    MatchArm arm;
    if (accept_punct("_")) {
      arm.ctor = "_";
    } else {
      arm.ctor = expect_ident();
      if (cur().is_punct("(")) {
        ++pos_;
        arm.tuple_pattern = true;
        arm.binders.push_back(take_binder());
        while (accept_punct(",")) arm.binders.push_back(take_binder());
        expect_punct(")");
      } else if (cur().k == Token::K::Ident || cur().is_punct("_")) {
        arm.binders.push_back(take().text);
      }
    }
    expect_punct("->");
    arm.body = expr();
    return arm;
  }

  ExprPtr or_expr() { return binop_chain({"||"}, [&] { return and_expr(); }); }
  ExprPtr and_expr() { return binop_chain({"&&"}, [&] { return cmp_expr(); }); }

  ExprPtr cmp_expr() {
    ExprPtr a = add_expr();
    static const char* kCmp[] = {"=", "<>", "<=", ">=", "<", ">"};
    for (auto* op : kCmp) {
      if (cur().is_punct(op)) {
        Loc loc = take().loc;
        return apply_binop(op, std::move(a), add_expr(), loc);
      }
    }
    return a;
  }

  ExprPtr add_expr() {
    return binop_chain({"+", "-"}, [&] { return mul_expr(); });
  }
  ExprPtr mul_expr() {
    return binop_chain({"*", "/"}, [&] { return app_expr(); });
  }

  template <typename Next>
  ExprPtr binop_chain(std::initializer_list<const char*> ops, Next next) {
    ExprPtr a = next();
    for (;;) {
      bool advanced = false;
      for (auto* op : ops) {
        if (cur().is_punct(op)) {
          Loc loc = take().loc;
          a = apply_binop(op, std::move(a), next(), loc);
          advanced = true;
          break;
        }
      }
      if (!advanced) return a;
    }
  }

  static ExprPtr apply_binop(const std::string& op, ExprPtr a, ExprPtr b,
                             Loc loc) {
    auto v = Expr::make(Expr::K::Var, loc);
    v->name = op;
    auto inner = Expr::make(Expr::K::App, loc);
    inner->kids = {std::move(v), std::move(a)};
    auto outer = Expr::make(Expr::K::App, loc);
    outer->kids = {std::move(inner), std::move(b)};
    return outer;
  }

  ExprPtr app_expr() {
    ExprPtr fn = scaled_atom();
    while (starts_atom()) {
      auto app = Expr::make(Expr::K::App, fn->loc);
      app->kids = {std::move(fn), scaled_atom()};
      fn = std::move(app);
    }
    return fn;
  }

  bool starts_atom() const {
    const Token& t = cur();
    switch (t.k) {
      case Token::K::Ident:
      case Token::K::Int:
      case Token::K::Float:
      case Token::K::String:
        return true;
      case Token::K::Keyword:
        return t.text == "true" || t.text == "false" || t.text == "begin";
      case Token::K::Punct:
        return t.text == "(" || t.text == "@";
      default:
        return false;
    }
  }

  ExprPtr scaled_atom() {
    if (cur().is_punct("@")) {
      Loc loc = take().loc;
      auto e = Expr::make(Expr::K::Scaled, loc);
      e->scale = cost_atom();
      e->kids = {atom()};
      return e;
    }
    return atom();
  }

  ExprPtr atom() {
    Loc loc = cur().loc;
    if (cur().k == Token::K::Ident) {
      auto e = Expr::make(Expr::K::Var, loc);
      e->name = take().text;
      return e;
    }
    if (cur().k == Token::K::Int) {
      auto e = Expr::make(Expr::K::Lit, loc);
      e->lit.k = Literal::K::Int;
      e->lit.i = take().ival;
      return e;
    }
    if (cur().k == Token::K::Float) {
      auto e = Expr::make(Expr::K::Lit, loc);
      e->lit.k = Literal::K::Float;
      e->lit.f = take().fval;
      return e;
    }
    if (cur().k == Token::K::String) {
      auto e = Expr::make(Expr::K::Lit, loc);
      e->lit.k = Literal::K::String;
      e->lit.s = take().text;
      return e;
    }
    if (cur().is_kw("true") || cur().is_kw("false")) {
      auto e = Expr::make(Expr::K::Lit, loc);
      e->lit.k = Literal::K::Bool;
      e->lit.b = take().text == "true";
      return e;
    }
    if (accept_kw("begin")) {
      ExprPtr e = match_expr(/*bracketed=*/true);
      return e;
    }
    if (accept_punct("(")) {
      ExprPtr first = expr();
      if (cur().is_punct(",")) {
        auto tup = Expr::make(Expr::K::Tuple, loc);
        tup->kids.push_back(std::move(first));
        while (accept_punct(",")) tup->kids.push_back(expr());
        expect_punct(")");
        return tup;
      }
      expect_punct(")");
      return first;
    }
    fail("expected an expression");
  }
};

}  // namespace

Program parse_program(const std::string& src) {
  return Parser(lex(src)).program();
}

TypePtr parse_type(const std::string& src) {
  return Parser(lex(src)).type_only();
}

CostPtr parse_cost(const std::string& src) {
  return Parser(lex(src)).cost_only();
}

}  // namespace repml
