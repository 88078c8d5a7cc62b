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

#ifndef REPML_AST_HPP
#define REPML_AST_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace repml {

struct Loc {
  int line = 0;
  int col = 0;
};

/// Compilation aborts on the first error; the stage tag drives the CLI's
/// exit-code discipline.
class CompileError : public std::runtime_error {
 public:
  enum class Stage { Parse, Expand, Infer, Solve, Lower, Io };

  CompileError(Stage stage, Loc loc, const std::string& msg)
      : std::runtime_error(format(stage, loc, msg)), stage(stage), loc(loc) {}

  Stage stage;
  Loc loc;

 private:
  static std::string format(Stage stage, Loc loc, const std::string& msg) {
    static const char* names[] = {"parse", "expand", "infer",
                                  "solve", "lower",  "io"};
    std::string s = names[static_cast<int>(stage)];
    if (loc.line > 0) {
      s += " error at " + std::to_string(loc.line) + ":" +
           std::to_string(loc.col);
    } else {
      s += " error";
    }
    return s + ": " + msg;
  }
};

// ---------------------------------------------------------------------------
// Types

struct SemType;
using TypePtr = std::shared_ptr<const SemType>;

/// The type language. Immutable; shared freely.
///
/// Repr carries a representation variable id; -1 means "not yet assigned"
/// (only legal before representation analysis has run).
struct SemType {
  enum class K {
    Con,         // name, args
    Arrow,       // args[0] -> args[1]
    Tuple,       // args
    Rigid,       // name ('a)
    Unif,        // id
    Repr,        // args[0] repr, rvar id
    ReprAssign,  // !name args[0]
    Wildcard,    // _
  };

  K k;
  std::string name;
  std::vector<TypePtr> args;
  int id = -1;

  static TypePtr con(std::string n, std::vector<TypePtr> a = {}) {
    auto t = std::make_shared<SemType>();
    t->k = K::Con;
    t->name = std::move(n);
    t->args = std::move(a);
    return t;
  }
  static TypePtr arrow(TypePtr a, TypePtr b) {
    auto t = std::make_shared<SemType>();
    t->k = K::Arrow;
    t->args = {std::move(a), std::move(b)};
    return t;
  }
  static TypePtr tuple(std::vector<TypePtr> elems) {
    auto t = std::make_shared<SemType>();
    t->k = K::Tuple;
    t->args = std::move(elems);
    return t;
  }
  static TypePtr rigid(std::string n) {
    auto t = std::make_shared<SemType>();
    t->k = K::Rigid;
    t->name = std::move(n);
    return t;
  }
  static TypePtr unif(int id) {
    auto t = std::make_shared<SemType>();
    t->k = K::Unif;
    t->id = id;
    return t;
  }
  static TypePtr repr(TypePtr arg, int rvar = -1) {
    auto t = std::make_shared<SemType>();
    t->k = K::Repr;
    t->args = {std::move(arg)};
    t->id = rvar;
    return t;
  }
  static TypePtr repr_assign(std::string rname, TypePtr inner) {
    auto t = std::make_shared<SemType>();
    t->k = K::ReprAssign;
    t->name = std::move(rname);
    t->args = {std::move(inner)};
    return t;
  }
  static TypePtr wildcard() {
    auto t = std::make_shared<SemType>();
    t->k = K::Wildcard;
    return t;
  }
};

bool type_equal(const TypePtr& a, const TypePtr& b);

// ---------------------------------------------------------------------------
// Cost expressions

struct CostExpr;
using CostPtr = std::shared_ptr<const CostExpr>;

struct CostExpr {
  enum class K { Lit, Var, Add, Sub, Mul, Div, Min, Max, Log };

  K k;
  double lit = 0.0;
  std::string name;
  CostPtr a, b;

  static CostPtr literal(double v) {
    auto c = std::make_shared<CostExpr>();
    c->k = K::Lit;
    c->lit = v;
    return c;
  }
  static CostPtr var(std::string n) {
    auto c = std::make_shared<CostExpr>();
    c->k = K::Var;
    c->name = std::move(n);
    return c;
  }
  static CostPtr binary(K k, CostPtr a, CostPtr b) {
    auto c = std::make_shared<CostExpr>();
    c->k = k;
    c->a = std::move(a);
    c->b = std::move(b);
    return c;
  }
  static CostPtr log(CostPtr a) {
    auto c = std::make_shared<CostExpr>();
    c->k = K::Log;
    c->a = std::move(a);
    return c;
  }
};

bool cost_equal(const CostPtr& a, const CostPtr& b);

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct MatchArm {
  std::string ctor;
  std::vector<std::string> binders;  // "_" means anonymous
  bool tuple_pattern = false;        // C (x, y) vs C x
  ExprPtr body;
};

struct Literal {
  enum class K { Int, Float, String, Bool };
  K k;
  long long i = 0;
  double f = 0.0;
  std::string s;
  bool b = false;
};

/// Expression nodes are uniquely owned in practice (the parser never shares
/// them), so inference annotates them in place.
struct Expr {
  enum class K { Var, Lambda, App, LetIn, If, Match, Lit, Tuple, Scaled };

  K k;
  Loc loc;
  std::string name;            // Var, Lambda param, LetIn binder
  std::vector<ExprPtr> kids;   // App [fn,arg]; LetIn [bound,body]; If [c,t,e];
                               // Lambda [body]; Tuple elems; Scaled [inner];
                               // Match [scrutinee]
  std::vector<MatchArm> arms;  // Match
  Literal lit;                 // Lit
  CostPtr scale;               // Scaled
  TypePtr annot;               // LetIn optional annotation

  // Filled by inference.
  TypePtr ty;
  int op_use_id = -1;  // set on Var nodes that reference an operation

  static ExprPtr make(K k, Loc loc = {}) {
    auto e = std::make_shared<Expr>();
    e->k = k;
    e->loc = loc;
    return e;
  }
};

ExprPtr clone_expr(const ExprPtr& e);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// ---------------------------------------------------------------------------
// Declarations

struct TypeScheme {
  std::vector<std::string> vars;
  TypePtr body;
};

struct VariantCtor {
  std::string name;
  std::vector<TypePtr> args;  // 0 or 1 argument
};

struct Decl {
  enum class K { Type, Variant, Repr, Op, Impl, Let, Extern };

  K k;
  Loc loc;
  std::string name;
  std::vector<std::string> params;  // Type/Variant parameters

  std::optional<TypePtr> alias;    // Type
  std::vector<VariantCtor> ctors;  // Variant
  TypePtr pattern, target;         // Repr
  TypePtr scheme_body;             // Op/Extern (quantified over its rigids)
  CostPtr cost;                    // Impl
  std::string op;                  // Impl: operation implemented
  std::optional<TypePtr> annot;    // Impl/Let
  ExprPtr body;                    // Impl/Let
  bool is_rec = false;             // Let
};

using DeclPtr = std::shared_ptr<Decl>;
using Program = std::vector<DeclPtr>;

bool decl_equal(const DeclPtr& a, const DeclPtr& b);
bool program_equal(const Program& a, const Program& b);
Program clone_program(const Program& p);

}  // namespace repml

#endif  // REPML_AST_HPP
