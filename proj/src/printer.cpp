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

#include "repml/printer.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

namespace repml {

namespace {

// Type precedence levels: 0 arrow, 1 product, 2 postfix/atom.
void print_type_rec(std::ostringstream& out, const TypePtr& t, int level,
                    const PrintOptions& opts) {
  auto paren = [&](int inner, auto body) {
    bool need = inner < level;
    if (need) out << '(';
    body();
    if (need) out << ')';
  };
  switch (t->k) {
    case SemType::K::Arrow:
      paren(0, [&] {
        print_type_rec(out, t->args[0], 1, opts);
        out << " -> ";
        print_type_rec(out, t->args[1], 0, opts);
      });
      break;
    case SemType::K::Tuple:
      paren(1, [&] {
        for (size_t i = 0; i < t->args.size(); ++i) {
          if (i) out << " * ";
          print_type_rec(out, t->args[i], 2, opts);
        }
      });
      break;
    case SemType::K::Con:
      if (t->args.empty()) {
        out << t->name;
      } else if (t->args.size() == 1) {
        print_type_rec(out, t->args[0], 2, opts);
        out << ' ' << t->name;
      } else {
        out << '(';
        for (size_t i = 0; i < t->args.size(); ++i) {
          if (i) out << ", ";
          print_type_rec(out, t->args[i], 0, opts);
        }
        out << ") " << t->name;
      }
      break;
    case SemType::K::Rigid:
      out << '\'' << t->name;
      break;
    case SemType::K::Unif:
      out << '?' << t->id;
      break;
    case SemType::K::Repr:
      print_type_rec(out, t->args[0], 2, opts);
      out << " repr";
      if (opts.show_rvars && t->id >= 0) out << '#' << t->id;
      break;
    case SemType::K::ReprAssign:
      out << '!' << t->name << ' ';
      if (t->args[0]->k == SemType::K::Wildcard) {
        out << '_';
      } else {
        out << '(';
        print_type_rec(out, t->args[0], 0, opts);
        out << ')';
      }
      break;
    case SemType::K::Wildcard:
      out << '_';
      break;
  }
}

// Cost precedence: 0 add, 1 mul, 2 app, 3 atom.
void print_cost_rec(std::ostringstream& out, const CostPtr& c, int level) {
  auto binop = [&](const char* op, int my) {
    bool need = my < level;
    if (need) out << '(';
    print_cost_rec(out, c->a, my);
    out << ' ' << op << ' ';
    print_cost_rec(out, c->b, my + 1);
    if (need) out << ')';
  };
  switch (c->k) {
    case CostExpr::K::Lit: {
      double v = c->lit;
      std::ostringstream num;
      if (v == std::floor(v) && std::abs(v) < 1e15) {
        num << v << ".0";
      } else {
        num.precision(17);
        num << v;
      }
      out << num.str();
      break;
    }
    case CostExpr::K::Var:
      out << c->name;
      break;
    case CostExpr::K::Add: binop("+", 0); break;
    case CostExpr::K::Sub: binop("-", 0); break;
    case CostExpr::K::Mul: binop("*", 1); break;
    case CostExpr::K::Div: binop("/", 1); break;
    case CostExpr::K::Min:
    case CostExpr::K::Max: {
      bool need = 2 < level;
      if (need) out << '(';
      out << (c->k == CostExpr::K::Min ? "min " : "max ");
      print_cost_rec(out, c->a, 3);
      out << ' ';
      print_cost_rec(out, c->b, 3);
      if (need) out << ')';
      break;
    }
    case CostExpr::K::Log: {
      bool need = 2 < level;
      if (need) out << '(';
      out << "log ";
      print_cost_rec(out, c->a, 3);
      if (need) out << ')';
      break;
    }
  }
}

std::string cost_atom_str(const CostPtr& c) {
  std::ostringstream out;
  print_cost_rec(out, c, 3);
  std::string s = out.str();
  if (c->k == CostExpr::K::Lit || c->k == CostExpr::K::Var) return s;
  return "(" + s + ")";
}

bool is_infix_op(const std::string& name) {
  static const std::unordered_set<std::string> kOps = {
      "=", "<>", "<", "<=", ">", ">=", "&&", "||", "+", "-", "*", "/"};
  return kOps.count(name) > 0;
}

int infix_level(const std::string& name) {
  if (name == "||") return 1;
  if (name == "&&") return 2;
  if (name == "+" || name == "-") return 4;
  if (name == "*" || name == "/") return 5;
  return 3;  // comparisons
}

// Expr precedence: 0 full (fun/let/if/match), 1 ||, 2 &&, 3 cmp, 4 +-,
// 5 */, 6 application, 7 atom.
void print_expr_rec(std::ostringstream& out, const ExprPtr& e, int level,
                    int indent, const PrintOptions& opts);

void print_lambda_chain(std::ostringstream& out, const ExprPtr& e, int indent,
                        const PrintOptions& opts) {
  out << "fun";
  ExprPtr cur = e;
  while (cur->k == Expr::K::Lambda) {
    out << ' ' << cur->name;
    cur = cur->kids[0];
  }
  out << " -> ";
  print_expr_rec(out, cur, 0, indent, opts);
}

void print_expr_rec(std::ostringstream& out, const ExprPtr& e, int level,
                    int indent, const PrintOptions& opts) {
  auto paren = [&](int my, auto body) {
    bool need = my < level;
    if (need) out << '(';
    body();
    if (need) out << ')';
  };
  switch (e->k) {
    case Expr::K::Var:
      out << e->name;
      break;
    case Expr::K::Lit:
      switch (e->lit.k) {
        case Literal::K::Int: out << e->lit.i; break;
        case Literal::K::Float: {
          std::ostringstream num;
          if (e->lit.f == std::floor(e->lit.f) && std::abs(e->lit.f) < 1e15) {
            num << e->lit.f << ".0";
          } else {
            num.precision(17);
            num << e->lit.f;
          }
          out << num.str();
          break;
        }
        case Literal::K::String: {
          out << '"';
          for (char c : e->lit.s) {
            switch (c) {
              case '\n': out << "\\n"; break;
              case '\t': out << "\\t"; break;
              case '\\': out << "\\\\"; break;
              case '"': out << "\\\""; break;
              default: out << c;
            }
          }
          out << '"';
          break;
        }
        case Literal::K::Bool: out << (e->lit.b ? "true" : "false"); break;
      }
      break;
    case Expr::K::Lambda:
      paren(0, [&] { print_lambda_chain(out, e, indent, opts); });
      break;
    case Expr::K::LetIn:
      paren(0, [&] {
        out << "let " << e->name;
        if (e->annot) out << " : " << print_type(e->annot, opts);
        out << " = ";
        print_expr_rec(out, e->kids[0], 0, indent, opts);
        out << " in\n" << std::string(indent * 2, ' ');
        print_expr_rec(out, e->kids[1], 0, indent, opts);
      });
      break;
    case Expr::K::If:
      paren(0, [&] {
        out << "if ";
        print_expr_rec(out, e->kids[0], 0, indent, opts);
        out << " then ";
        print_expr_rec(out, e->kids[1], 0, indent, opts);
        out << " else ";
        print_expr_rec(out, e->kids[2], 0, indent, opts);
      });
      break;
    case Expr::K::Match: {
      // Always bracketed on output so nested matches re-parse unambiguously.
      out << "begin match ";
      print_expr_rec(out, e->kids[0], 0, indent + 1, opts);
      out << " with";
      for (const auto& arm : e->arms) {
        out << '\n' << std::string((indent + 1) * 2, ' ') << "| " << arm.ctor;
        if (!arm.binders.empty()) {
          if (arm.tuple_pattern) {
            out << " (";
            for (size_t i = 0; i < arm.binders.size(); ++i) {
              if (i) out << ", ";
              out << arm.binders[i];
            }
            out << ')';
          } else {
            out << ' ' << arm.binders[0];
          }
        }
        out << " -> ";
        print_expr_rec(out, arm.body, 0, indent + 2, opts);
      }
      out << '\n' << std::string(indent * 2, ' ') << "end";
      break;
    }
    case Expr::K::Tuple:
      out << '(';
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) out << ", ";
        print_expr_rec(out, e->kids[i], 0, indent, opts);
      }
      out << ')';
      break;
    case Expr::K::Scaled:
      paren(6, [&] {
        out << '@' << cost_atom_str(e->scale) << ' ';
        print_expr_rec(out, e->kids[0], 7, indent, opts);
      });
      break;
    case Expr::K::App: {
      // Binary operators print infix.
      const ExprPtr& inner = e->kids[0];
      if (inner->k == Expr::K::App && inner->kids[0]->k == Expr::K::Var &&
          is_infix_op(inner->kids[0]->name)) {
        const std::string& op = inner->kids[0]->name;
        int my = infix_level(op);
        // Comparisons are non-associative in the grammar, so both operands
        // need the tighter level.
        int left = (my == 3) ? my + 1 : my;
        paren(my, [&] {
          print_expr_rec(out, inner->kids[1], left, indent, opts);
          out << ' ' << op << ' ';
          print_expr_rec(out, e->kids[1], my + 1, indent, opts);
        });
        break;
      }
      paren(6, [&] {
        print_expr_rec(out, e->kids[0], 6, indent, opts);
        out << ' ';
        print_expr_rec(out, e->kids[1], 7, indent, opts);
      });
      break;
    }
  }
}

void canonicalize_rec(const TypePtr& t, std::map<std::string, int>& rigids,
                      std::map<int, int>& uvars, std::map<int, int>& rvars,
                      std::ostringstream& out) {
  switch (t->k) {
    case SemType::K::Rigid: {
      auto [it, inserted] =
          rigids.emplace(t->name, static_cast<int>(rigids.size() + uvars.size()) + 1);
      (void)inserted;
      out << "'v" << it->second;
      break;
    }
    case SemType::K::Unif: {
      auto [it, inserted] =
          uvars.emplace(t->id, static_cast<int>(rigids.size() + uvars.size()) + 1);
      (void)inserted;
      out << "'v" << it->second;
      break;
    }
    case SemType::K::Repr: {
      out << "(";
      canonicalize_rec(t->args[0], rigids, uvars, rvars, out);
      int num = -1;
      if (t->id >= 0) {
        auto [it, inserted] = rvars.emplace(t->id, static_cast<int>(rvars.size()) + 1);
        (void)inserted;
        num = it->second;
      }
      out << ") repr#" << num;
      break;
    }
    case SemType::K::ReprAssign:
      out << '!' << t->name << ' ';
      canonicalize_rec(t->args[0], rigids, uvars, rvars, out);
      break;
    case SemType::K::Wildcard:
      out << '_';
      break;
    case SemType::K::Con:
      out << t->name;
      if (!t->args.empty()) {
        out << '<';
        for (size_t i = 0; i < t->args.size(); ++i) {
          if (i) out << ',';
          canonicalize_rec(t->args[i], rigids, uvars, rvars, out);
        }
        out << '>';
      }
      break;
    case SemType::K::Arrow:
      out << '(';
      canonicalize_rec(t->args[0], rigids, uvars, rvars, out);
      out << " -> ";
      canonicalize_rec(t->args[1], rigids, uvars, rvars, out);
      out << ')';
      break;
    case SemType::K::Tuple:
      out << '(';
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) out << " * ";
        canonicalize_rec(t->args[i], rigids, uvars, rvars, out);
      }
      out << ')';
      break;
  }
}

}  // namespace

std::string print_type(const TypePtr& t, const PrintOptions& opts) {
  std::ostringstream out;
  print_type_rec(out, t, 0, opts);
  return out.str();
}

std::string print_cost(const CostPtr& c) {
  std::ostringstream out;
  print_cost_rec(out, c, 0);
  return out.str();
}

std::string print_expr(const ExprPtr& e, const PrintOptions& opts) {
  std::ostringstream out;
  print_expr_rec(out, e, 0, 1, opts);
  return out.str();
}

std::string print_decl(const DeclPtr& d, const PrintOptions& opts) {
  std::ostringstream out;
  switch (d->k) {
    case Decl::K::Type:
    case Decl::K::Variant:
      out << "type ";
      if (d->params.size() == 1) {
        out << '\'' << d->params[0] << ' ';
      } else if (d->params.size() > 1) {
        out << '(';
        for (size_t i = 0; i < d->params.size(); ++i) {
          if (i) out << ", ";
          out << '\'' << d->params[i];
        }
        out << ") ";
      }
      out << d->name;
      if (d->k == Decl::K::Variant) {
        out << " =";
        for (const auto& ctor : d->ctors) {
          out << "\n  | " << ctor.name;
          if (!ctor.args.empty()) {
            out << " of " << print_type(ctor.args[0], opts);
          }
        }
      } else if (d->alias) {
        out << " = " << print_type(*d->alias, opts);
      }
      break;
    case Decl::K::Repr:
      out << "letrepr " << d->name << " {" << print_type(d->pattern, opts)
          << " = " << print_type(d->target, opts) << "}";
      break;
    case Decl::K::Op:
      out << "letop " << d->name << " : " << print_type(d->scheme_body, opts);
      break;
    case Decl::K::Impl:
      out << "letimpl[" << print_cost(d->cost) << "] " << d->op;
      if (d->annot) out << " : " << print_type(*d->annot, opts);
      out << " =\n  " << print_expr(d->body, opts);
      break;
    case Decl::K::Let:
      out << "let " << (d->is_rec ? "rec " : "") << d->name;
      if (d->annot) out << " : " << print_type(*d->annot, opts);
      out << " =\n  " << print_expr(d->body, opts);
      break;
    case Decl::K::Extern:
      out << "external " << d->name << " : "
          << print_type(d->scheme_body, opts);
      break;
  }
  return out.str();
}

std::string print_program(const Program& p, const PrintOptions& opts) {
  std::ostringstream out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out << "\n";
    out << print_decl(p[i], opts) << "\n";
  }
  return out.str();
}

std::string canonical_type(const TypePtr& t) {
  std::map<std::string, int> rigids;
  std::map<int, int> uvars, rvars;
  std::ostringstream out;
  canonicalize_rec(t, rigids, uvars, rvars, out);
  return out.str();
}

}  // namespace repml
