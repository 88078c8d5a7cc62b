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

#include "repml/ast.hpp"

namespace repml {

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->k != b->k || a->name != b->name || a->id != b->id ||
      a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!type_equal(a->args[i], b->args[i])) return false;
  return true;
}

bool cost_equal(const CostPtr& a, const CostPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->k != b->k || a->lit != b->lit || a->name != b->name) return false;
  return cost_equal(a->a, b->a) && cost_equal(a->b, b->b);
}

ExprPtr clone_expr(const ExprPtr& e) {
  if (!e) return nullptr;
  auto c = std::make_shared<Expr>(*e);
  for (auto& kid : c->kids) kid = clone_expr(kid);
  for (auto& arm : c->arms) arm.body = clone_expr(arm.body);
  return c;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->k != b->k || a->name != b->name) return false;
  if (a->k == Expr::K::Lit) {
    const Literal& x = a->lit;
    const Literal& y = b->lit;
    if (x.k != y.k) return false;
    switch (x.k) {
      case Literal::K::Int: return x.i == y.i;
      case Literal::K::Float: return x.f == y.f;
      case Literal::K::String: return x.s == y.s;
      case Literal::K::Bool: return x.b == y.b;
    }
  }
  if (a->k == Expr::K::Scaled && !cost_equal(a->scale, b->scale)) return false;
  if ((a->annot == nullptr) != (b->annot == nullptr)) return false;
  if (a->annot && !type_equal(a->annot, b->annot)) return false;
  if (a->kids.size() != b->kids.size() || a->arms.size() != b->arms.size())
    return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  for (size_t i = 0; i < a->arms.size(); ++i) {
    const MatchArm& x = a->arms[i];
    const MatchArm& y = b->arms[i];
    if (x.ctor != y.ctor || x.binders != y.binders ||
        x.tuple_pattern != y.tuple_pattern || !expr_equal(x.body, y.body))
      return false;
  }
  return true;
}

bool decl_equal(const DeclPtr& a, const DeclPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->k != b->k || a->name != b->name || a->params != b->params ||
      a->op != b->op || a->is_rec != b->is_rec)
    return false;
  auto opt_ty_eq = [](const std::optional<TypePtr>& x,
                      const std::optional<TypePtr>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || type_equal(*x, *y);
  };
  if (!opt_ty_eq(a->alias, b->alias) || !opt_ty_eq(a->annot, b->annot))
    return false;
  if (!type_equal(a->pattern, b->pattern) || !type_equal(a->target, b->target))
    return false;
  if (!type_equal(a->scheme_body, b->scheme_body)) return false;
  if (!cost_equal(a->cost, b->cost)) return false;
  if (!expr_equal(a->body, b->body)) return false;
  if (a->ctors.size() != b->ctors.size()) return false;
  for (size_t i = 0; i < a->ctors.size(); ++i) {
    if (a->ctors[i].name != b->ctors[i].name ||
        a->ctors[i].args.size() != b->ctors[i].args.size())
      return false;
    for (size_t j = 0; j < a->ctors[i].args.size(); ++j)
      if (!type_equal(a->ctors[i].args[j], b->ctors[i].args[j])) return false;
  }
  return true;
}

bool program_equal(const Program& a, const Program& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!decl_equal(a[i], b[i])) return false;
  return true;
}

Program clone_program(const Program& p) {
  Program out;
  out.reserve(p.size());
  for (const auto& d : p) {
    auto c = std::make_shared<Decl>(*d);
    c->body = clone_expr(c->body);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace repml
