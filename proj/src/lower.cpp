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

#include "repml/lower.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "repml/alias.hpp"
#include "repml/printer.hpp"

namespace repml {

namespace {

CompileError lower_error(const std::string& msg, Loc loc = {}) {
  return CompileError(CompileError::Stage::Lower, loc, msg);
}

bool type_has(const TypePtr& t, SemType::K kind) {
  if (!t) return false;
  if (t->k == kind) return true;
  for (const auto& a : t->args)
    if (type_has(a, kind)) return true;
  return false;
}

bool type_unresolved(const TypePtr& t) {
  return type_has(t, SemType::K::Repr) || type_has(t, SemType::K::ReprAssign) ||
         type_has(t, SemType::K::Wildcard);
}

/// Step-7 marker recording, local mirror of the validate walk.
UnifyOutcome record_marks(const TypePtr& t, UnifCtx& ctx) {
  if (t->k == SemType::K::ReprAssign) {
    const TypePtr& inner = t->args[0];
    if (inner->k == SemType::K::Repr && inner->id >= 0) {
      UnifyOutcome r = ctx.assign_repr(inner->id, t->name);
      if (r != UnifyOutcome::Ok) return r;
    }
    return record_marks(inner, ctx);
  }
  for (const auto& a : t->args) {
    UnifyOutcome r = record_marks(a, ctx);
    if (r != UnifyOutcome::Ok) return r;
  }
  return UnifyOutcome::Ok;
}

struct Lowerer {
  const InferredProgram& inferred;
  const FrozenProgram& frozen;
  const ReprAssignment& assignment;
  UnifCtx ctx;

  // One walked solution node per (possibly shared) future binding.
  struct Node {
    const ImplDef* impl = nullptr;
    TypePtr inst_ty;             // instantiated, resolve under final ctx
    std::vector<size_t> subs;    // indices into `nodes`
  };
  std::vector<Node> nodes;  // post-order: sub-solutions precede parents

  Lowerer(const InferredProgram& inf, const FrozenProgram& fr,
          const ReprAssignment& as)
      : inferred(inf), frozen(fr), assignment(as),
        ctx(fr.problem.base_ctx()) {}

  const ProblemInput& problem() const { return frozen.problem; }

  /// Mirrors the validity walk, accumulating unification state and
  /// recording each solution node for the later binding pass.
  size_t walk(const OpUse& use, const SolutionPtr& sol) {
    if (!sol || !sol->impl)
      throw lower_error("solution is missing an implementation for '" +
                        use.op + "'");
    const ImplDef& impl = *sol->impl;
    if (sol->subs.size() != impl.uses.size())
      throw lower_error("solution arity mismatch on '" + impl.op + "'");
    InstantiatedImpl inst = instantiate_impl(impl, ctx);
    if (record_marks(inst.ty, ctx) != UnifyOutcome::Ok)
      throw lower_error("inconsistent representation assignment on '" +
                        impl.op + "'");
    TypePtr stripped = strip_repr_markers(inst.ty);
    TypePtr use_ty = freshen_wildcards(ctx.resolve(use.ty), ctx);
    if (ctx.unify(stripped, use_ty) != UnifyOutcome::Ok)
      throw lower_error("solution does not fit the op-use type of '" +
                        impl.op + "'");
    Node n;
    n.impl = &impl;
    n.inst_ty = stripped;
    for (size_t i = 0; i < inst.uses.size(); ++i)
      n.subs.push_back(walk(inst.uses[i], sol->subs[i]));
    nodes.push_back(std::move(n));
    return nodes.size() - 1;
  }

  /// Representation name for an rvar class: unification state first, then
  /// the caller-supplied assignment, then the first declared match.
  const ReprDef* repr_for(int rvar, const TypePtr& arg, Loc loc) {
    std::optional<std::string> name = ctx.repr_of(rvar);
    if (!name) {
      int root = ctx.rfind(rvar);
      auto it = assignment.by_class.find(root);
      if (it != assignment.by_class.end()) name = it->second;
    }
    if (name) {
      const ReprDef* def = problem().find_repr(*name);
      if (!def) throw lower_error("unknown representation: " + *name, loc);
      return def;
    }
    // Irrelevant rvar: default to the first declared representation that
    // matches the argument type.
    for (const auto& def : problem().reprs)
      if (apply_representation(def, arg)) return &def;
    throw lower_error("no representation matches " + print_type(arg), loc);
  }

  /// Replaces every repr type with its concrete layout.
  TypePtr concretize(const TypePtr& t, Loc loc) {
    if (t->k == SemType::K::ReprAssign) return concretize(t->args[0], loc);
    if (t->k == SemType::K::Repr) {
      TypePtr arg = concretize(t->args[0], loc);
      const ReprDef* def = repr_for(t->id, arg, loc);
      auto applied = apply_representation(*def, arg);
      if (!applied)
        throw lower_error("representation " + def->name +
                          " does not match " + print_type(arg), loc);
      return *applied;
    }
    if (t->args.empty()) return t;
    auto c = std::make_shared<SemType>(*t);
    for (auto& a : c->args) a = concretize(a, loc);
    return c;
  }

  /// Source-annotation types carry inference-time rvar ids; map them to
  /// frozen classes before concretizing. Unrewritable annotations (left
  /// with wildcards) are dropped by the caller.
  std::optional<TypePtr> rewrite_annot(const TypePtr& t, Loc loc) {
    std::function<TypePtr(const TypePtr&)> canon =
        [&](const TypePtr& x) -> TypePtr {
      if (x->args.empty()) return x;
      auto c = std::make_shared<SemType>(*x);
      if (c->k == SemType::K::Repr) {
        auto it = frozen.rvar_canon.find(c->id);
        c->id = it != frozen.rvar_canon.end() ? it->second : -1;
      }
      for (auto& a : c->args) a = canon(a);
      return c;
    };
    TypePtr mapped = canon(t);
    if (type_has(mapped, SemType::K::Wildcard)) return std::nullopt;
    // A repr whose class id is unknown cannot be resolved; drop the annot.
    std::function<bool(const TypePtr&)> lost = [&](const TypePtr& x) {
      if (x->k == SemType::K::Repr && x->id < 0) return true;
      for (const auto& a : x->args)
        if (lost(a)) return true;
      return false;
    };
    if (lost(mapped)) return std::nullopt;
    return concretize(mapped, loc);
  }
};

}  // namespace

Program apply_solution(const InferredProgram& inferred,
                       const FrozenProgram& frozen,
                       const std::vector<std::pair<int, SolutionPtr>>& items,
                       const ReprAssignment& assignment) {
  Lowerer lw(inferred, frozen, assignment);
  const ProblemInput& problem = frozen.problem;

  // Pass 1: mirror the validity walk over every top-level solution.
  std::map<int, size_t> top_node;  // op_use_id -> node index
  for (const auto& [slot, sol] : items) {
    if (slot < 0 || slot >= static_cast<int>(problem.top_uses.size()))
      throw lower_error("solution references an unknown top-level op-use");
    const OpUse& use = problem.top_uses[slot];
    top_node[use.use_id] = lw.walk(use, sol);
  }

  // Pass 2: assign binding names, deduplicating identical
  // (implementation, concrete instantiated type, sub-bindings) nodes.
  struct Binding {
    std::string name;
    const ImplDef* impl;
    std::vector<std::string> sub_names;  // aligned with impl->uses
  };
  std::vector<Binding> bindings;
  std::map<std::string, size_t> by_key;
  std::map<std::string, int> op_counter;
  std::vector<std::string> node_name(lw.nodes.size());
  for (size_t i = 0; i < lw.nodes.size(); ++i) {
    const auto& n = lw.nodes[i];
    TypePtr concrete = lw.concretize(lw.ctx.resolve(n.inst_ty), {});
    std::string key = std::to_string(n.impl->impl_index) + "|" +
                      canonical_type(concrete);
    std::vector<std::string> sub_names;
    for (size_t s : n.subs) {
      key += "|" + node_name[s];
      sub_names.push_back(node_name[s]);
    }
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      std::string name = "__impl_" + n.impl->op + "_" +
                         std::to_string(op_counter[n.impl->op]++);
      it = by_key.emplace(key, bindings.size()).first;
      bindings.push_back({name, n.impl, std::move(sub_names)});
    }
    node_name[i] = bindings[it->second].name;
  }

  // Body rewriting: op-use references become binding references, cost
  // scales disappear, annotations are concretized or dropped.
  std::function<ExprPtr(const ExprPtr&, const std::map<int, std::string>&)>
      lower_expr = [&](const ExprPtr& e,
                       const std::map<int, std::string>& names) -> ExprPtr {
    if (e->k == Expr::K::Scaled) return lower_expr(e->kids[0], names);
    auto c = std::make_shared<Expr>(*e);
    c->ty = nullptr;
    if (c->k == Expr::K::Var && c->op_use_id >= 0) {
      auto it = names.find(c->op_use_id);
      if (it == names.end())
        throw lower_error("op-use without a chosen implementation: " +
                          c->name, c->loc);
      c->name = it->second;
      c->op_use_id = -1;
      return c;
    }
    c->op_use_id = -1;
    if (c->annot) {
      auto rewritten = lw.rewrite_annot(c->annot, c->loc);
      c->annot = rewritten ? *rewritten : nullptr;
    }
    for (auto& k : c->kids) k = lower_expr(k, names);
    for (auto& arm : c->arms) {
      auto a = arm;
      a.body = lower_expr(arm.body, names);
      arm = a;
    }
    return c;
  };

  auto make_binding = [&](const Binding& b) -> DeclPtr {
    const Decl& src = *b.impl->src;
    std::map<int, std::string> names;
    for (size_t k = 0; k < b.impl->uses.size(); ++k)
      names[b.impl->uses[k].use_id] = b.sub_names[k];
    auto d = std::make_shared<Decl>();
    d->k = Decl::K::Let;
    d->loc = src.loc;
    d->name = b.name;
    d->body = lower_expr(src.body, names);
    return d;
  };

  // Bindings surface at their impl's declaration position, where every
  // name the body mentions is already in scope.
  std::map<int, std::vector<size_t>> at_decl;  // decl_index -> binding ids
  for (size_t i = 0; i < bindings.size(); ++i)
    at_decl[bindings[i].impl->decl_index].push_back(i);

  std::map<int, std::string> top_names;
  for (const auto& [use_id, node] : top_node)
    top_names[use_id] = node_name[node];

  Program out;
  for (size_t di = 0; di < inferred.prog.size(); ++di) {
    const DeclPtr& d = inferred.prog[di];
    if (auto it = at_decl.find(static_cast<int>(di)); it != at_decl.end())
      for (size_t b : it->second) out.push_back(make_binding(bindings[b]));
    switch (d->k) {
      case Decl::K::Repr:
      case Decl::K::Op:
      case Decl::K::Impl:
        break;  // dissolved
      case Decl::K::Type:
        if (d->alias && type_unresolved(*d->alias)) break;  // repr alias
        out.push_back(d);
        break;
      case Decl::K::Variant:
      case Decl::K::Extern:
        out.push_back(d);
        break;
      case Decl::K::Let: {
        auto c = std::make_shared<Decl>(*d);
        c->body = lower_expr(d->body, top_names);
        if (c->annot) {
          auto rewritten = lw.rewrite_annot(*c->annot, c->loc);
          if (rewritten)
            c->annot = *rewritten;
          else
            c->annot.reset();
        }
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

namespace {

void check_expr_resolved(const ExprPtr& e) {
  if (e->annot && type_unresolved(e->annot))
    throw lower_error("residual repr construct in an annotation", e->loc);
  for (const auto& k : e->kids) check_expr_resolved(k);
  for (const auto& arm : e->arms) check_expr_resolved(arm.body);
}

}  // namespace

void check_resolved(const Program& p) {
  for (const auto& d : p) {
    switch (d->k) {
      case Decl::K::Repr:
        throw lower_error("residual letrepr declaration: " + d->name, d->loc);
      case Decl::K::Op:
        throw lower_error("residual letop declaration: " + d->name, d->loc);
      case Decl::K::Impl:
        throw lower_error("residual letimpl declaration: " + d->name, d->loc);
      default:
        break;
    }
    if (d->alias && type_unresolved(*d->alias))
      throw lower_error("residual repr type in alias: " + d->name, d->loc);
    if (d->scheme_body && type_unresolved(d->scheme_body))
      throw lower_error("residual repr type in signature: " + d->name, d->loc);
    if (d->annot && type_unresolved(*d->annot))
      throw lower_error("residual repr type in annotation: " + d->name,
                        d->loc);
    for (const auto& ctor : d->ctors)
      for (const auto& a : ctor.args)
        if (type_unresolved(a))
          throw lower_error("residual repr type in constructor " + ctor.name,
                            d->loc);
    if (d->body) check_expr_resolved(d->body);
  }
  // The program must still infer cleanly as plain ML.
  infer_program(expand_aliases(p));
}

}  // namespace repml
