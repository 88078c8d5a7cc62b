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

#include "repml/problem.hpp"

#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "repml/printer.hpp"

namespace repml {

namespace {

void collect_rvars(const TypePtr& t, std::set<int>& out) {
  if (t->k == SemType::K::Repr && t->id >= 0) out.insert(t->id);
  for (const auto& a : t->args) collect_rvars(a, out);
}

TypePtr map_type(const TypePtr& t,
                 const std::function<TypePtr(const TypePtr&)>& leaf) {
  TypePtr mapped = leaf(t);
  if (mapped != t) return mapped;
  if (t->args.empty()) return t;
  auto c = std::make_shared<SemType>(*t);
  for (auto& a : c->args) a = map_type(a, leaf);
  return c;
}

}  // namespace

TypePtr freshen_wildcards(const TypePtr& t, UnifCtx& ctx) {
  return map_type(t, [&](const TypePtr& x) -> TypePtr {
    if (x->k == SemType::K::Wildcard) return SemType::unif(ctx.fresh_uvar());
    return x;
  });
}

std::vector<const ImplDef*> ProblemInput::impls_for(const std::string& op,
                                                    int scope) const {
  std::vector<const ImplDef*> out;
  for (const auto& impl : impls)
    if (impl.op == op && impl.decl_index <= scope) out.push_back(&impl);
  return out;
}

const ReprDef* ProblemInput::find_repr(const std::string& name) const {
  for (const auto& r : reprs)
    if (r.name == name) return &r;
  return nullptr;
}

UnifCtx ProblemInput::base_ctx() const {
  UnifCtx ctx;
  ctx.next_uvar = first_free_uvar;
  ctx.next_rvar = first_free_rvar;
  return ctx;
}

// ---------------------------------------------------------------------------
// Freezing

std::unique_ptr<FrozenProgram> collect_problem(
    const InferredProgram& inferred) {
  auto out = std::make_unique<FrozenProgram>();
  ProblemInput& problem = out->problem;
  UnifCtx ctx = inferred.ctx;  // local copy: resolution only

  int next_canon = inferred.annot_max + 1;
  std::map<int, int>& canon = out->rvar_canon;
  std::map<int, std::string> uvar_names;

  auto canon_of = [&](int rvar) {
    int root = ctx.rfind(rvar);
    auto it = canon.find(root);
    if (it != canon.end()) return it->second;
    int id = root <= inferred.annot_max ? root : next_canon++;
    canon[root] = id;
    return id;
  };

  // Resolve, then canonicalize rvars and turn residual unification
  // variables into rigids.
  std::function<TypePtr(const TypePtr&)> canonize =
      [&](const TypePtr& t) -> TypePtr {
    if (t->k == SemType::K::Unif) {
      auto [it, fresh] = uvar_names.emplace(
          t->id, "_u" + std::to_string(uvar_names.size() + 1));
      (void)fresh;
      return SemType::rigid(it->second);
    }
    auto c = std::make_shared<SemType>(*t);
    if (c->k == SemType::K::Repr && c->id >= 0) c->id = canon_of(c->id);
    for (auto& a : c->args) a = canonize(a);
    return c;
  };
  auto freeze_type = [&](const TypePtr& t) { return canonize(ctx.resolve(t)); };

  auto freeze_use = [&](const OpUseRec& use, int scope) {
    OpUse u;
    u.scale = use.scale;
    u.op = use.op;
    u.ty = freeze_type(use.ty);
    u.use_id = use.id;
    u.scope = scope;
    return u;
  };

  for (const auto& impl : inferred.impls) {
    ImplDef def;
    def.cost = impl.cost;
    def.op = impl.op;
    def.ty = freeze_type(impl.annot);
    def.decl_index = impl.decl_index;
    def.impl_index = static_cast<int>(problem.impls.size());
    def.src = impl.src.get();
    for (int uid : impl.use_ids)
      def.uses.push_back(freeze_use(inferred.uses[uid], impl.decl_index));
    problem.impls.push_back(std::move(def));
  }
  for (const auto& use : inferred.uses) {
    if (use.owner_impl >= 0) continue;
    problem.top_uses.push_back(freeze_use(use, use.decl_index));
  }
  for (const auto& r : inferred.reprs)
    problem.reprs.push_back(ReprDef{r.name, r.pattern, r.target, r.decl_index});

  problem.first_free_uvar = 0;
  problem.first_free_rvar = next_canon;

  // Local rvars: classes appearing in exactly one impl and in no top use.
  std::set<int> top_rvars;
  for (const auto& u : problem.top_uses) collect_rvars(u.ty, top_rvars);
  std::vector<std::set<int>> impl_rvars(problem.impls.size());
  for (size_t i = 0; i < problem.impls.size(); ++i) {
    collect_rvars(problem.impls[i].ty, impl_rvars[i]);
    for (const auto& u : problem.impls[i].uses)
      collect_rvars(u.ty, impl_rvars[i]);
  }
  for (size_t i = 0; i < problem.impls.size(); ++i) {
    for (int rv : impl_rvars[i]) {
      bool elsewhere = top_rvars.count(rv) > 0;
      for (size_t j = 0; j < problem.impls.size() && !elsewhere; ++j)
        if (j != i && impl_rvars[j].count(rv)) elsewhere = true;
      if (!elsewhere) problem.impls[i].local_rvars.push_back(rv);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solutions

bool solution_equal(const SolutionPtr& a, const SolutionPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->impl != b->impl || a->subs.size() != b->subs.size()) return false;
  for (size_t i = 0; i < a->subs.size(); ++i)
    if (!solution_equal(a->subs[i], b->subs[i])) return false;
  return true;
}

std::string solution_brief(const SolutionPtr& s) {
  std::string out = s->impl ? s->impl->op + "#" +
                                  std::to_string(s->impl->impl_index)
                            : "?";
  if (!s->subs.empty()) {
    out += "(";
    for (size_t i = 0; i < s->subs.size(); ++i) {
      if (i) out += ",";
      out += solution_brief(s->subs[i]);
    }
    out += ")";
  }
  return out;
}

double solution_cost(const SolutionPtr& s, const CostEnv& env) {
  double total = eval_cost(s->impl->cost, env);
  for (size_t i = 0; i < s->subs.size(); ++i)
    total += eval_cost(s->impl->uses[i].scale, env) *
             solution_cost(s->subs[i], env);
  return total;
}

// ---------------------------------------------------------------------------
// Validation (the recursive validity check)

/// Steps 4-6: fresh local rvars and fresh type variables for the impl's
/// own (rigid) type variables, applied consistently across the type and
/// the op-uses.
InstantiatedImpl instantiate_impl(const ImplDef& impl, UnifCtx& ctx) {
  std::map<int, int> rvar_map;
  for (int rv : impl.local_rvars) rvar_map[rv] = ctx.fresh_rvar();
  std::map<std::string, TypePtr> rigid_map;
  auto inst = [&](const TypePtr& t) {
    return map_type(t, [&](const TypePtr& x) -> TypePtr {
      if (x->k == SemType::K::Rigid) {
        auto it = rigid_map.find(x->name);
        if (it == rigid_map.end())
          it = rigid_map.emplace(x->name, SemType::unif(ctx.fresh_uvar()))
                   .first;
        return it->second;
      }
      if (x->k == SemType::K::Repr && x->id >= 0) {
        auto rit = rvar_map.find(x->id);
        if (rit != rvar_map.end()) {
          auto c = std::make_shared<SemType>(*x);
          c->id = rit->second;
          c->args[0] = map_type(c->args[0], [&](const TypePtr& y) -> TypePtr {
            if (y->k == SemType::K::Rigid) {
              auto it = rigid_map.find(y->name);
              if (it == rigid_map.end())
                it = rigid_map.emplace(y->name, SemType::unif(ctx.fresh_uvar()))
                         .first;
              return it->second;
            }
            return y;
          });
          return c;
        }
      }
      return x;
    });
  };
  InstantiatedImpl out;
  out.ty = inst(impl.ty);
  out.uses = impl.uses;
  for (auto& u : out.uses) u.ty = inst(u.ty);
  return out;
}

/// Step 7: record every !name marker on its rvar class.
static UnifyOutcome record_assignments(const TypePtr& t, UnifCtx& ctx) {
  if (t->k == SemType::K::ReprAssign) {
    const TypePtr& inner = t->args[0];
    if (inner->k == SemType::K::Repr && inner->id >= 0) {
      UnifyOutcome r = ctx.assign_repr(inner->id, t->name);
      if (r != UnifyOutcome::Ok) return r;
    }
    return record_assignments(inner, ctx);
  }
  for (const auto& a : t->args) {
    UnifyOutcome r = record_assignments(a, ctx);
    if (r != UnifyOutcome::Ok) return r;
  }
  return UnifyOutcome::Ok;
}

/// Step 8: drop the markers.
TypePtr strip_repr_markers(const TypePtr& t) {
  if (t->k == SemType::K::ReprAssign) return strip_repr_markers(t->args[0]);
  if (t->args.empty()) return t;
  auto c = std::make_shared<SemType>(*t);
  for (auto& a : c->args) a = strip_repr_markers(a);
  return c;
}

ReprAssignment snapshot_assignment(const ProblemInput& problem,
                                   const UnifCtx& ctx) {
  ReprAssignment out;
  for (const auto& [root, name] : ctx.rassign) {
    int r = ctx.rfind(root);
    if (r < problem.first_free_rvar) out.by_class[r] = name;
  }
  return out;
}

static bool validate_rec(const ProblemInput& problem, const OpUse& use,
                  const SolutionPtr& sol, UnifCtx& ctx, ValidateResult& res) {
  auto fail = [&](int step, const std::string& msg) {
    res.ok = false;
    res.failed_step = step;
    res.message = "step " + std::to_string(step) + ": " + msg;
    return false;
  };
  if (!sol || !sol->impl)
    return fail(1, "malformed solution: missing implementation");
  const ImplDef& impl = *sol->impl;
  if (impl.op != use.op)
    return fail(1, "solution implements '" + impl.op +
                       "' but the op-use calls '" + use.op + "'");
  if (impl.decl_index > use.scope)
    return fail(1, "implementation of '" + impl.op +
                       "' is not in scope at the op-use");
  if (sol->subs.size() != impl.uses.size())
    return fail(3, "solution has " + std::to_string(sol->subs.size()) +
                       " sub-solutions for " + std::to_string(impl.uses.size()) +
                       " op-uses");

  InstantiatedImpl inst = instantiate_impl(impl, ctx);

  UnifyOutcome r = record_assignments(inst.ty, ctx);
  if (r != UnifyOutcome::Ok)
    return fail(7, std::string("representation assignment conflict (") +
                       unify_outcome_name(r) + ")");
  TypePtr stripped = strip_repr_markers(inst.ty);

  TypePtr use_ty = freshen_wildcards(ctx.resolve(use.ty), ctx);
  r = ctx.unify(stripped, use_ty);
  if (r != UnifyOutcome::Ok) {
    PrintOptions opts{.show_rvars = true};
    return fail(9, std::string(unify_outcome_name(r)) + " between " +
                       print_type(ctx.resolve(stripped), opts) + " and " +
                       print_type(ctx.resolve(use_ty), opts));
  }

  for (size_t i = 0; i < inst.uses.size(); ++i) {
    if (!validate_rec(problem, inst.uses[i], sol->subs[i], ctx, res)) {
      if (res.failed_step < 10) res.failed_step = 10;
      return false;
    }
  }
  return true;
}



ValidateResult validate(const ProblemInput& problem, const OpUse& use,
                        const SolutionPtr& sol, UnifCtx& ctx) {
  ValidateResult res;
  res.ok = validate_rec(problem, use, sol, ctx, res);
  if (res.ok) res.assignment = snapshot_assignment(problem, ctx);
  return res;
}

ValidateResult validate_program(
    const ProblemInput& problem,
    const std::vector<std::pair<int, SolutionPtr>>& items) {
  UnifCtx ctx = problem.base_ctx();
  ValidateResult res;
  res.ok = true;  // a program with no op-uses is trivially valid
  for (const auto& [slot, sol] : items) {
    if (slot < 0 || slot >= static_cast<int>(problem.top_uses.size())) {
      res.ok = false;
      res.message = "solution references an unknown top-level op-use";
      return res;
    }
    res = validate(problem, problem.top_uses[slot], sol, ctx);
    if (!res.ok) return res;
  }
  res.assignment = snapshot_assignment(problem, ctx);
  return res;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

namespace {

struct EnumState {
  const ProblemInput& problem;
  std::vector<std::pair<SolutionPtr, UnifCtx>> enum_use(
      const OpUse& use, const UnifCtx& ctx, std::vector<std::string> stack) {
    std::string key = use.op + "|" + canonical_type(ctx.resolve(use.ty));
    for (const auto& k : stack)
      if (k == key) return {};  // recursion cutoff
    stack.push_back(key);

    std::vector<std::pair<SolutionPtr, UnifCtx>> results;
    for (const ImplDef* impl : problem.impls_for(use.op, use.scope)) {
      UnifCtx c = ctx;
      InstantiatedImpl inst = instantiate_impl(*impl, c);
      if (record_assignments(inst.ty, c) != UnifyOutcome::Ok) continue;
      TypePtr stripped = strip_repr_markers(inst.ty);
      TypePtr use_ty = freshen_wildcards(c.resolve(use.ty), c);
      if (c.unify(stripped, use_ty) != UnifyOutcome::Ok) continue;

      std::vector<std::pair<UnifCtx, std::vector<SolutionPtr>>> combos;
      combos.emplace_back(std::move(c), std::vector<SolutionPtr>{});
      for (const OpUse& u : inst.uses) {
        std::vector<std::pair<UnifCtx, std::vector<SolutionPtr>>> next;
        for (auto& [cc, sols] : combos) {
          for (auto& [s, c2] : enum_use(u, cc, stack)) {
            auto ext = sols;
            ext.push_back(s);
            next.emplace_back(c2, std::move(ext));
          }
        }
        combos = std::move(next);
        if (combos.empty()) break;
      }
      for (auto& [cc, sols] : combos)
        results.emplace_back(Solution::make(impl, sols), cc);
    }
    return results;
  }
};

}  // namespace

std::vector<SolutionPtr> enumerate_valid(const ProblemInput& problem,
                                         const OpUse& use) {
  EnumState st{problem};
  auto raw = st.enum_use(use, problem.base_ctx(), {});
  std::vector<SolutionPtr> out;
  for (auto& [s, ctx] : raw) {
    bool dup = false;
    for (const auto& prev : out)
      if (solution_equal(prev, s)) {
        dup = true;
        break;
      }
    if (dup) continue;
    UnifCtx check = problem.base_ctx();
    if (validate(problem, use, s, check).ok) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Representation application

namespace {

bool match_pattern(const TypePtr& pat, const TypePtr& arg,
                   std::map<std::string, TypePtr>& binding) {
  if (pat->k == SemType::K::Rigid) {
    auto it = binding.find(pat->name);
    if (it == binding.end()) {
      binding[pat->name] = arg;
      return true;
    }
    if (it->second->k == SemType::K::Wildcard) {
      it->second = arg;
      return true;
    }
    return arg->k == SemType::K::Wildcard || type_equal(it->second, arg);
  }
  if (arg->k == SemType::K::Wildcard) return true;
  if (pat->k != arg->k) return false;
  if (pat->k == SemType::K::Con &&
      (pat->name != arg->name || pat->args.size() != arg->args.size()))
    return false;
  if (pat->args.size() != arg->args.size()) return false;
  for (size_t i = 0; i < pat->args.size(); ++i)
    if (!match_pattern(pat->args[i], arg->args[i], binding)) return false;
  return true;
}

}  // namespace

std::optional<TypePtr> apply_representation(const ReprDef& repr,
                                            const TypePtr& arg) {
  std::map<std::string, TypePtr> binding;
  if (!match_pattern(repr.pattern, arg, binding)) return std::nullopt;
  return map_type(repr.target, [&](const TypePtr& x) -> TypePtr {
    if (x->k == SemType::K::Rigid) {
      auto it = binding.find(x->name);
      if (it != binding.end()) return it->second;
      return SemType::wildcard();
    }
    return x;
  });
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using json = nlohmann::ordered_json;

json use_to_json(const OpUse& u) {
  PrintOptions opts{.show_rvars = true};
  return json{{"scale", print_cost(u.scale)},
              {"op", u.op},
              {"type", print_type(u.ty, opts)},
              {"use_id", u.use_id}};
}

json solution_to_json(const SolutionPtr& s) {
  json subs = json::array();
  for (const auto& sub : s->subs) subs.push_back(solution_to_json(sub));
  return json{{"impl", s->impl->op + "@" + std::to_string(s->impl->decl_index)},
              {"subs", std::move(subs)}};
}

}  // namespace

std::string problem_to_json(const ProblemInput& problem) {
  PrintOptions opts{.show_rvars = true};
  json impls = json::array();
  for (const auto& impl : problem.impls) {
    json uses = json::array();
    for (const auto& u : impl.uses) uses.push_back(use_to_json(u));
    impls.push_back(json{{"cost", print_cost(impl.cost)},
                         {"op", impl.op},
                         {"type", print_type(impl.ty, opts)},
                         {"decl_index", impl.decl_index},
                         {"uses", std::move(uses)}});
  }
  json tops = json::array();
  for (const auto& u : problem.top_uses) tops.push_back(use_to_json(u));
  json reprs = json::array();
  for (const auto& r : problem.reprs)
    reprs.push_back(json{{"name", r.name},
                         {"pattern", print_type(r.pattern)},
                         {"target", print_type(r.target)}});
  json out{{"impls", std::move(impls)},
           {"top_uses", std::move(tops)},
           {"reprs", std::move(reprs)}};
  return out.dump(2);
}

std::string solutions_to_json(
    const ProblemInput& problem,
    const std::vector<std::pair<int, SolutionPtr>>& items,
    const CostEnv& env) {
  json arr = json::array();
  double total = 0.0;
  for (const auto& [slot, sol] : items) {
    double c = solution_cost(sol, env) *
               eval_cost(problem.top_uses[slot].scale, env);
    total += c;
    arr.push_back(json{{"use", problem.top_uses[slot].op},
                       {"use_id", problem.top_uses[slot].use_id},
                       {"solution", solution_to_json(sol)},
                       {"cost", c}});
  }
  json out{{"solutions", std::move(arr)}, {"total_cost", total}};
  return out.dump(2);
}

std::string dump_annotated(const InferredProgram& inferred,
                           const FrozenProgram& frozen) {
  PrintOptions opts{.show_rvars = true};
  std::ostringstream out;
  // Map impl decl index -> frozen impl.
  std::map<int, const ImplDef*> impl_by_decl;
  for (const auto& impl : frozen.problem.impls)
    impl_by_decl[impl.decl_index] = &impl;

  for (size_t i = 0; i < inferred.prog.size(); ++i) {
    const DeclPtr& d = inferred.prog[i];
    if (d->k == Decl::K::Impl) {
      auto it = impl_by_decl.find(static_cast<int>(i));
      if (it != impl_by_decl.end()) {
        const ImplDef& impl = *it->second;
        out << "letimpl[" << print_cost(impl.cost) << "] " << impl.op << " : "
            << print_type(impl.ty, opts) << " =\n  "
            << print_expr(d->body, opts) << "\n";
        for (const auto& u : impl.uses)
          out << "  (* use " << u.use_id << ": @" << print_cost(u.scale) << " "
              << u.op << " : " << print_type(u.ty, opts) << " *)\n";
        out << "\n";
        continue;
      }
    }
    out << print_decl(d, opts) << "\n\n";
  }
  if (!frozen.problem.top_uses.empty()) {
    out << "(* top-level op-uses *)\n";
    for (const auto& u : frozen.problem.top_uses)
      out << "(* use " << u.use_id << ": @" << print_cost(u.scale) << " "
          << u.op << " : " << print_type(u.ty, opts) << " *)\n";
  }
  return out.str();
}

}  // namespace repml
