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

#ifndef REPML_PROBLEM_HPP
#define REPML_PROBLEM_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repml/cost.hpp"
#include "repml/infer.hpp"

namespace repml {

/// One operation call site in the frozen problem.
struct OpUse {
  CostPtr scale;
  std::string op;
  TypePtr ty;      // canonical: rigids + canonical rvar ids, no uvars
  int use_id = -1; // stable id from inference (maps back to the AST)
  int scope = -1;  // an impl is visible iff impl.decl_index <= scope
};

/// One costed implementation in the frozen problem.
struct ImplDef {
  CostPtr cost;
  std::string op;
  TypePtr ty;  // desugared annotation, !name markers kept
  std::vector<OpUse> uses;
  int decl_index = -1;
  int impl_index = -1;  // position in ProblemInput::impls
  const Decl* src = nullptr;
  // Rvar classes appearing in this impl but nowhere else; refreshed on every
  // instantiation.
  std::vector<int> local_rvars;
};

struct ReprDef {
  std::string name;
  TypePtr pattern;
  TypePtr target;
  int decl_index = -1;
};

/// The frozen constrained-optimization problem: all impls, the op-uses
/// occurring outside impls, and the representation catalogue.
struct ProblemInput {
  std::vector<ImplDef> impls;
  std::vector<OpUse> top_uses;
  std::vector<ReprDef> reprs;
  int first_free_uvar = 0;  // validators draw fresh ids from here
  int first_free_rvar = 0;

  std::vector<const ImplDef*> impls_for(const std::string& op,
                                        int scope) const;
  const ReprDef* find_repr(const std::string& name) const;

  /// Fresh working context for validation/search over this problem.
  UnifCtx base_ctx() const;
};

/// Freezing renumbers rvar classes canonically: classes containing an
/// annotation rvar keep the smallest annotation id; the rest get sequential
/// ids starting right after the highest annotation id, in encounter order
/// (impls in declaration order, then top uses). Residual unification
/// variables become rigid type variables.
struct FrozenProgram {
  ProblemInput problem;
  // Canonical rvar class id for each inference-time rvar that survived.
  std::map<int, int> rvar_canon;
};

std::unique_ptr<FrozenProgram> collect_problem(const InferredProgram& inferred);

/// A solution assigns an impl to an op-use and, recursively, solutions to
/// the impl's own op-uses.
struct Solution;
using SolutionPtr = std::shared_ptr<const Solution>;
struct Solution {
  const ImplDef* impl = nullptr;
  std::vector<SolutionPtr> subs;

  static SolutionPtr make(const ImplDef* impl,
                          std::vector<SolutionPtr> subs = {}) {
    auto s = std::make_shared<Solution>();
    s->impl = impl;
    s->subs = std::move(subs);
    return s;
  }
};

bool solution_equal(const SolutionPtr& a, const SolutionPtr& b);
std::string solution_brief(const SolutionPtr& s);  // e.g. contains(fold())

/// Representation choice per canonical rvar class.
struct ReprAssignment {
  std::map<int, std::string> by_class;
};

struct ValidateResult {
  bool ok = false;
  int failed_step = 0;    // Appendix-A step number when !ok
  std::string message;
  ReprAssignment assignment;  // restricted to the problem's frozen rvars
};

/// Building blocks shared with the solution-tree layer: steps 4-6
/// instantiation (fresh local rvar classes and fresh type variables for the
/// impl's rigids, applied to the type and the op-uses alike), marker
/// stripping, wildcard freshening, and the assignment snapshot restricted to
/// the problem's frozen rvar classes.
struct InstantiatedImpl {
  TypePtr ty;
  std::vector<OpUse> uses;
};
InstantiatedImpl instantiate_impl(const ImplDef& impl, UnifCtx& ctx);
TypePtr strip_repr_markers(const TypePtr& t);
TypePtr freshen_wildcards(const TypePtr& t, UnifCtx& ctx);
ReprAssignment snapshot_assignment(const ProblemInput& problem,
                                   const UnifCtx& ctx);

/// The Appendix A recursive validity check. `ctx` accumulates unification
/// state and representation assignments across recursive calls; pass
/// problem.base_ctx() for a standalone check.
ValidateResult validate(const ProblemInput& problem, const OpUse& use,
                        const SolutionPtr& sol, UnifCtx& ctx);

/// Validates one solution per top-level op-use under a single shared
/// context (rvar classes spanning several top uses must agree).
ValidateResult validate_program(
    const ProblemInput& problem,
    const std::vector<std::pair<int, SolutionPtr>>& items);

/// Exhaustive oracle: every valid solution for `use`, deduplicated,
/// ordered lexicographically by impl declaration index then sub-solutions.
/// Recursion is cut off when the same op recurs at an alpha-equivalent type.
std::vector<SolutionPtr> enumerate_valid(const ProblemInput& problem,
                                         const OpUse& use);

/// Fig.-5 cost: eval(impl.cost) + sum of scaled sub-solution costs.
double solution_cost(const SolutionPtr& s, const CostEnv& env);

/// One-way application of a representation to a repr argument type:
/// matches `arg` against the pattern (binding the pattern's variables,
/// wildcards in `arg` match anything) and substitutes into the target.
std::optional<TypePtr> apply_representation(const ReprDef& repr,
                                            const TypePtr& arg);

/// Serializations for `--emit json` and `--emit annotated`.
std::string problem_to_json(const ProblemInput& problem);
std::string solutions_to_json(
    const ProblemInput& problem,
    const std::vector<std::pair<int, SolutionPtr>>& items, const CostEnv& env);
std::string dump_annotated(const InferredProgram& inferred,
                           const FrozenProgram& frozen);

}  // namespace repml

#endif  // REPML_PROBLEM_HPP
