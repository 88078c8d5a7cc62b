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

#ifndef REPML_SOLTREE_HPP
#define REPML_SOLTREE_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repml/problem.hpp"

namespace repml {

/// A replayable constraint: either a type equality or a representation
/// assignment on an rvar class. Constraints reference variable ids drawn
/// from the tree's shared arena; any set of constraints can be checked for
/// consistency by replaying it into a fresh unification context.
struct ConstraintItem {
  enum class K { TypeEq, Assign };
  K k = K::TypeEq;
  TypePtr a, b;      // TypeEq
  int rvar = -1;     // Assign
  std::string repr;  // Assign
};

struct ConstraintSet {
  std::vector<ConstraintItem> items;

  void add_eq(TypePtr a, TypePtr b);
  void add_assign(int rvar, std::string repr);
  void append(const ConstraintSet& other);
  bool empty() const { return items.empty(); }
};

/// Applies every item to `ctx`; returns the first failure outcome.
UnifyOutcome replay(const ConstraintSet& cs, UnifCtx& ctx);

/// Reconstruction plan: maps an And node's children back to nested Solution
/// structure (needed once flatten merges And-under-And). A slot is either a
/// direct child index or a nested plan for an absorbed impl.
struct Recon {
  const ImplDef* impl = nullptr;  // null marks the program root
  struct Slot {
    int child = -1;
    std::shared_ptr<const Recon> nested;
  };
  std::vector<Slot> slots;
};
using ReconPtr = std::shared_ptr<const Recon>;

/// Rebuilds the nested Solution for a plan given one chosen sub-solution
/// per direct child.
SolutionPtr recon_build(const Recon& r,
                        const std::vector<SolutionPtr>& chosen);

struct SolNode;
using NodePtr = std::shared_ptr<const SolNode>;

/// The and/or solution tree. And = one impl choice (children: one Or per
/// op-use); Or = the alternatives for one op-use (children: And/Single);
/// Single = a completed sub-solution. Nodes are immutable; operations
/// return new trees.
struct SolNode {
  enum class K { And, Or, Single };
  K k = K::And;

  // And/Single bookkeeping. For And, `cost` is the node's own contribution
  // (impl cost, plus absorbed costs after flatten); for Single it is the
  // full subtree cost with scales applied.
  const ImplDef* impl = nullptr;  // And: null marks the program root
  double cost = 0.0;
  ConstraintSet cons;  // constraints introduced by selecting this node
  ReconPtr recon;      // And only

  // Or.
  std::string op;
  TypePtr use_ty;  // instantiated op-use type (arena ids)
  double scale = 1.0;
  int use_id = -1;

  // Single.
  SolutionPtr sol;

  std::vector<NodePtr> children;
};

/// Shared state for one tree: the problem, the evaluated cost environment,
/// and the fresh-id arena the tree's types draw from.
struct TreeCtx {
  const ProblemInput* problem = nullptr;
  CostEnv env;
  int next_uvar = 0;
  int next_rvar = 0;

  /// Fresh context with counters past every id the tree mentions.
  UnifCtx scratch() const;
};

/// Appendix-B construction: root And over the top-level op-uses; every
/// candidate impl spawns an And child under a new Or; constraints are
/// recorded, not side-effected upward; recursion to the same op at an
/// alpha-equivalent type yields an empty Or.
NodePtr build_tree(const ProblemInput& problem, TreeCtx& tc);

/// Merges And nodes that are direct children of other And nodes; cost and
/// constraints combine additively and the reconstruction plan is preserved.
NodePtr flatten(const NodePtr& t);

/// Propagates constraints and simplifies to fixpoint: contradictory nodes
/// are removed, single-child Ors are replaced by their child, nested Ors
/// are flattened, Ands whose children are all Single become Singles, and
/// (with `prune`) dominated Single siblings of an Or are dropped. Returns
/// nullptr when the whole tree is contradictory.
NodePtr propagate(const NodePtr& t, const TreeCtx& tc, bool prune);

/// Splits a root And's children into connected components by shared
/// unification/representation variables; the root's own constraint items
/// also connect the children they mention. When `members` is given it
/// receives, per component, the root child indices in order (needed to
/// reassemble a full solution through the root's Recon after flatten).
std::vector<NodePtr> partition(const NodePtr& t,
                               std::vector<std::vector<int>>* members = nullptr);

/// Replaces each And whose children are (Ors of) Singles with an Or of all
/// consistent combinations.
NodePtr collapse_leaves(const NodePtr& t, const TreeCtx& tc);

/// Maximally homogeneous representation assignments, built by repeatedly
/// picking a representation (declaration order) and assigning it to every
/// remaining rvar class it is valid for. Returns constrained copies of `t`,
/// one per assignment; only the first when `all_variants` is off. The
/// assignments themselves are exposed for tests via `out_assignments`.
std::vector<NodePtr> homogenize(
    const NodePtr& t, const TreeCtx& tc, bool all_variants,
    std::vector<std::map<int, std::string>>* out_assignments = nullptr);

/// One candidate (sub-)solution produced by materialization.
struct Cand {
  SolutionPtr sol;
  double cost = 0.0;
  ConstraintSet cons;
};

/// Lazy cheapest-first enumeration of a node's valid solutions, without
/// duplicates. Draining the stream yields the exhaustive set.
class Materializer {
 public:
  Materializer(NodePtr root, const TreeCtx& tc);
  ~Materializer();
  std::optional<Cand> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Guided one-shot materialization: one solution per And child, with a
/// bounded repair loop combining constraints from the consistent children.
std::optional<Cand> materialize_guided(const NodePtr& t, const TreeCtx& tc,
                                       const ConstraintSet& initial);

/// Stable indented rendering for `--emit tree` and golden tests.
std::string render_tree(const NodePtr& t, const TreeCtx& tc);

/// Product of Or fan-outs (the solution-space estimate), saturating.
double solution_space_estimate(const NodePtr& t);

}  // namespace repml

#endif  // REPML_SOLTREE_HPP
