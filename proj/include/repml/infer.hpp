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

#ifndef REPML_INFER_HPP
#define REPML_INFER_HPP

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "repml/ast.hpp"

namespace repml {

enum class UnifyOutcome { Ok, TypeClash, Occurs, ReprConflict };

/// Mutable unification state: a substitution over unification variables and
/// a union-find over representation variables, where each class can carry at
/// most one representation name. Cheap to copy (solvers clone it per branch).
struct UnifCtx {
  std::unordered_map<int, TypePtr> subst;
  mutable std::unordered_map<int, int> parent;
  std::unordered_map<int, std::string> rassign;  // keyed by class root
  int next_uvar = 0;
  int next_rvar = 0;

  int fresh_uvar() { return next_uvar++; }
  int fresh_rvar() { return next_rvar++; }

  int rfind(int x) const;
  UnifyOutcome runite(int a, int b);
  UnifyOutcome assign_repr(int rv, const std::string& name);
  std::optional<std::string> repr_of(int rv) const;

  /// Deep-resolves: follows the substitution, canonicalizes rvar ids to
  /// their class roots, keeps wildcards and representation-assignment
  /// markers intact.
  TypePtr resolve(const TypePtr& t) const;

  /// Structural unification. Wildcards unify with anything without binding;
  /// a representation-assignment marker records its name on the rvar class.
  UnifyOutcome unify(const TypePtr& a, const TypePtr& b);
};

const char* unify_outcome_name(UnifyOutcome o);

/// A polymorphic binding. Ops additionally refresh every `repr` occurrence
/// with a new representation variable at each use site; plain lets share
/// their rvars across all references.
struct Scheme {
  std::vector<std::string> vars;
  TypePtr body;
  bool refresh_rvars = false;
  bool is_op = false;
};

struct OpUseRec {
  int id = -1;
  std::string op;
  CostPtr scale;        // 1.0 unless written with an @ marker
  TypePtr ty;           // as instantiated; resolve under the final ctx
  int owner_impl = -1;  // index into ImplRec list, -1 = outside any impl
  int decl_index = -1;
};

struct ImplRec {
  int decl_index = -1;
  std::string op;
  CostPtr cost;
  TypePtr annot;  // desugared, rvar-numbered, keeps !name markers
  std::vector<int> use_ids;
  DeclPtr src;
  bool synthetic = false;  // produced by lift_lets
};

struct ReprRec {
  std::string name;
  TypePtr pattern;
  TypePtr target;
  int decl_index = -1;
};

struct InferredProgram {
  Program prog;  // alias-expanded input; expr nodes carry op_use_id stamps
  UnifCtx ctx;
  std::vector<OpUseRec> uses;
  std::vector<ImplRec> impls;
  std::vector<ReprRec> reprs;
  std::map<std::string, Scheme> globals;
  std::map<int, Scheme> let_schemes;  // decl index -> generalized scheme
  int annot_max = 0;                  // highest annotation rvar id handed out
};

/// Full type inference over an alias-expanded program. Annotation rvars are
/// numbered 1..annot_max in source order; instantiation-time variables live
/// in a disjoint high id range until the problem is frozen.
InferredProgram infer_program(const Program& alias_expanded);

/// Rewrites polymorphic top-level lets whose generalized type mentions a
/// repr into an op + zero-cost impl pair, so each future reference gets its
/// own representation choice. Monomorphic lets keep their shared rvars (the
/// set-membership example's final let must stay a let).  Recursive lets are
/// never lifted.
Program lift_lets(const Program& alias_expanded);

}  // namespace repml

#endif  // REPML_INFER_HPP
