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

#ifndef REPML_SOLVERS_HPP
#define REPML_SOLVERS_HPP

#include <chrono>
#include <string>
#include <vector>

#include "repml/cache.hpp"
#include "repml/soltree.hpp"

namespace repml {

/// Wall-clock budget; solvers poll it between tree operations.
struct Deadline {
  std::chrono::steady_clock::time_point at{};
  bool enabled = false;

  static Deadline after_ms(long ms) {
    Deadline d;
    d.at = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
    d.enabled = true;
    return d;
  }
  bool expired() const {
    return enabled && std::chrono::steady_clock::now() >= at;
  }
};

struct SolverStats {
  long long nodes_visited = 0;
  double elapsed_ms = 0.0;
  double solution_space_estimate = 0.0;
};

/// Every returned solution has already been consistency-checked against the
/// tree's constraints (and so passes validate).
struct SolverResult {
  enum class Outcome { Solutions, NoSolution, Timeout, Error };
  Outcome outcome = Outcome::NoSolution;
  std::vector<Cand> solutions;  // cheapest first
  std::string error;            // Outcome::Error only
  SolverStats stats;
};

/// The eight solvers. Each takes a (component) tree rooted at an And with a
/// null impl, as produced by build_tree/partition, and is self-contained:
/// it runs whatever propagate/collapse/materialize steps it needs.
SolverResult solve_exhaustive(const NodePtr& t, const TreeCtx& tc,
                              const Deadline& dl = {});
SolverResult solve_bottom_up(const NodePtr& t, const TreeCtx& tc,
                             const Deadline& dl = {});
SolverResult solve_greedy(const NodePtr& t, const TreeCtx& tc,
                          const Deadline& dl = {});
SolverResult solve_homogeneous(const NodePtr& t, const TreeCtx& tc,
                               const Deadline& dl = {});
SolverResult solve_guided(const NodePtr& t, const TreeCtx& tc,
                          const Deadline& dl = {});
SolverResult solve_mixed(const NodePtr& t, const TreeCtx& tc,
                         const Deadline& dl = {});
SolverResult solve_transfer(const NodePtr& t, const TreeCtx& tc,
                            const SolutionCache& cache,
                            const Deadline& dl = {});
/// Runs `solver_path` on the SMT encoding and decodes its model. A missing
/// binary is reported as Outcome::Error with a distinct message.
SolverResult solve_external_smt(const NodePtr& t, const TreeCtx& tc,
                                const std::string& solver_path,
                                const Deadline& dl = {});

/// Dispatch by CLI name: exhaustive|bottom-up|greedy|smt|homogeneous|
/// guided|mixed|transfer. `cache` is consulted by transfer only;
/// `solver_path` by smt only. Throws CompileError{Solve} on unknown names.
SolverResult run_solver(const std::string& name, const NodePtr& t,
                        const TreeCtx& tc, const SolutionCache& cache,
                        const std::string& solver_path, const Deadline& dl);

/// Drops Or children whose impl is absent from the cache; an Or that would
/// become empty keeps its original children.
NodePtr filter_by_cache(const NodePtr& t, const SolutionCache& cache);

}  // namespace repml

#endif  // REPML_SOLVERS_HPP
