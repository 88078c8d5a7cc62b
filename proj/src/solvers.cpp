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

#include "repml/solvers.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "repml/smt.hpp"

namespace repml {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

long long count_nodes(const NodePtr& n) {
  long long total = 1;
  for (const auto& c : n->children) total += count_nodes(c);
  return total;
}

SolverResult finish(SolverResult r, Clock::time_point start) {
  r.stats.elapsed_ms = ms_since(start);
  return r;
}

SolverResult timeout_result(SolverStats stats) {
  SolverResult r;
  r.outcome = SolverResult::Outcome::Timeout;
  r.stats = stats;
  return r;
}

/// Reads program solutions off a reduced tree: a Single root is one
/// solution; an Or root of Singles is the full set.
bool extract_solutions(const NodePtr& t, std::vector<Cand>& out) {
  if (t->k == SolNode::K::Single) {
    out.push_back({t->sol, t->cost, t->cons});
    return true;
  }
  if (t->k == SolNode::K::Or) {
    for (const auto& c : t->children) {
      if (c->k != SolNode::K::Single) return false;
      ConstraintSet cons = t->cons;
      cons.append(c->cons);
      out.push_back({c->sol, t->scale * c->cost, std::move(cons)});
    }
    return true;
  }
  return false;
}

/// The Appendix-B endpoint loop: propagate and collapse leaves until the
/// tree is an Or of Singles (or one Single). Returns NoSolution when the
/// tree is contradictory, Timeout when the deadline passes.
SolverResult exhaust_loop(NodePtr t, const TreeCtx& tc, bool prune,
                          const Deadline& dl) {
  SolverResult r;
  for (int iter = 0; iter < 1000; ++iter) {
    if (dl.expired()) return timeout_result(r.stats);
    t = propagate(t, tc, prune);
    if (!t) {
      r.outcome = SolverResult::Outcome::NoSolution;
      return r;
    }
    r.stats.nodes_visited += count_nodes(t);
    std::vector<Cand> sols;
    if (extract_solutions(t, sols)) {
      std::stable_sort(sols.begin(), sols.end(),
                       [](const Cand& a, const Cand& b) {
                         return a.cost < b.cost;
                       });
      r.outcome = SolverResult::Outcome::Solutions;
      r.solutions = std::move(sols);
      return r;
    }
    if (dl.expired()) return timeout_result(r.stats);
    t = collapse_leaves(t, tc);
  }
  r.outcome = SolverResult::Outcome::NoSolution;
  return r;
}

}  // namespace

SolverResult solve_exhaustive(const NodePtr& t, const TreeCtx& tc,
                              const Deadline& dl) {
  auto start = Clock::now();
  SolverResult r = exhaust_loop(t, tc, /*prune=*/false, dl);
  r.stats.solution_space_estimate = solution_space_estimate(t);
  return finish(std::move(r), start);
}

SolverResult solve_bottom_up(const NodePtr& t, const TreeCtx& tc,
                             const Deadline& dl) {
  auto start = Clock::now();
  SolverResult r = exhaust_loop(t, tc, /*prune=*/true, dl);
  r.stats.solution_space_estimate = solution_space_estimate(t);
  // Whatever pruning left at the root, only the cheapest is non-redundant.
  if (r.outcome == SolverResult::Outcome::Solutions && r.solutions.size() > 1)
    r.solutions.resize(1);
  return finish(std::move(r), start);
}

SolverResult solve_greedy(const NodePtr& t, const TreeCtx& tc,
                          const Deadline& dl) {
  auto start = Clock::now();
  SolverResult r;
  NodePtr t0 = propagate(t, tc, /*prune=*/false);
  if (!t0) return finish(std::move(r), start);
  r.stats.nodes_visited = count_nodes(t0);
  r.stats.solution_space_estimate = solution_space_estimate(t0);
  if (dl.expired()) return finish(timeout_result(r.stats), start);
  Materializer m(t0, tc);
  if (auto c = m.next()) {
    r.outcome = SolverResult::Outcome::Solutions;
    r.solutions.push_back(std::move(*c));
  }
  return finish(std::move(r), start);
}

SolverResult solve_homogeneous(const NodePtr& t, const TreeCtx& tc,
                               const Deadline& dl) {
  auto start = Clock::now();
  SolverResult r;
  NodePtr t0 = propagate(t, tc, /*prune=*/false);
  if (!t0) return finish(std::move(r), start);
  r.stats.solution_space_estimate = solution_space_estimate(t0);
  if (dl.expired()) return finish(timeout_result(r.stats), start);
  std::vector<NodePtr> variants = homogenize(t0, tc, /*all_variants=*/false);
  if (variants.empty()) return finish(std::move(r), start);
  NodePtr v = propagate(variants[0], tc, /*prune=*/false);
  if (!v) return finish(std::move(r), start);
  r.stats.nodes_visited = count_nodes(v);
  if (dl.expired()) return finish(timeout_result(r.stats), start);
  Materializer m(v, tc);
  if (auto c = m.next()) {
    r.outcome = SolverResult::Outcome::Solutions;
    r.solutions.push_back(std::move(*c));
  }
  return finish(std::move(r), start);
}

SolverResult solve_guided(const NodePtr& t, const TreeCtx& tc,
                          const Deadline& dl) {
  auto start = Clock::now();
  SolverResult r;
  NodePtr t0 = propagate(t, tc, /*prune=*/false);
  if (!t0) return finish(std::move(r), start);
  r.stats.nodes_visited = count_nodes(t0);
  r.stats.solution_space_estimate = solution_space_estimate(t0);
  if (dl.expired()) return finish(timeout_result(r.stats), start);
  if (auto c = materialize_guided(t0, tc, {})) {
    r.outcome = SolverResult::Outcome::Solutions;
    r.solutions.push_back(std::move(*c));
  }
  return finish(std::move(r), start);
}

SolverResult solve_mixed(const NodePtr& t, const TreeCtx& tc,
                         const Deadline& dl) {
  auto start = Clock::now();
  SolverResult r;
  NodePtr t0 = propagate(flatten(t), tc, /*prune=*/false);
  if (!t0) return finish(std::move(r), start);
  double est = solution_space_estimate(t0);
  r.stats.solution_space_estimate = est;
  r.stats.nodes_visited = count_nodes(t0);
  if (dl.expired()) return finish(timeout_result(r.stats), start);

  if (est <= 100000.0) {
    SolverResult total = solve_bottom_up(t0, tc, dl);
    total.stats.solution_space_estimate = est;
    return finish(std::move(total), start);
  }

  // Heuristics: homogeneous and guided on the root, plus guided on each
  // maximally homogeneous alternative; cheapest consistent answer wins.
  std::vector<Cand> cands;
  auto take = [&cands](SolverResult sub) {
    if (sub.outcome == SolverResult::Outcome::Solutions)
      cands.push_back(std::move(sub.solutions[0]));
  };
  take(solve_homogeneous(t0, tc, dl));
  if (dl.expired() && cands.empty())
    return finish(timeout_result(r.stats), start);
  take(solve_guided(t0, tc, dl));
  for (const NodePtr& v : homogenize(t0, tc, /*all_variants=*/true)) {
    if (dl.expired()) break;
    NodePtr vp = propagate(v, tc, /*prune=*/false);
    if (vp) take(solve_guided(vp, tc, dl));
  }
  if (cands.empty()) {
    if (dl.expired()) return finish(timeout_result(r.stats), start);
    return finish(std::move(r), start);
  }
  auto best = std::min_element(
      cands.begin(), cands.end(),
      [](const Cand& a, const Cand& b) { return a.cost < b.cost; });
  r.outcome = SolverResult::Outcome::Solutions;
  r.solutions.push_back(std::move(*best));
  return finish(std::move(r), start);
}

NodePtr filter_by_cache(const NodePtr& t, const SolutionCache& cache) {
  auto out = std::make_shared<SolNode>(*t);
  for (auto& c : out->children) c = filter_by_cache(c, cache);
  if (out->k != SolNode::K::Or) return out;
  std::vector<NodePtr> kept;
  for (const auto& c : out->children) {
    const ImplDef* impl =
        c->k == SolNode::K::Single ? (c->sol ? c->sol->impl : nullptr)
                                   : c->impl;
    if (impl && cache.contains_impl(impl_fingerprint(*impl)))
      kept.push_back(c);
  }
  if (!kept.empty()) out->children = std::move(kept);
  return out;
}

SolverResult solve_transfer(const NodePtr& t, const TreeCtx& tc,
                            const SolutionCache& cache, const Deadline& dl) {
  return solve_mixed(filter_by_cache(t, cache), tc, dl);
}

SolverResult solve_external_smt(const NodePtr& t, const TreeCtx& tc,
                                const std::string& solver_path,
                                const Deadline& dl) {
  auto start = Clock::now();
  SolverResult r;

  // Resolve the binary up front so a missing solver is a distinct error.
  std::string resolved;
  if (solver_path.find('/') != std::string::npos) {
    if (access(solver_path.c_str(), X_OK) == 0) resolved = solver_path;
  } else if (const char* path_env = std::getenv("PATH")) {
    std::istringstream dirs(path_env);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      std::string full = dir + "/" + solver_path;
      if (access(full.c_str(), X_OK) == 0) {
        resolved = full;
        break;
      }
    }
  }
  if (resolved.empty()) {
    r.outcome = SolverResult::Outcome::Error;
    r.error = "SMT solver binary not found: " + solver_path;
    return finish(std::move(r), start);
  }

  NodePtr t0 = propagate(t, tc, /*prune=*/false);
  if (!t0) return finish(std::move(r), start);
  r.stats.nodes_visited = count_nodes(t0);
  r.stats.solution_space_estimate = solution_space_estimate(t0);
  SmtEncoding enc = encode_smt_tree(t0, tc);

  char tmpl[] = "/tmp/repml_smt_XXXXXX";
  int fd = mkstemp(tmpl);
  if (fd < 0) {
    r.outcome = SolverResult::Outcome::Error;
    r.error = "cannot create temporary SMT file";
    return finish(std::move(r), start);
  }
  {
    std::ofstream out(tmpl);
    out << enc.text;
  }
  close(fd);

  std::string cmd = "'" + resolved + "' '" + tmpl + "' 2>&1";
  if (dl.enabled) {
    long remain_s = std::max<long>(
        1, std::chrono::duration_cast<std::chrono::seconds>(dl.at -
                                                            Clock::now())
               .count());
    cmd = "timeout " + std::to_string(remain_s) + " " + cmd;
  }
  std::string output;
  if (FILE* pipe = popen(cmd.c_str(), "r")) {
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    int status = pclose(pipe);
    if (status == 124 << 8) {  // `timeout` exit status
      std::remove(tmpl);
      return finish(timeout_result(r.stats), start);
    }
  } else {
    std::remove(tmpl);
    r.outcome = SolverResult::Outcome::Error;
    r.error = "cannot launch SMT solver process";
    return finish(std::move(r), start);
  }
  std::remove(tmpl);

  if (output.find("unsat") != std::string::npos) {
    r.outcome = SolverResult::Outcome::NoSolution;
    return finish(std::move(r), start);
  }
  if (output.find("sat") == std::string::npos) {
    r.outcome = SolverResult::Outcome::Error;
    r.error = "SMT solver returned no verdict: " + output.substr(0, 200);
    return finish(std::move(r), start);
  }
  if (auto c = decode_smt_model(enc, tc, output)) {
    r.outcome = SolverResult::Outcome::Solutions;
    r.solutions.push_back(std::move(*c));
    return finish(std::move(r), start);
  }
  r.outcome = SolverResult::Outcome::Error;
  r.error = "cannot decode SMT model";
  return finish(std::move(r), start);
}

SolverResult run_solver(const std::string& name, const NodePtr& t,
                        const TreeCtx& tc, const SolutionCache& cache,
                        const std::string& solver_path, const Deadline& dl) {
  if (name == "exhaustive") return solve_exhaustive(t, tc, dl);
  if (name == "bottom-up") return solve_bottom_up(t, tc, dl);
  if (name == "greedy") return solve_greedy(t, tc, dl);
  if (name == "smt")
    return solve_external_smt(t, tc, solver_path.empty() ? "z3" : solver_path,
                              dl);
  if (name == "homogeneous") return solve_homogeneous(t, tc, dl);
  if (name == "guided") return solve_guided(t, tc, dl);
  if (name == "mixed") return solve_mixed(t, tc, dl);
  if (name == "transfer") return solve_transfer(t, tc, cache, dl);
  throw CompileError(CompileError::Stage::Solve, {},
                     "unknown solver: " + name);
}

}  // namespace repml
