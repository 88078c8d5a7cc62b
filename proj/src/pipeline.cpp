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

#include "repml/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

#include "repml/alias.hpp"
#include "repml/cache.hpp"
#include "repml/gen.hpp"
#include "repml/infer.hpp"
#include "repml/lower.hpp"
#include "repml/parser.hpp"
#include "repml/printer.hpp"
#include "repml/smt.hpp"
#include "repml/solvers.hpp"

namespace repml {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw CompileError(CompileError::Stage::Io, Loc{},
                       "cannot open input file '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int stage_exit(CompileError::Stage stage) {
  switch (stage) {
    case CompileError::Stage::Parse:
      return kExitParseError;
    case CompileError::Stage::Expand:
    case CompileError::Stage::Infer:
      return kExitTypeError;
    case CompileError::Stage::Solve:
    case CompileError::Stage::Lower:
    case CompileError::Stage::Io:
      return kExitOtherError;
  }
  return kExitOtherError;
}

SolverResult solve_component(const std::string& solver, const NodePtr& comp,
                             const TreeCtx& tc, const SolutionCache& cache,
                             const std::string& solver_path,
                             const Deadline& dl) {
  return run_solver(solver, comp, tc, cache, solver_path, dl);
}

}  // namespace

CompileArtifacts run_compile(const RunConfig& config) {
  CompileArtifacts art;
  try {
    std::string src =
        config.source.empty() ? read_file(config.input) : config.source;
    Program parsed = parse_program(src);
    Program lifted = lift_lets(expand_aliases(parsed));
    InferredProgram inferred = infer_program(lifted);
    std::unique_ptr<FrozenProgram> frozen = collect_problem(inferred);
    const ProblemInput& problem = frozen->problem;

    SolutionCache cache;
    if (!config.cache_path.empty()) {
      std::ifstream probe(config.cache_path);
      // A missing cache file is only an error when we cannot create it.
      if (probe || !config.write_cache)
        cache = load_cache(config.cache_path);
    }

    TreeCtx tc{&problem, config.cost_vars, problem.first_free_uvar,
               problem.first_free_rvar};
    NodePtr tree = build_tree(problem, tc);

    auto wants = [&](const std::string& t) {
      for (const auto& e : config.emit)
        if (e == t) return true;
      return false;
    };
    if (wants("tree")) art.emitted["tree"] = render_tree(tree, tc);
    if (wants("smt")) art.emitted["smt"] = encode_smt(tree, tc);
    if (wants("json")) art.emitted["json"] = problem_to_json(problem);
    if (wants("annotated"))
      art.emitted["annotated"] = dump_annotated(inferred, *frozen);

    NodePtr pruned = propagate(tree, tc, /*prune=*/false);
    if (!pruned) {
      art.exit_code = kExitNoSolution;
      art.message = "no solution: representation constraints are contradictory";
      return art;
    }
    NodePtr flat = flatten(pruned);
    std::vector<std::vector<int>> members;
    std::vector<NodePtr> components = partition(flat, &members);

    Deadline dl = config.timeout_ms > 0 ? Deadline::after_ms(config.timeout_ms)
                                        : Deadline{};
    std::vector<SolverResult> outcomes(components.size());
    if (config.jobs > 1 && components.size() > 1) {
      std::vector<std::future<SolverResult>> futs;
      for (const auto& comp : components)
        futs.push_back(std::async(std::launch::async, solve_component,
                                  config.solver, comp, std::cref(tc),
                                  std::cref(cache), config.solver_path, dl));
      for (size_t i = 0; i < futs.size(); ++i) outcomes[i] = futs[i].get();
    } else {
      for (size_t i = 0; i < components.size(); ++i)
        outcomes[i] = solve_component(config.solver, components[i], tc, cache,
                                      config.solver_path, dl);
    }

    // Each component solution's subs line up with the component's root
    // children; route them back to the flattened root's child slots, then
    // let the root Recon rebuild one solution per top-level op-use.
    std::vector<SolutionPtr> chosen(flat->children.size());
    for (size_t c = 0; c < outcomes.size(); ++c) {
      const SolverResult& r = outcomes[c];
      switch (r.outcome) {
        case SolverResult::Outcome::Solutions:
          break;
        case SolverResult::Outcome::NoSolution:
          art.exit_code = kExitNoSolution;
          art.message = "no solution: an op-use has no valid implementation";
          return art;
        case SolverResult::Outcome::Timeout:
          art.exit_code = kExitTimeout;
          art.message = "solver timed out after " +
                        std::to_string(config.timeout_ms) + " ms";
          return art;
        case SolverResult::Outcome::Error:
          art.exit_code = kExitOtherError;
          art.message = "solver error: " + r.error;
          return art;
      }
      const SolutionPtr& comp_sol = r.solutions.front().sol;
      if (comp_sol->subs.size() != members[c].size())
        throw CompileError(CompileError::Stage::Solve, Loc{},
                           "component solution arity mismatch");
      for (size_t i = 0; i < members[c].size(); ++i)
        chosen[members[c][i]] = comp_sol->subs[i];
    }
    SolutionPtr full = flat->recon
                           ? recon_build(*flat->recon, chosen)
                           : nullptr;
    size_t top_count = full ? full->subs.size() : 0;
    if (top_count != problem.top_uses.size())
      throw CompileError(CompileError::Stage::Solve, Loc{},
                         "solution does not cover every top-level op-use");
    for (size_t u = 0; u < top_count; ++u)
      art.items.emplace_back(static_cast<int>(u), full->subs[u]);

    ValidateResult va = validate_program(problem, art.items);
    if (!va.ok)
      throw CompileError(CompileError::Stage::Solve, Loc{},
                         "solver produced an invalid solution: " + va.message);
    art.assignment = va.assignment;
    art.cost = 0.0;
    for (const auto& [idx, sol] : art.items)
      art.cost += eval_cost(problem.top_uses[idx].scale, config.cost_vars) *
                  solution_cost(sol, config.cost_vars);

    Program resolved = apply_solution(inferred, *frozen, art.items, va.assignment);
    check_resolved(resolved);
    if (wants("resolved")) art.emitted["resolved"] = print_program(resolved);
    if (wants("json"))
      art.emitted["json"] = solutions_to_json(problem, art.items, config.cost_vars);

    if (!config.cache_path.empty() && config.write_cache) {
      for (const auto& [idx, sol] : art.items) cache.add(sol);
      save_cache(cache, config.cache_path);
    }
  } catch (const CompileError& e) {
    art.exit_code = stage_exit(e.stage);
    art.message = e.what();
  }
  return art;
}

std::string run_bench(const BenchConfig& config) {
  static const char* kInits[] = {"seq", "set", "map"};
  std::ostringstream csv;
  csv << "size,seed,solver,outcome,elapsed_ms,cost,normalized_cost\n";
  for (int size : config.sizes) {
    for (int i = 0; i < config.per_size; ++i) {
      std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
      GenSpec spec{size, kInits[i % 3], seed};
      std::string src = gen_program(spec);

      struct Cell {
        std::string outcome;
        double elapsed_ms = 0.0;
        double cost = 0.0;
      };
      std::vector<Cell> cells;
      double best = 0.0;
      bool any = false;
      for (const auto& solver : config.solvers) {
        RunConfig rc;
        rc.source = src;
        rc.input = "<generated>";
        rc.solver = solver;
        rc.cost_vars = config.cost_vars;
        rc.timeout_ms = config.timeout_ms;
        rc.solver_path = config.solver_path;
        auto t0 = std::chrono::steady_clock::now();
        CompileArtifacts art = run_compile(rc);
        Cell cell;
        cell.elapsed_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        if (art.exit_code == kExitSuccess) {
          cell.outcome = "ok";
          cell.cost = art.cost;
          if (!any || art.cost < best) best = art.cost;
          any = true;
        } else if (art.exit_code == kExitTimeout) {
          cell.outcome = "timeout";
        } else if (art.exit_code == kExitNoSolution) {
          cell.outcome = "nosolution";
        } else {
          cell.outcome = "error";
        }
        cells.push_back(cell);
      }
      for (size_t s = 0; s < config.solvers.size(); ++s) {
        const Cell& cell = cells[s];
        csv << size << ',' << seed << ',' << config.solvers[s] << ','
            << cell.outcome << ',' << cell.elapsed_ms << ',';
        if (cell.outcome == "ok") {
          csv << cell.cost << ',';
          if (best > 0.0)
            csv << cell.cost / best;
          else
            csv << 1.0;
        } else {
          csv << ',';
        }
        csv << '\n';
      }
    }
  }
  return csv.str();
}

}  // namespace repml
