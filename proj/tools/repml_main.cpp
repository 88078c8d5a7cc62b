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
//
// repml: representation-selection compiler driver.
//
// Exit codes: 0 success, 2 parse error, 3 type error, 4 no solution,
// 5 timeout, 6 other error (I/O, lowering, solver misuse).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "repml/ast.hpp"
#include "repml/gen.hpp"
#include "repml/pipeline.hpp"

namespace {

bool parse_cost_var(const std::string& kv, repml::CostEnv& env) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  try {
    env[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "repml: picks data representations for programs over abstract types\n"
      "Exit codes: 0 ok, 2 parse error, 3 type error, 4 no solution, "
      "5 timeout, 6 other error"};
  app.require_subcommand(1);

  // ----- compile ------------------------------------------------------
  auto* compile = app.add_subcommand("compile", "Compile one program");
  std::string input;
  std::string solver = "mixed";
  std::vector<std::string> cost_vars;
  std::string cache_path;
  bool write_cache = false;
  long timeout_ms = 60000;
  std::vector<std::string> emit;
  std::string solver_path = "z3";
  int jobs = 1;
  compile->add_option("input", input, "Program to compile")->required();
  compile->add_option("--solver", solver,
                      "exhaustive|bottom-up|greedy|smt|homogeneous|guided|"
                      "mixed|transfer (default mixed)");
  compile->add_option("--cost-var", cost_vars,
                      "Cost variable binding k=v (repeatable)");
  compile->add_option("--cache", cache_path, "Solution cache file");
  compile->add_flag("--write-cache", write_cache,
                    "Write solution skeletons back to --cache");
  compile->add_option("--timeout-ms", timeout_ms, "Solve deadline (default 60000)");
  compile->add_option("--emit", emit,
                      "resolved|tree|smt|json|annotated (repeatable)");
  compile->add_option("--solver-path", solver_path,
                      "External SMT solver binary (solver=smt)");
  compile->add_option("--jobs", jobs, "Parallel partition components");

  // ----- gen ----------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a random benchmark program");
  std::uint64_t seed = 0;
  int size = 0;
  std::string init = "seq";
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--size", size, "Number of code blocks");
  gen->add_option("--init", init, "Initial collection kind: seq|set|map");

  // ----- bench --------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Benchmark solvers on generated programs");
  std::vector<int> sizes;
  std::vector<std::string> solvers;
  int per_size = 3;
  std::uint64_t bench_seed = 0;
  std::vector<std::string> bench_cost_vars;
  long bench_timeout = 60000;
  std::string bench_solver_path = "z3";
  bench->add_option("--size", sizes, "Program size in blocks (repeatable)")
      ->required();
  bench->add_option("--solver", solvers, "Solver to benchmark (repeatable)")
      ->required();
  bench->add_option("--per-size", per_size, "Instances per size (default 3)");
  bench->add_option("--seed", bench_seed, "Base seed");
  bench->add_option("--cost-var", bench_cost_vars,
                    "Cost variable binding k=v (repeatable)");
  bench->add_option("--timeout-ms", bench_timeout, "Per-cell deadline");
  bench->add_option("--solver-path", bench_solver_path,
                    "External SMT solver binary (solver=smt)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile->parsed()) {
      repml::RunConfig rc;
      rc.input = input;
      rc.solver = solver;
      rc.cache_path = cache_path;
      rc.write_cache = write_cache;
      rc.timeout_ms = timeout_ms;
      rc.emit = emit;
      rc.solver_path = solver_path;
      rc.jobs = jobs;
      for (const auto& kv : cost_vars)
        if (!parse_cost_var(kv, rc.cost_vars)) {
          std::cerr << "repml: bad --cost-var '" << kv << "' (want k=v)\n";
          return repml::kExitOtherError;
        }
      repml::CompileArtifacts art = repml::run_compile(rc);
      if (art.exit_code != repml::kExitSuccess) {
        std::cerr << "repml: " << art.message << "\n";
        return art.exit_code;
      }
      for (const auto& target : rc.emit) {
        auto it = art.emitted.find(target);
        if (it == art.emitted.end()) {
          std::cerr << "repml: unknown emit target '" << target << "'\n";
          return repml::kExitOtherError;
        }
        if (rc.emit.size() > 1)
          std::cout << "(* ==== " << target << " ==== *)\n";
        std::cout << it->second;
        if (!it->second.empty() && it->second.back() != '\n') std::cout << "\n";
      }
      std::cerr << "repml: solved '" << input << "' with " << rc.solver
                << ", cost " << art.cost << "\n";
      return repml::kExitSuccess;
    }
    if (gen->parsed()) {
      repml::GenSpec spec{size, init, seed};
      std::cout << repml::gen_program(spec);
      return repml::kExitSuccess;
    }
    // bench
    repml::BenchConfig bc;
    bc.sizes = sizes;
    bc.solvers = solvers;
    bc.per_size = per_size;
    bc.seed = bench_seed;
    bc.timeout_ms = bench_timeout;
    bc.solver_path = bench_solver_path;
    for (const auto& kv : bench_cost_vars)
      if (!parse_cost_var(kv, bc.cost_vars)) {
        std::cerr << "repml: bad --cost-var '" << kv << "' (want k=v)\n";
        return repml::kExitOtherError;
      }
    std::cout << repml::run_bench(bc);
    return repml::kExitSuccess;
  } catch (const repml::CompileError& e) {
    std::cerr << "repml: " << e.what() << "\n";
    return repml::kExitOtherError;
  }
}
