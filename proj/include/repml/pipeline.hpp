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
// Driver pipeline: parse -> expand -> lift -> infer -> collect ->
// build_tree -> propagate/flatten/partition -> solver per component ->
// apply_solution -> check_resolved, plus the benchmark harness.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "repml/cost.hpp"
#include "repml/problem.hpp"

namespace repml {

// Exit-code discipline (also documented in --help and the README).
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitTypeError = 3;
inline constexpr int kExitNoSolution = 4;
inline constexpr int kExitTimeout = 5;
inline constexpr int kExitOtherError = 6;

struct RunConfig {
  std::string input;   // path of the program to compile
  std::string source;  // when non-empty, compiled instead of reading input
  std::string solver = "mixed";
  CostEnv cost_vars;
  std::string cache_path;  // read when set; written back with write_cache
  bool write_cache = false;
  long timeout_ms = 60000;
  std::vector<std::string> emit{};  // subset of kEmitTargets
  std::string solver_path = "z3";   // external SMT binary for solver=smt
  int jobs = 1;                     // parallel partition components
};

inline const std::vector<std::string> kEmitTargets = {
    "resolved", "tree", "smt", "json", "annotated"};

struct CompileArtifacts {
  int exit_code = kExitSuccess;
  std::string message;  // diagnostic for non-zero exits
  double cost = 0.0;    // total cost of the chosen solution
  std::vector<std::pair<int, SolutionPtr>> items;  // per top-level op-use
  ReprAssignment assignment;
  // target name -> payload, one entry per requested emit target
  std::map<std::string, std::string> emitted;
};

CompileArtifacts run_compile(const RunConfig& config);

struct BenchConfig {
  std::vector<int> sizes;
  std::vector<std::string> solvers;
  int per_size = 3;  // instances per size; init kinds cycle seq/set/map
  std::uint64_t seed = 0;
  CostEnv cost_vars;
  long timeout_ms = 60000;
  std::string solver_path = "z3";
};

// CSV report: one header line, then one row per (instance, solver) with
// {size, seed, solver, outcome, elapsed_ms, cost, normalized_cost}.
// Costs are normalized to the best completed cost per instance.
std::string run_bench(const BenchConfig& config);

}  // namespace repml
