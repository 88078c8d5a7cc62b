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

#ifndef REPML_LOWER_HPP
#define REPML_LOWER_HPP

#include <utility>
#include <vector>

#include "repml/infer.hpp"
#include "repml/problem.hpp"

namespace repml {

/// Rewrites the annotated program into plain RepML: each distinct
/// (implementation, instantiated type) pair in the solution forest becomes
/// one fresh `let __impl_<op>_<k>` binding (sub-solutions bound first);
/// op-use sites become references to those bindings; representation types
/// are replaced by their concrete layouts under the assignment, defaulting
/// unconstrained representation variables to the first declared matching
/// representation. `items` pairs each top-level op-use index with its
/// solution, exactly as accepted by validate_program.
/// Throws CompileError{Lower} on an inconsistent solution (an internal
/// error after validation) or an unmatched representation pattern.
Program apply_solution(const InferredProgram& inferred,
                       const FrozenProgram& frozen,
                       const std::vector<std::pair<int, SolutionPtr>>& items,
                       const ReprAssignment& assignment);

/// Asserts the output is fully resolved: no letrepr/letop/letimpl
/// declarations, no repr/assignment/wildcard types anywhere, and the
/// program still infers cleanly. Throws CompileError on violation.
void check_resolved(const Program& p);

}  // namespace repml

#endif  // REPML_LOWER_HPP
