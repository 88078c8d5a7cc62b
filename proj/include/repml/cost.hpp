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

#ifndef REPML_COST_HPP
#define REPML_COST_HPP

#include <map>
#include <string>

#include "repml/ast.hpp"

namespace repml {

using CostEnv = std::map<std::string, double>;

/// Evaluates a cost expression under user-supplied constants. All cost
/// variables must be bound; `log` is the natural logarithm. Throws
/// CompileError{Solve} on unbound variables, division by zero, or a
/// non-positive log argument.
double eval_cost(const CostPtr& c, const CostEnv& env);

/// Multiplies every literal leaf by k (used by scaling experiments).
CostPtr scale_cost_literals(const CostPtr& c, double k);

}  // namespace repml

#endif  // REPML_COST_HPP
