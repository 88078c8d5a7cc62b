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

#ifndef REPML_PARSER_HPP
#define REPML_PARSER_HPP

#include <string>

#include "repml/ast.hpp"

namespace repml {

/// Parses a whole source buffer into a Program.
/// Throws CompileError{Parse} with a location on the first error.
Program parse_program(const std::string& src);

/// Parses a single type expression (used by tests and the cache loader).
TypePtr parse_type(const std::string& src);

/// Parses a single cost expression.
CostPtr parse_cost(const std::string& src);

}  // namespace repml

#endif  // REPML_PARSER_HPP
