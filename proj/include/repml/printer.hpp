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

#ifndef REPML_PRINTER_HPP
#define REPML_PRINTER_HPP

#include <string>

#include "repml/ast.hpp"

namespace repml {

struct PrintOptions {
  // When set, Repr types append their representation-variable id (repr#7)
  // and unification variables print as ?N. The result is for diagnostics
  // and fingerprints, not for re-parsing.
  bool show_rvars = false;
};

std::string print_type(const TypePtr& t, const PrintOptions& opts = {});
std::string print_cost(const CostPtr& c);
std::string print_expr(const ExprPtr& e, const PrintOptions& opts = {});
std::string print_decl(const DeclPtr& d, const PrintOptions& opts = {});
std::string print_program(const Program& p, const PrintOptions& opts = {});

/// Canonical form used for fingerprints and alpha-equivalence checks: rigid
/// and unification variables are renumbered 'v1, 'v2, ... and rvars #1, #2,
/// ... by first occurrence in a left-to-right walk.
std::string canonical_type(const TypePtr& t);

}  // namespace repml

#endif  // REPML_PRINTER_HPP
