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

#ifndef REPML_ALIAS_HPP
#define REPML_ALIAS_HPP

#include "repml/ast.hpp"

namespace repml {

/// Expands all type aliases (`type 'a seq = ('a seq_t) repr`) everywhere a
/// type can occur: op/extern signatures, impl/let annotations, letrepr
/// patterns and targets, variant constructor arguments, and annotations on
/// let-in expressions. Alias declarations themselves are kept (their
/// right-hand sides fully expanded) so the program still prints faithfully.
///
/// Throws CompileError{Expand} on unknown constructor arity mismatches and
/// cyclic aliases.
Program expand_aliases(const Program& p);

/// Expands aliases in a single type against the alias environment of `p`.
TypePtr expand_aliases_in(const Program& p, const TypePtr& t);

}  // namespace repml

#endif  // REPML_ALIAS_HPP
