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
// Random benchmark-program generator over the universal-collection
// library: an initial collection built with 0.0-scaled operations, then
// a seeded sequence of code blocks, each containing one operation.

#pragma once

#include <cstdint>
#include <string>

namespace repml {

struct GenSpec {
  int size = 0;                 // number of code blocks
  std::string init_kind = "seq";  // one of seq | set | map
  std::uint64_t seed = 0;
};

// A self-contained source program: the collection library followed by
// the generated benchmark. Deterministic per spec; byte-identical
// output for identical specs. Throws CompileError{Io} on a bad
// init_kind or negative size.
std::string gen_program(const GenSpec& spec);

}  // namespace repml
