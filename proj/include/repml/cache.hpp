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

#ifndef REPML_CACHE_HPP
#define REPML_CACHE_HPP

#include <set>
#include <string>
#include <vector>

#include "repml/problem.hpp"

namespace repml {

/// Identity of an implementation that survives re-parsing and unrelated
/// edits: the operation name plus a hash of the desugared annotation in
/// canonical form (normalized variable numbering).
std::string impl_fingerprint(const ImplDef& impl);

/// Canonical textual skeleton of a solution: `fp(sub,sub,...)` with the
/// parenthesized list omitted when there are no sub-solutions. Program
/// roots (null impl) have no fingerprint and are never stored directly;
/// store their sub-solutions instead.
std::string solution_skeleton(const SolutionPtr& s);

/// Persistent store of previously useful solution skeletons. Entries are
/// closed under sub-solutions: adding a solution also adds every subtree.
struct SolutionCache {
  std::vector<std::string> entries;  // insertion order, deduplicated

  /// Adds `s` (skipping a null-impl program root, but recursing into its
  /// sub-solutions) and, recursively, every sub-solution.
  void add(const SolutionPtr& s);

  /// Adds one already-serialized skeleton line; throws CompileError{Io}
  /// when the line is not a well-formed skeleton.
  void add_line(const std::string& line);

  /// True when some entry's root is the given impl fingerprint.
  bool contains_impl(const std::string& fp) const;

  bool operator==(const SolutionCache& o) const { return entries == o.entries; }

 private:
  std::set<std::string> seen_;
  std::set<std::string> roots_;
};

/// Line-oriented versioned text format: header `reprsel-cache v1`, one
/// skeleton per line. Throws CompileError{Io} on I/O failure, version
/// mismatch, or a malformed entry.
void save_cache(const SolutionCache& c, const std::string& path);
SolutionCache load_cache(const std::string& path);

}  // namespace repml

#endif  // REPML_CACHE_HPP
