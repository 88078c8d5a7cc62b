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

#include "repml/cache.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "repml/printer.hpp"

namespace repml {

namespace {

constexpr const char* kHeader = "reprsel-cache v1";

CompileError io_error(const std::string& msg) {
  return CompileError(CompileError::Stage::Io, {}, msg);
}

std::string root_fp(const std::string& line) {
  return line.substr(0, line.find('('));
}

/// Grammar check for a skeleton line: fp ::= <nonempty, no parens/commas>,
/// skel ::= fp | fp '(' skel (',' skel)* ')'.
bool parse_skel(const std::string& s, size_t& pos) {
  size_t start = pos;
  while (pos < s.size() && s[pos] != '(' && s[pos] != ')' && s[pos] != ',')
    ++pos;
  if (pos == start) return false;
  if (pos < s.size() && s[pos] == '(') {
    ++pos;
    if (!parse_skel(s, pos)) return false;
    while (pos < s.size() && s[pos] == ',') {
      ++pos;
      if (!parse_skel(s, pos)) return false;
    }
    if (pos >= s.size() || s[pos] != ')') return false;
    ++pos;
  }
  return true;
}

bool well_formed(const std::string& line) {
  size_t pos = 0;
  return parse_skel(line, pos) && pos == line.size();
}

}  // namespace

std::string impl_fingerprint(const ImplDef& impl) {
  std::hash<std::string> h;
  std::ostringstream os;
  os << impl.op << '@' << std::hex << h(canonical_type(impl.ty));
  return os.str();
}

std::string solution_skeleton(const SolutionPtr& s) {
  std::string out = s->impl ? impl_fingerprint(*s->impl) : std::string("?");
  if (!s->subs.empty()) {
    out += '(';
    for (size_t i = 0; i < s->subs.size(); ++i) {
      if (i) out += ',';
      out += solution_skeleton(s->subs[i]);
    }
    out += ')';
  }
  return out;
}

void SolutionCache::add(const SolutionPtr& s) {
  if (!s) return;
  for (const auto& sub : s->subs) add(sub);
  if (!s->impl) return;  // program roots are represented by their subs
  std::string line = solution_skeleton(s);
  if (seen_.insert(line).second) {
    entries.push_back(line);
    roots_.insert(root_fp(line));
  }
}

void SolutionCache::add_line(const std::string& line) {
  if (!well_formed(line)) throw io_error("malformed cache entry: " + line);
  if (seen_.insert(line).second) {
    entries.push_back(line);
    roots_.insert(root_fp(line));
  }
}

bool SolutionCache::contains_impl(const std::string& fp) const {
  return roots_.count(fp) > 0;
}

void save_cache(const SolutionCache& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write cache file: " + path);
  out << kHeader << '\n';
  for (const auto& e : c.entries) out << e << '\n';
  if (!out) throw io_error("write failed: " + path);
}

SolutionCache load_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read cache file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw io_error("unsupported cache version in " + path +
                   " (expected '" + kHeader + "')");
  SolutionCache c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    c.add_line(line);
  }
  return c;
}

}  // namespace repml
