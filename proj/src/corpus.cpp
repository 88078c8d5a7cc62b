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

#include "repml/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "repml/ast.hpp"

#ifndef REPML_CORPUS_DIR
#error "REPML_CORPUS_DIR must point at the shipped corpus directory"
#endif

namespace repml {

std::string corpus_path(const std::string& name) {
  return (std::filesystem::path(REPML_CORPUS_DIR) / name).string();
}

std::string read_corpus(const std::string& name) {
  std::ifstream in(corpus_path(name));
  if (!in)
    throw CompileError(CompileError::Stage::Io, Loc{},
                       "cannot open corpus file '" + name + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> corpus_files() {
  std::vector<std::string> names;
  for (const auto& entry :
       std::filesystem::directory_iterator(REPML_CORPUS_DIR))
    if (entry.path().extension() == ".rml")
      names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

const std::string& uct_prelude() {
  static const std::string prelude = read_corpus("uct_lite.rml");
  return prelude;
}

}  // namespace repml
