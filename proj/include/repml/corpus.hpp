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
// Access to the example libraries shipped with the compiler.

#pragma once

#include <string>
#include <vector>

namespace repml {

// Absolute path of a shipped corpus file, e.g. "uct_lite.rml".
std::string corpus_path(const std::string& name);

// Contents of a shipped corpus file. Throws CompileError{Io} if missing.
std::string read_corpus(const std::string& name);

// Names of all shipped corpus files, sorted.
std::vector<std::string> corpus_files();

// The universal-collection prelude used by the random program generator.
const std::string& uct_prelude();

}  // namespace repml
