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

#ifndef REPML_SMT_HPP
#define REPML_SMT_HPP

#include <map>
#include <optional>
#include <string>

#include "repml/soltree.hpp"

namespace repml {

/// SMT-LIB2 rendering of a solution tree plus the bookkeeping needed to
/// decode a model back into a Solution. One Boolean selection variable per
/// Or child; the header comment lists the node-to-variable mapping.
struct SmtEncoding {
  std::string text;
  NodePtr root;
  // selection variable name -> (Or node, chosen child)
  std::map<std::string, std::pair<NodePtr, NodePtr>> selections;
};

SmtEncoding encode_smt_tree(const NodePtr& t, const TreeCtx& tc);

/// Convenience: just the SMT-LIB2 text (the `--emit smt` payload).
std::string encode_smt(const NodePtr& t, const TreeCtx& tc);

/// Reads `(define-fun <sel> () Bool true)` bindings from a model and
/// rebuilds the selected Solution, replay-checking its constraints.
/// Returns nullopt when the selection is incomplete or inconsistent.
std::optional<Cand> decode_smt_model(const SmtEncoding& enc, const TreeCtx& tc,
                                     const std::string& model_text);

}  // namespace repml

#endif  // REPML_SMT_HPP
