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

#include "repml/gen.hpp"

#include <random>
#include <sstream>

#include "repml/ast.hpp"
#include "repml/corpus.hpp"

namespace repml {

namespace {

// Every block rebinds `coll` (or sinks a result through
// Sys.opaque_identity) and contains exactly one collection operation.
// Elements are int pairs throughout so the view blocks can switch the
// collection to a (int, int) map and back.
const char* const kBlocks[] = {
    "  let coll = concat coll coll in\n",
    "  let coll = begin match split_first coll with\n"
    "    | Some (_, coll) -> coll\n"
    "    | None -> coll\n"
    "    end in\n",
    "  let _ = Sys.opaque_identity (size coll) in\n",
    "  let coll : (int, int) map = view coll in\n",
    "  let coll : (int * int) set = view coll in\n",
    "  let coll : (int * int) seq = view coll in\n",
    "  let coll = prepend (1, 2) coll in\n",
    "  let coll = append coll (3, 4) in\n",
    "  let coll = map (fun x -> x) coll in\n",
};
constexpr std::size_t kBlockCount = sizeof(kBlocks) / sizeof(kBlocks[0]);

std::string init_annotation(const std::string& kind) {
  if (kind == "seq") return "(int * int) seq";
  if (kind == "set") return "(int * int) set";
  if (kind == "map") return "(int, int) map";
  throw CompileError(CompileError::Stage::Io, Loc{},
                     "unknown init kind '" + kind + "' (want seq|set|map)");
}

}  // namespace

std::string gen_program(const GenSpec& spec) {
  if (spec.size < 0)
    throw CompileError(CompileError::Stage::Io, Loc{},
                       "generator size must be non-negative");
  std::string annot = init_annotation(spec.init_kind);
  std::mt19937_64 rng(spec.seed);

  std::ostringstream out;
  out << uct_prelude();
  out << "\n(* Generated benchmark: seed=" << spec.seed
      << " size=" << spec.size << " init=" << spec.init_kind << " *)\n";
  // The initial collection is built outside the benchmarked function;
  // its operations carry an explicit 0.0 scale so setup cost is free.
  out << "let coll0 : " << annot
      << " = (@0.0 prepend) (1, 2) ((@0.0 empty))\n\n";
  out << "let bench = fun go ->\n";
  out << "  let coll = coll0 in\n";
  for (int i = 0; i < spec.size; ++i)
    out << kBlocks[rng() % kBlockCount];
  out << "  size coll\n\n";
  out << "let result = bench 0\n";
  return out.str();
}

}  // namespace repml
