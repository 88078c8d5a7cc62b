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

#ifndef REPML_LEXER_HPP
#define REPML_LEXER_HPP

#include <string>
#include <vector>

#include "repml/ast.hpp"

namespace repml {

struct Token {
  enum class K {
    Ident,     // possibly qualified: List.fold_left
    TyVar,     // 'a
    Int,
    Float,
    String,
    Keyword,   // let, rec, in, fun, if, then, else, begin, match, with, end,
               // type, external, letop, letimpl, letrepr, of, true, false,
               // and, repr, min, max, log
    Punct,     // ( ) [ ] , : = -> | @ ! _ . * + - / < > <= >= && || <>
    Eof,
  };

  K k;
  std::string text;
  long long ival = 0;
  double fval = 0.0;
  Loc loc;

  bool is(K kk, const std::string& t) const { return k == kk && text == t; }
  bool is_kw(const std::string& t) const { return is(K::Keyword, t); }
  bool is_punct(const std::string& t) const { return is(K::Punct, t); }
};

/// Tokenizes a whole source buffer, handling nested (* ... *) comments.
/// Throws CompileError{Parse} on malformed input.
std::vector<Token> lex(const std::string& src);

}  // namespace repml

#endif  // REPML_LEXER_HPP
