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

#include "repml/lexer.hpp"

#include <cctype>
#include <cstdlib>
#include <unordered_set>

namespace repml {

namespace {

const std::unordered_set<std::string> kKeywords = {
    "let",  "rec",   "in",    "fun",      "if",     "then",    "else",
    "begin", "match", "with",  "end",      "type",   "external", "letop",
    "letimpl", "letrepr", "of", "true",   "false",  "repr",    "min",
    "max",  "log"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0, n = src.size();
  int line = 1, col = 1;

  auto loc_here = [&]() { return Loc{line, col}; };
  auto advance = [&](size_t by) {
    for (size_t k = 0; k < by && i < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto fail = [&](const std::string& msg) -> void {
    throw CompileError(CompileError::Stage::Parse, loc_here(), msg);
  };

  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    // Nested comments.
    if (c == '(' && i + 1 < n && src[i + 1] == '*') {
      Loc start = loc_here();
      int depth = 0;
      while (i < n) {
        if (src[i] == '(' && i + 1 < n && src[i + 1] == '*') {
          depth++;
          advance(2);
        } else if (src[i] == '*' && i + 1 < n && src[i + 1] == ')') {
          depth--;
          advance(2);
          if (depth == 0) break;
        } else {
          advance(1);
        }
      }
      if (depth != 0)
        throw CompileError(CompileError::Stage::Parse, start,
                           "unterminated comment");
      continue;
    }

    Token t;
    t.loc = loc_here();

    if (ident_start(c) && c != '_') {
      size_t j = i;
      while (j < n && ident_char(src[j])) ++j;
      // Qualified names: Module.name (dot tightly bound between idents).
      while (j < n && src[j] == '.' && j + 1 < n && ident_start(src[j + 1]) &&
             src[j + 1] != '_') {
        ++j;
        while (j < n && ident_char(src[j])) ++j;
      }
      t.text = src.substr(i, j - i);
      t.k = kKeywords.count(t.text) ? Token::K::Keyword : Token::K::Ident;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '_' && (i + 1 >= n || !ident_char(src[i + 1]))) {
      t.k = Token::K::Punct;
      t.text = "_";
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '_') {  // identifier starting with underscore
      size_t j = i;
      while (j < n && ident_char(src[j])) ++j;
      t.text = src.substr(i, j - i);
      t.k = Token::K::Ident;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '\'') {
      size_t j = i + 1;
      if (j >= n || !ident_start(src[j])) fail("expected type variable name after '");
      while (j < n && ident_char(src[j])) ++j;
      t.k = Token::K::TyVar;
      t.text = src.substr(i + 1, j - i - 1);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      bool is_float = false;
      while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < n && src[j] == '.' &&
          (j + 1 >= n || src[j + 1] != '.')) {  // not part of an ident path
        is_float = true;
        ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < n && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      std::string text = src.substr(i, j - i);
      if (is_float) {
        t.k = Token::K::Float;
        t.fval = std::strtod(text.c_str(), nullptr);
      } else {
        t.k = Token::K::Int;
        t.ival = std::strtoll(text.c_str(), nullptr, 10);
      }
      t.text = std::move(text);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::string s;
      size_t j = i + 1;
      Loc start = t.loc;
      while (j < n && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < n) {
          char e = src[j + 1];
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '\\': s += '\\'; break;
            case '"': s += '"'; break;
            default:
              throw CompileError(CompileError::Stage::Parse, start,
                                 "unknown escape in string literal");
          }
          j += 2;
        } else {
          s += src[j++];
        }
      }
      if (j >= n)
        throw CompileError(CompileError::Stage::Parse, start,
                           "unterminated string literal");
      t.k = Token::K::String;
      t.text = std::move(s);
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }

    // Multi-char punctuation first.
    auto two = (i + 1 < n) ? src.substr(i, 2) : std::string();
    static const char* kTwo[] = {"->", "<=", ">=", "&&", "||", "<>"};
    bool matched = false;
    for (auto* p : kTwo) {
      if (two == p) {
        t.k = Token::K::Punct;
        t.text = p;
        advance(2);
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (matched) continue;

    static const std::string kOne = "()[]{},:=|@!*+-/<>._;";
    if (kOne.find(c) != std::string::npos) {
      t.k = Token::K::Punct;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token eof;
  eof.k = Token::K::Eof;
  eof.loc = loc_here();
  out.push_back(eof);
  return out;
}

}  // namespace repml
