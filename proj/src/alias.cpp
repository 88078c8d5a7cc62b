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

#include "repml/alias.hpp"

#include <unordered_map>

namespace repml {

namespace {

struct AliasDef {
  std::vector<std::string> params;
  TypePtr body;
};

using AliasEnv = std::unordered_map<std::string, AliasDef>;

TypePtr substitute(const TypePtr& t,
                   const std::unordered_map<std::string, TypePtr>& map) {
  if (t->k == SemType::K::Rigid) {
    auto it = map.find(t->name);
    return it != map.end() ? it->second : t;
  }
  if (t->args.empty()) return t;
  auto c = std::make_shared<SemType>(*t);
  for (auto& a : c->args) a = substitute(a, map);
  return c;
}

TypePtr expand(const AliasEnv& env, const TypePtr& t, int depth, Loc loc) {
  if (depth > 64)
    throw CompileError(CompileError::Stage::Expand, loc,
                       "type alias expansion too deep (cyclic alias?)");
  if (t->k == SemType::K::Con) {
    auto it = env.find(t->name);
    if (it != env.end()) {
      const AliasDef& def = it->second;
      if (def.params.size() != t->args.size())
        throw CompileError(CompileError::Stage::Expand, loc,
                           "alias '" + t->name + "' expects " +
                               std::to_string(def.params.size()) +
                               " argument(s), got " +
                               std::to_string(t->args.size()));
      std::unordered_map<std::string, TypePtr> map;
      for (size_t i = 0; i < def.params.size(); ++i)
        map[def.params[i]] = expand(env, t->args[i], depth + 1, loc);
      return expand(env, substitute(def.body, map), depth + 1, loc);
    }
  }
  if (t->args.empty()) return t;
  auto c = std::make_shared<SemType>(*t);
  for (auto& a : c->args) a = expand(env, a, depth + 1, loc);
  return c;
}

void expand_expr(const AliasEnv& env, const ExprPtr& e) {
  if (!e) return;
  if (e->annot) e->annot = expand(env, e->annot, 0, e->loc);
  for (const auto& kid : e->kids) expand_expr(env, kid);
  for (const auto& arm : e->arms) expand_expr(env, arm.body);
}

}  // namespace

Program expand_aliases(const Program& p) {
  AliasEnv env;
  for (const auto& d : p) {
    if (d->k == Decl::K::Type && d->alias) {
      if (env.count(d->name))
        throw CompileError(CompileError::Stage::Expand, d->loc,
                           "duplicate type alias '" + d->name + "'");
      env[d->name] = AliasDef{d->params, *d->alias};
    }
  }
  // Expand alias bodies against each other once, so lookups are one-shot.
  for (auto& [name, def] : env) {
    AliasEnv others = env;
    others.erase(name);
    def.body = expand(others, def.body, 0, Loc{});
  }

  Program out = clone_program(p);
  for (const auto& d : out) {
    Loc loc = d->loc;
    if (d->alias) *d->alias = expand(env, *d->alias, 0, loc);
    if (d->pattern) d->pattern = expand(env, d->pattern, 0, loc);
    if (d->target) d->target = expand(env, d->target, 0, loc);
    if (d->scheme_body) d->scheme_body = expand(env, d->scheme_body, 0, loc);
    if (d->annot) *d->annot = expand(env, *d->annot, 0, loc);
    for (auto& ctor : d->ctors)
      for (auto& a : ctor.args) a = expand(env, a, 0, loc);
    expand_expr(env, d->body);
  }
  return out;
}

TypePtr expand_aliases_in(const Program& p, const TypePtr& t) {
  AliasEnv env;
  for (const auto& d : p) {
    if (d->k == Decl::K::Type && d->alias)
      env[d->name] = AliasDef{d->params, *d->alias};
  }
  return expand(env, t, 0, Loc{});
}

}  // namespace repml
