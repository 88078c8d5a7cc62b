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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "repml/alias.hpp"
#include "repml/infer.hpp"
#include "repml/lower.hpp"
#include "repml/parser.hpp"
#include "repml/printer.hpp"
#include "repml/solvers.hpp"

using namespace repml;

namespace {

const char* kSetExample = R"(
type 'a list
type IntSet.t
external List.fold_left : ('a -> 'b -> 'a) -> 'a -> 'b list -> 'a
external IntSet.fold : ('a -> int -> 'a) -> 'a -> IntSet.t -> 'a
external IntSet.contains : int -> IntSet.t -> bool
letrepr list_r {'a = 'a list}
letrepr iset_r {int = IntSet.t}
letop fold : ('a -> 'b -> 'a) -> 'a -> 'b repr -> 'a
letimpl[n] fold : _ -> _ -> !list_r (_ repr) -> _ = List.fold_left
letimpl[n] fold : _ -> _ -> !iset_r (_ repr) -> _ = IntSet.fold
letop contains : 'a -> 'a repr -> bool
letimpl[min n W] contains : _ -> !iset_r (_ repr) -> _ = IntSet.contains
letimpl[n] contains = fun elem coll ->
  fold (fun found x -> found || x = elem) false coll
let hasTwo coll = contains 2 coll
)";

struct Pipeline {
  InferredProgram inferred;
  std::unique_ptr<FrozenProgram> frozen;

  explicit Pipeline(const std::string& src)
      : inferred(infer_program(expand_aliases(parse_program(src)))),
        frozen(collect_problem(inferred)) {}
  const ProblemInput& p() const { return frozen->problem; }
};

const DeclPtr* find_decl(const Program& p, const std::string& name) {
  for (const auto& d : p)
    if (d->name == name) return &d;
  return nullptr;
}

Program lower_with(Pipeline& pl,
                   const std::vector<std::pair<int, SolutionPtr>>& items) {
  ValidateResult v = validate_program(pl.p(), items);
  REQUIRE(v.ok);
  Program out = apply_solution(pl.inferred, *pl.frozen, items, v.assignment);
  check_resolved(out);
  return out;
}

bool clean_of_repr_tokens(const Program& p) {
  std::string text = print_program(p);
  return text.find("letop") == std::string::npos &&
         text.find("letimpl") == std::string::npos &&
         text.find("letrepr") == std::string::npos &&
         text.find("repr") == std::string::npos;
}

}  // namespace

TEST_CASE("lowering the direct IntSet solution gives the one-liner binding") {
  Pipeline pl(kSetExample);
  auto sols = enumerate_valid(pl.p(), pl.p().top_uses[0]);
  REQUIRE(sols.size() == 3);
  REQUIRE(solution_brief(sols[0]) == "contains#2");

  Program out = lower_with(pl, {{0, sols[0]}});
  const DeclPtr* bind = find_decl(out, "__impl_contains_0");
  REQUIRE(bind);
  CHECK((*bind)->k == Decl::K::Let);
  CHECK(print_expr((*bind)->body) == "IntSet.contains");

  const DeclPtr* has_two = find_decl(out, "hasTwo");
  REQUIRE(has_two);
  CHECK(print_expr((*has_two)->body).find("__impl_contains_0") !=
        std::string::npos);
  CHECK(clean_of_repr_tokens(out));
}

TEST_CASE("lowering the default+fold solution emits both bindings in order") {
  Pipeline pl(kSetExample);
  auto sols = enumerate_valid(pl.p(), pl.p().top_uses[0]);
  REQUIRE(solution_brief(sols[1]) == "contains#3(fold#0)");

  Program out = lower_with(pl, {{0, sols[1]}});
  const DeclPtr* fold = find_decl(out, "__impl_fold_0");
  const DeclPtr* contains = find_decl(out, "__impl_contains_0");
  REQUIRE(fold);
  REQUIRE(contains);
  CHECK(print_expr((*fold)->body) == "List.fold_left");
  // The composite body now references the fold binding, not the op.
  CHECK(print_expr((*contains)->body).find("__impl_fold_0") !=
        std::string::npos);
  // Sub-solutions are bound before the bindings that use them.
  size_t fold_at = 0, contains_at = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i]->name == "__impl_fold_0") fold_at = i;
    if (out[i]->name == "__impl_contains_0") contains_at = i;
  }
  CHECK(fold_at < contains_at);
  CHECK(clean_of_repr_tokens(out));
}

TEST_CASE("a program without op-uses just sheds the repr declarations") {
  Pipeline pl(R"(
type 'a list
external List.nil : 'a list
letrepr list_r {'a = 'a list}
let xs = List.nil
)");
  Program out = lower_with(pl, {});
  CHECK(out.size() == 3);  // type, external, let
  CHECK(find_decl(out, "xs"));
  CHECK(!find_decl(out, "list_r"));
}

TEST_CASE("identical impl instantiations share one binding") {
  Pipeline pl(R"(
type 'a seq_t
type 'a list
external List.nil : 'a list
letrepr list_r {'a seq_t = 'a list}
letop empty : ('a seq_t) repr
letimpl[1.0] empty : !list_r _ = List.nil
let pair = (empty, empty)
)");
  REQUIRE(pl.p().top_uses.size() == 2);
  auto s0 = enumerate_valid(pl.p(), pl.p().top_uses[0]);
  auto s1 = enumerate_valid(pl.p(), pl.p().top_uses[1]);
  REQUIRE(s0.size() == 1);
  REQUIRE(s1.size() == 1);

  Program out = lower_with(pl, {{0, s0[0]}, {1, s1[0]}});
  int binding_count = 0;
  for (const auto& d : out)
    if (d->name.rfind("__impl_empty_", 0) == 0) ++binding_count;
  CHECK(binding_count == 1);
  const DeclPtr* pair = find_decl(out, "pair");
  REQUIRE(pair);
  std::string body = print_expr((*pair)->body);
  CHECK(body.find("__impl_empty_0") != std::string::npos);
}

TEST_CASE("annotations over repr aliases become concrete layouts") {
  Pipeline pl(R"(
type 'a seq_t
type 'a list
external List.nil : 'a list
type 'a seq = ('a seq_t) repr
letrepr list_r {'a seq_t = 'a list}
letop empty : 'a seq
letimpl[1.0] empty : !list_r _ = List.nil
let s : int seq = empty
)");
  auto sols = enumerate_valid(pl.p(), pl.p().top_uses[0]);
  REQUIRE(sols.size() == 1);
  Program out = lower_with(pl, {{0, sols[0]}});
  const DeclPtr* s = find_decl(out, "s");
  REQUIRE(s);
  REQUIRE(s[0]->annot.has_value());
  CHECK(print_type(*s[0]->annot) == "int list");
  // The repr alias declaration itself is dissolved.
  CHECK(!find_decl(out, "seq"));
}

TEST_CASE("an unconstrained rvar defaults to the first matching repr") {
  Pipeline pl(R"(
type 'a seq_t
type 'a list
type 'a rope
external List.nil : 'a list
external Rope.nil : 'a rope
letrepr list_r {'a seq_t = 'a list}
letrepr rope_r {'a seq_t = 'a rope}
letop use : ('a seq_t) repr -> int
letimpl[3.0] use = fun x -> 0
letop mk : ('a seq_t) repr
letimpl[1.0] mk : !rope_r _ = Rope.nil
let probe = use mk
)");
  // `use`'s impl never constrains the class; `mk` pins it to rope_r, so
  // the class is assigned after all and lowering uses rope.
  auto sols = enumerate_valid(pl.p(), pl.p().top_uses[0]);
  REQUIRE(!sols.empty());
  std::vector<std::pair<int, SolutionPtr>> items;
  items.emplace_back(0, sols[0]);
  auto s1 = enumerate_valid(pl.p(), pl.p().top_uses[1]);
  items.emplace_back(1, s1[0]);
  Program out = lower_with(pl, items);
  CHECK(clean_of_repr_tokens(out));
}

TEST_CASE("cost scale markers disappear from lowered bodies") {
  Pipeline pl(R"(
type 'a seq_t
type 'a list
external List.nil : 'a list
letrepr list_r {'a seq_t = 'a list}
letop empty : ('a seq_t) repr
letimpl[1.0] empty : !list_r _ = List.nil
let built = @0.0 empty
)");
  auto sols = enumerate_valid(pl.p(), pl.p().top_uses[0]);
  Program out = lower_with(pl, {{0, sols[0]}});
  const DeclPtr* built = find_decl(out, "built");
  REQUIRE(built);
  CHECK(print_expr((*built)->body).find('@') == std::string::npos);
}

TEST_CASE("check_resolved flags residual repr constructs") {
  Program bad = parse_program(R"(
type 'a seq_t
external nil : ('a seq_t) repr
let x = nil
)");
  CHECK_THROWS_WITH_AS(check_resolved(bad),
                       doctest::Contains("residual repr type"), CompileError);

  Program leftover = parse_program(R"(
type 'a seq_t
letop empty : ('a seq_t) repr
)");
  CHECK_THROWS_WITH_AS(check_resolved(leftover),
                       doctest::Contains("residual letop"), CompileError);
}
