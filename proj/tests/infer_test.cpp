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
#include "doctest.h"
#include "repml/alias.hpp"
#include "repml/infer.hpp"
#include "repml/parser.hpp"
#include "repml/printer.hpp"

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

InferredProgram infer_src(const std::string& src) {
  return infer_program(expand_aliases(parse_program(src)));
}

int single_rvar(const TypePtr& t) {
  // The unique rvar id in a type; -2 if several distinct ids.
  int found = -1;
  std::function<void(const TypePtr&)> walk = [&](const TypePtr& x) {
    if (x->k == SemType::K::Repr && x->id >= 0) {
      if (found == -1 || found == x->id) {
        found = x->id;
      } else {
        found = -2;
      }
    }
    for (const auto& a : x->args) walk(a);
  };
  walk(t);
  return found;
}

}  // namespace

TEST_CASE("unification merges rvar classes through repr types") {
  UnifCtx ctx;
  ctx.next_uvar = 10;
  ctx.next_rvar = 100;
  TypePtr a = SemType::repr(SemType::con("int"), 100);
  TypePtr b = SemType::repr(SemType::unif(0), 101);
  CHECK(ctx.unify(a, b) == UnifyOutcome::Ok);
  CHECK(ctx.rfind(101) == 100);
  TypePtr r = ctx.resolve(SemType::unif(0));
  CHECK(r->name == "int");
}

TEST_CASE("conflicting representation assignments are rejected") {
  UnifCtx ctx;
  CHECK(ctx.assign_repr(5, "list_r") == UnifyOutcome::Ok);
  CHECK(ctx.assign_repr(5, "list_r") == UnifyOutcome::Ok);
  CHECK(ctx.assign_repr(5, "iset_r") == UnifyOutcome::ReprConflict);
  // Merging two classes with different assignments also fails.
  CHECK(ctx.assign_repr(6, "iset_r") == UnifyOutcome::Ok);
  CHECK(ctx.runite(5, 6) == UnifyOutcome::ReprConflict);
}

TEST_CASE("occurs check") {
  UnifCtx ctx;
  ctx.next_uvar = 1;
  TypePtr u = SemType::unif(0);
  TypePtr arr = SemType::arrow(u, SemType::con("int"));
  CHECK(ctx.unify(u, arr) == UnifyOutcome::Occurs);
}

TEST_CASE("wildcards unify with anything without binding") {
  UnifCtx ctx;
  ctx.next_uvar = 1;
  TypePtr w = SemType::wildcard();
  CHECK(ctx.unify(w, SemType::con("int")) == UnifyOutcome::Ok);
  TypePtr u = SemType::unif(0);
  CHECK(ctx.unify(u, w) == UnifyOutcome::Ok);
  // u stays free.
  CHECK(ctx.resolve(u)->k == SemType::K::Unif);
}

TEST_CASE("set-membership example: annotation rvars are numbered in source "
          "order") {
  InferredProgram inf = infer_src(kSetExample);
  CHECK(inf.annot_max == 6);
  REQUIRE(inf.impls.size() == 4);

  // The op signatures got ids 1 and 4.
  CHECK(single_rvar(inf.globals.at("fold").body) == 1);
  CHECK(single_rvar(inf.globals.at("contains").body) == 4);

  // The impl annotations got 2, 3, 5, 6 (resolution keeps the annotation id
  // as the class root).
  UnifCtx& ctx = inf.ctx;
  CHECK(single_rvar(ctx.resolve(inf.impls[0].annot)) == 2);
  CHECK(single_rvar(ctx.resolve(inf.impls[1].annot)) == 3);
  CHECK(single_rvar(ctx.resolve(inf.impls[2].annot)) == 5);
  CHECK(single_rvar(ctx.resolve(inf.impls[3].annot)) == 6);

  // The fold use inside the default impl shares class 6 with its
  // annotation; the top-level contains use has its own class.
  REQUIRE(inf.uses.size() == 2);
  CHECK(inf.uses[0].op == "fold");
  CHECK(inf.uses[0].owner_impl == 3);
  CHECK(single_rvar(ctx.resolve(inf.uses[0].ty)) == 6);
  CHECK(inf.uses[1].op == "contains");
  CHECK(inf.uses[1].owner_impl == -1);
  int top_rvar = single_rvar(ctx.resolve(inf.uses[1].ty));
  CHECK(top_rvar >= 1000000);  // instantiation-time id until frozen
}

TEST_CASE("set-membership example: impl types desugar against the op type") {
  InferredProgram inf = infer_src(kSetExample);
  UnifCtx& ctx = inf.ctx;

  // default contains: 'd -> 'd repr -> bool (shape from the op type).
  TypePtr t = ctx.resolve(inf.impls[3].annot);
  TypePtr expected = SemType::arrow(
      SemType::rigid("d"),
      SemType::arrow(SemType::repr(SemType::rigid("d"), 6),
                     SemType::con("bool")));
  CHECK(canonical_type(t) == canonical_type(expected));

  // iset contains impl propagates int from the representation pattern:
  // int -> !iset_r (int repr) -> bool.
  TypePtr c = ctx.resolve(inf.impls[2].annot);
  REQUIRE(c->k == SemType::K::Arrow);
  CHECK(print_type(c->args[0]) == "int");
  REQUIRE(c->args[1]->k == SemType::K::Arrow);
  CHECK(c->args[1]->args[0]->k == SemType::K::ReprAssign);
  CHECK(c->args[1]->args[0]->name == "iset_r");

  // fold use inside the default impl: (bool -> 'd -> bool) -> bool ->
  // 'd repr -> bool.
  TypePtr u = ctx.resolve(inf.uses[0].ty);
  TypePtr exp_use = SemType::arrow(
      SemType::arrow(SemType::con("bool"),
                     SemType::arrow(SemType::rigid("d"), SemType::con("bool"))),
      SemType::arrow(SemType::con("bool"),
                     SemType::arrow(SemType::repr(SemType::rigid("d"), 6),
                                    SemType::con("bool"))));
  CHECK(canonical_type(u) == canonical_type(exp_use));

  // Top-level contains use: int -> int repr -> bool.
  TypePtr top = ctx.resolve(inf.uses[1].ty);
  TypePtr exp_top = SemType::arrow(
      SemType::con("int"),
      SemType::arrow(SemType::repr(SemType::con("int"), 9), SemType::con("bool")));
  CHECK(canonical_type(top) == canonical_type(exp_top));
}

TEST_CASE("impl body that does not match its annotation is rejected") {
  std::string src = R"(
type 'a list
external List.length : 'a list -> int
letrepr list_r {'a = 'a list}
letop contains : 'a -> 'a repr -> bool
letimpl[1.0] contains : _ -> !list_r (_ repr) -> _ = List.length
)";
  CHECK_THROWS_AS(infer_src(src), CompileError);
}

TEST_CASE("impl for an unknown op is rejected") {
  CHECK_THROWS_AS(infer_src("letimpl[1.0] nope = fun x -> x"), CompileError);
}

TEST_CASE("repr target may drop pattern variables but not invent them") {
  CHECK_NOTHROW(infer_src("type t\nletrepr r {('a, 'p) t = 'a}\n"
                          "letop f : ('a, 'b) t repr -> int\n"));
  CHECK_THROWS_AS(infer_src("type t\nletrepr r {'a t = ('a, 'b) t}\n"),
                  CompileError);
}

TEST_CASE("extern signatures cannot mention repr") {
  CHECK_THROWS_AS(infer_src("external f : 'a repr -> int"), CompileError);
}

TEST_CASE("scale markers only apply to operations") {
  std::string src = R"(
letop size : 'a repr -> int
let f = fun x -> @2.0 x
)";
  CHECK_THROWS_AS(infer_src(src), CompileError);
}

TEST_CASE("match typing binds constructor payloads") {
  std::string src = R"(
type 'a option = None | Some of 'a
let get_or = fun d o ->
  begin match o with
  | Some x -> x
  | None -> d
  end
)";
  InferredProgram inf = infer_src(src);
  const Scheme& s = inf.globals.at("get_or");
  CHECK(s.vars.size() == 1);
  // 'g -> 'g option -> 'g
  TypePtr expect = SemType::arrow(
      SemType::rigid("x"),
      SemType::arrow(SemType::con("option", {SemType::rigid("x")}),
                     SemType::rigid("x")));
  CHECK(canonical_type(s.body) == canonical_type(expect));
}

TEST_CASE("tuple patterns in match arms") {
  std::string src = R"(
type 'a option = None | Some of 'a
let swap_or = fun d o ->
  begin match o with
  | Some (a, b) -> (b, a)
  | None -> d
  end
)";
  InferredProgram inf = infer_src(src);
  CHECK(inf.globals.count("swap_or") == 1);
}

TEST_CASE("recursive lets type-check") {
  std::string src = R"(
let rec count = fun n -> if n = 0 then 0 else count (n - 1)
)";
  InferredProgram inf = infer_src(src);
  CHECK(print_type(inf.globals.at("count").body) == "int -> int");
}

TEST_CASE("unbound names are reported with location") {
  try {
    infer_src("let f = missing");
    FAIL("expected an infer error");
  } catch (const CompileError& e) {
    CHECK(e.stage == CompileError::Stage::Infer);
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
}

TEST_CASE("plain lets share rvars across references") {
  std::string src = R"(
type 'a seq_t
type 'a list
letrepr list_r {'a seq_t = 'a list}
letop size : ('a seq_t) repr -> int
letimpl[n] size : !list_r _ -> _ = fun x -> 0
let measure = fun c -> size c
let a = fun c -> measure c
let b = fun c -> measure c
)";
  InferredProgram inf = infer_src(src);
  // One op-use total (inside measure); the two references to measure do not
  // create new uses.
  int uses = 0;
  for (const auto& u : inf.uses)
    if (u.op == "size") uses++;
  CHECK(uses == 1);
}

TEST_CASE("lift_lets rewrites polymorphic repr-typed lets") {
  std::string src = R"(
type 'a seq_t
type 'a list
external List.cons : 'a -> 'a list -> 'a list
external List.nil : 'a list
letrepr list_r {'a seq_t = 'a list}
letop empty : ('a seq_t) repr
letimpl[1.0] empty : !list_r _ = List.nil
letop prepend : 'a -> ('a seq_t) repr -> ('a seq_t) repr
letimpl[1.0] prepend : _ -> !list_r _ -> !list_r _ = List.cons
let singleton = fun x -> prepend x empty
let use_it = singleton 1
)";
  // singleton : 'a -> ('a seq_t) repr is polymorphic and repr-typed, so it
  // becomes an op + zero-cost impl; use_it stays a let.
  Program p = expand_aliases(parse_program(src));
  Program lifted = lift_lets(p);
  int ops = 0, impls = 0, lets = 0;
  for (const auto& d : lifted) {
    if (d->k == Decl::K::Op) ops++;
    if (d->k == Decl::K::Impl) impls++;
    if (d->k == Decl::K::Let) lets++;
  }
  CHECK(ops == 3);
  CHECK(impls == 3);
  CHECK(lets == 1);
  // The lifted program still infers, with the synthetic impl's body uses
  // recorded under it.
  InferredProgram inf = infer_program(lifted);
  bool found = false;
  for (const auto& impl : inf.impls) {
    if (impl.op == "singleton") {
      found = true;
      CHECK(impl.use_ids.size() == 2);  // prepend + empty
      CHECK(print_cost(impl.cost) == "0.0");
    }
  }
  CHECK(found);
}

TEST_CASE("monomorphic repr-typed lets are not lifted") {
  InferredProgram check = infer_src(kSetExample);
  (void)check;
  Program p = expand_aliases(parse_program(kSetExample));
  Program lifted = lift_lets(p);
  CHECK(lifted.size() == p.size());
  CHECK(lifted.back()->k == Decl::K::Let);
}
