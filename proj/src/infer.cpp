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

#include "repml/infer.hpp"

#include <functional>
#include <set>

#include "repml/printer.hpp"

namespace repml {

// ---------------------------------------------------------------------------
// UnifCtx

int UnifCtx::rfind(int x) const {
  auto it = parent.find(x);
  if (it == parent.end() || it->second == x) return x;
  int root = rfind(it->second);
  parent[x] = root;
  return root;
}

UnifyOutcome UnifCtx::runite(int a, int b) {
  int ra = rfind(a), rb = rfind(b);
  if (ra == rb) return UnifyOutcome::Ok;
  auto ia = rassign.find(ra);
  auto ib = rassign.find(rb);
  if (ia != rassign.end() && ib != rassign.end() && ia->second != ib->second)
    return UnifyOutcome::ReprConflict;
  // The smaller id becomes the root, so annotation-numbered rvars stay
  // canonical when instantiation variables are merged in.
  int root = std::min(ra, rb), child = std::max(ra, rb);
  std::string name;
  if (ia != rassign.end()) name = ia->second;
  if (ib != rassign.end()) name = ib->second;
  if (ia != rassign.end()) rassign.erase(ra);
  if (ib != rassign.end()) rassign.erase(rb);
  parent[child] = root;
  if (!name.empty()) rassign[root] = name;
  return UnifyOutcome::Ok;
}

UnifyOutcome UnifCtx::assign_repr(int rv, const std::string& name) {
  int root = rfind(rv);
  auto it = rassign.find(root);
  if (it != rassign.end() && it->second != name)
    return UnifyOutcome::ReprConflict;
  rassign[root] = name;
  return UnifyOutcome::Ok;
}

std::optional<std::string> UnifCtx::repr_of(int rv) const {
  auto it = rassign.find(rfind(rv));
  if (it == rassign.end()) return std::nullopt;
  return it->second;
}

TypePtr UnifCtx::resolve(const TypePtr& t) const {
  switch (t->k) {
    case SemType::K::Unif: {
      auto it = subst.find(t->id);
      if (it != subst.end()) return resolve(it->second);
      return t;
    }
    case SemType::K::Repr: {
      auto c = std::make_shared<SemType>(*t);
      c->args[0] = resolve(t->args[0]);
      if (c->id >= 0) c->id = rfind(c->id);
      return c;
    }
    case SemType::K::Rigid:
    case SemType::K::Wildcard:
      return t;
    default: {
      if (t->args.empty()) return t;
      auto c = std::make_shared<SemType>(*t);
      for (auto& a : c->args) a = resolve(a);
      return c;
    }
  }
}

namespace {

bool occurs(const UnifCtx& ctx, int uvar, const TypePtr& t) {
  if (t->k == SemType::K::Unif) {
    auto it = ctx.subst.find(t->id);
    if (it != ctx.subst.end()) return occurs(ctx, uvar, it->second);
    return t->id == uvar;
  }
  for (const auto& a : t->args)
    if (occurs(ctx, uvar, a)) return true;
  return false;
}

TypePtr shallow(const UnifCtx& ctx, TypePtr t) {
  while (t->k == SemType::K::Unif) {
    auto it = ctx.subst.find(t->id);
    if (it == ctx.subst.end()) return t;
    t = it->second;
  }
  return t;
}

}  // namespace

UnifyOutcome UnifCtx::unify(const TypePtr& ta, const TypePtr& tb) {
  TypePtr a = shallow(*this, ta);
  TypePtr b = shallow(*this, tb);
  if (a->k == SemType::K::Wildcard || b->k == SemType::K::Wildcard)
    return UnifyOutcome::Ok;
  if (a->k == SemType::K::ReprAssign) {
    UnifyOutcome r = unify(a->args[0], b);
    if (r != UnifyOutcome::Ok) return r;
    TypePtr inner = shallow(*this, a->args[0]);
    if (inner->k == SemType::K::Repr && inner->id >= 0)
      return assign_repr(inner->id, a->name);
    return UnifyOutcome::Ok;
  }
  if (b->k == SemType::K::ReprAssign) return unify(b, a);
  if (a->k == SemType::K::Unif && b->k == SemType::K::Unif &&
      a->id == b->id)
    return UnifyOutcome::Ok;
  if (a->k == SemType::K::Unif) {
    if (occurs(*this, a->id, b)) return UnifyOutcome::Occurs;
    subst[a->id] = b;
    return UnifyOutcome::Ok;
  }
  if (b->k == SemType::K::Unif) return unify(b, a);
  if (a->k != b->k) return UnifyOutcome::TypeClash;
  switch (a->k) {
    case SemType::K::Rigid:
      return a->name == b->name ? UnifyOutcome::Ok : UnifyOutcome::TypeClash;
    case SemType::K::Con:
      if (a->name != b->name || a->args.size() != b->args.size())
        return UnifyOutcome::TypeClash;
      break;
    case SemType::K::Tuple:
      if (a->args.size() != b->args.size()) return UnifyOutcome::TypeClash;
      break;
    case SemType::K::Arrow:
      break;
    case SemType::K::Repr: {
      UnifyOutcome r = unify(a->args[0], b->args[0]);
      if (r != UnifyOutcome::Ok) return r;
      if (a->id >= 0 && b->id >= 0) return runite(a->id, b->id);
      return UnifyOutcome::Ok;
    }
    default:
      return UnifyOutcome::TypeClash;
  }
  for (size_t i = 0; i < a->args.size(); ++i) {
    UnifyOutcome r = unify(a->args[i], b->args[i]);
    if (r != UnifyOutcome::Ok) return r;
  }
  return UnifyOutcome::Ok;
}

const char* unify_outcome_name(UnifyOutcome o) {
  switch (o) {
    case UnifyOutcome::Ok: return "ok";
    case UnifyOutcome::TypeClash: return "type clash";
    case UnifyOutcome::Occurs: return "occurs check failure";
    case UnifyOutcome::ReprConflict: return "conflicting representations";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Inference

namespace {

constexpr int kInstRvarBase = 1000000;

struct CtorInfo {
  std::string variant;
  std::vector<std::string> params;
  std::vector<TypePtr> args;
};

void collect_rigids(const TypePtr& t, std::vector<std::string>& out,
                    std::set<std::string>& seen) {
  if (t->k == SemType::K::Rigid) {
    if (seen.insert(t->name).second) out.push_back(t->name);
  }
  for (const auto& a : t->args) collect_rigids(a, out, seen);
}

std::vector<std::string> rigids_of(const TypePtr& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_rigids(t, out, seen);
  return out;
}

bool contains_repr(const TypePtr& t) {
  if (t->k == SemType::K::Repr || t->k == SemType::K::ReprAssign) return true;
  for (const auto& a : t->args)
    if (contains_repr(a)) return true;
  return false;
}

class Inferencer {
 public:
  InferredProgram run(const Program& p) {
    result_.prog = clone_program(p);
    result_.ctx.next_uvar = 0;
    result_.ctx.next_rvar = kInstRvarBase;
    seed_builtins();
    for (size_t i = 0; i < result_.prog.size(); ++i) {
      decl_index_ = static_cast<int>(i);
      infer_decl(result_.prog[i]);
    }
    result_.annot_max = annot_next_ - 1;
    return std::move(result_);
  }

 private:
  InferredProgram result_;
  int annot_next_ = 1;
  int decl_index_ = 0;
  int current_impl_ = -1;
  std::map<std::string, CtorInfo> ctors_;
  std::set<std::string> opaque_types_;

  UnifCtx& ctx() { return result_.ctx; }

  [[noreturn]] void fail(Loc loc, const std::string& msg) {
    throw CompileError(CompileError::Stage::Infer, loc, msg);
  }

  void must_unify(const TypePtr& a, const TypePtr& b, Loc loc,
                  const std::string& what) {
    UnifyOutcome r = ctx().unify(a, b);
    if (r != UnifyOutcome::Ok) {
      PrintOptions opts{.show_rvars = true};
      fail(loc, what + ": " + unify_outcome_name(r) + " between " +
                    print_type(ctx().resolve(a), opts) + " and " +
                    print_type(ctx().resolve(b), opts));
    }
  }

  void seed_builtins() {
    auto bin = [&](const char* name, TypePtr arg, TypePtr res,
                   std::vector<std::string> vars = {}) {
      Scheme s;
      s.vars = std::move(vars);
      s.body = SemType::arrow(arg, SemType::arrow(arg, res));
      result_.globals[name] = std::move(s);
    };
    TypePtr ta = SemType::rigid("a");
    TypePtr tbool = SemType::con("bool");
    TypePtr tint = SemType::con("int");
    for (const char* cmp : {"=", "<>", "<", "<=", ">", ">="})
      bin(cmp, ta, tbool, {"a"});
    for (const char* lg : {"&&", "||"}) bin(lg, tbool, tbool);
    for (const char* ar : {"+", "-", "*", "/"}) bin(ar, tint, tint);
  }

  // --- Annotation elaboration -------------------------------------------

  // Gives every explicit `repr` occurrence in a user-written type its
  // annotation rvar id (numbered in source order across the program).
  TypePtr number_annotation(const TypePtr& t) {
    auto c = std::make_shared<SemType>(*t);
    if (c->k == SemType::K::Repr && c->id < 0) c->id = annot_next_++;
    for (auto& a : c->args) a = number_annotation(a);
    return c;
  }

  // Replaces wildcards with fresh uvars (annotation positions that must
  // connect to the inferred body type) and gives unnumbered repr occurrences
  // fresh rvars.
  TypePtr wildcards_to_uvars(const TypePtr& t) {
    if (t->k == SemType::K::Wildcard) return SemType::unif(ctx().fresh_uvar());
    auto c = std::make_shared<SemType>(*t);
    if (c->k == SemType::K::Repr && c->id < 0) c->id = ctx().fresh_rvar();
    for (auto& a : c->args) a = wildcards_to_uvars(a);
    return c;
  }

  TypePtr substitute_rigids(const TypePtr& t,
                            const std::map<std::string, TypePtr>& map) {
    if (t->k == SemType::K::Rigid) {
      auto it = map.find(t->name);
      return it != map.end() ? it->second : t;
    }
    if (t->args.empty()) return t;
    auto c = std::make_shared<SemType>(*t);
    for (auto& a : c->args) a = substitute_rigids(a, map);
    return c;
  }

  TypePtr instantiate(const Scheme& s) {
    std::map<std::string, TypePtr> map;
    for (const auto& v : s.vars) map[v] = SemType::unif(ctx().fresh_uvar());
    TypePtr body = substitute_rigids(s.body, map);
    if (s.refresh_rvars) body = refresh_rvars(body);
    return body;
  }

  // Fresh rvar per `repr` occurrence (ops get an independent representation
  // choice at every use site).
  TypePtr refresh_rvars(const TypePtr& t) {
    auto c = std::make_shared<SemType>(*t);
    if (c->k == SemType::K::Repr) c->id = ctx().fresh_rvar();
    for (auto& a : c->args) a = refresh_rvars(a);
    return c;
  }

  const ReprRec* find_repr(const std::string& name, Loc loc) {
    for (const auto& r : result_.reprs)
      if (r.name == name) return &r;
    fail(loc, "unknown representation '" + name + "'");
  }

  // Instantiates a letrepr pattern/target pair with shared fresh uvars.
  std::pair<TypePtr, TypePtr> instantiate_repr(const ReprRec& r) {
    std::map<std::string, TypePtr> map;
    for (const auto& v : rigids_of(r.pattern))
      map[v] = SemType::unif(ctx().fresh_uvar());
    return {substitute_rigids(r.pattern, map),
            substitute_rigids(r.target, map)};
  }

  // --- Impl annotation desugaring ----------------------------------------
  //
  // Merges the (possibly partial) impl annotation with a fresh instance of
  // the op signature, keeping !name markers in the result. Wildcards take
  // the op-side structure; concrete annotation parts specialize the op's
  // type variables via unification.
  TypePtr merge_annot(const TypePtr& a_in, const TypePtr& o_in, Loc loc) {
    TypePtr a = a_in;
    TypePtr o = shallow(ctx(), o_in);
    if (a->k == SemType::K::Wildcard) return o;
    if (a->k == SemType::K::ReprAssign) {
      if (o->k == SemType::K::Unif) {
        TypePtr r = SemType::repr(SemType::unif(ctx().fresh_uvar()),
                                  ctx().fresh_rvar());
        must_unify(o, r, loc, "implementation annotation");
        o = r;
      }
      if (o->k != SemType::K::Repr)
        fail(loc, "representation assignment '!" + a->name +
                      "' applies to a non-repr position of the operation "
                      "type");
      TypePtr inner = merge_annot(a->args[0], o, loc);
      if (inner->k != SemType::K::Repr)
        fail(loc, "representation assignment '!" + a->name +
                      "' must wrap a repr type");
      // The repr's argument must fit the representation's pattern; this can
      // specialize the op's type variables (e.g. an int-set impl forces the
      // element type to int).
      const ReprRec* rr = find_repr(a->name, loc);
      auto [pat, target] = instantiate_repr(*rr);
      (void)target;
      must_unify(inner->args[0], pat, loc,
                 "representation '" + a->name + "' pattern");
      return SemType::repr_assign(a->name, inner);
    }
    if (o->k == SemType::K::Unif) {
      TypePtr lifted = wildcards_to_uvars(a);
      must_unify(o, lifted, loc, "implementation annotation");
      return lifted;
    }
    if (a->k == SemType::K::Rigid) {
      must_unify(o, a, loc, "implementation annotation");
      return a;
    }
    if (a->k == SemType::K::Repr) {
      if (o->k == SemType::K::Unif) {
        TypePtr r = SemType::repr(SemType::unif(ctx().fresh_uvar()),
                                  ctx().fresh_rvar());
        must_unify(o, r, loc, "implementation annotation");
        o = r;
      }
      if (o->k != SemType::K::Repr)
        fail(loc, "annotation has repr where the operation type has " +
                      print_type(ctx().resolve(o)));
      auto c = std::make_shared<SemType>(*o);
      c->args[0] = merge_annot(a->args[0], o->args[0], loc);
      return c;
    }
    if (a->k != o->k)
      fail(loc, "implementation annotation " + print_type(a) +
                    " is incompatible with the operation type " +
                    print_type(ctx().resolve(o)));
    switch (a->k) {
      case SemType::K::Con:
        if (a->name != o->name || a->args.size() != o->args.size())
          fail(loc, "implementation annotation " + print_type(a) +
                        " is incompatible with the operation type " +
                        print_type(ctx().resolve(o)));
        break;
      case SemType::K::Arrow:
      case SemType::K::Tuple:
        if (a->args.size() != o->args.size())
          fail(loc, "implementation annotation arity mismatch");
        break;
      default:
        fail(loc, "unsupported annotation form");
    }
    auto c = std::make_shared<SemType>(*o);
    c->name = a->name;
    c->args.resize(a->args.size());
    for (size_t i = 0; i < a->args.size(); ++i)
      c->args[i] = merge_annot(a->args[i], o->args[i], loc);
    return c;
  }

  // Numbers each distinct rvar class of a desugared annotation with a fresh
  // annotation id (left-to-right), by uniting the id into the class.
  void number_desugared(const TypePtr& t, std::set<int>& seen) {
    if (t->k == SemType::K::Repr && t->id >= 0) {
      int root = ctx().rfind(t->id);
      if (seen.insert(root).second) {
        int id = annot_next_++;
        ctx().runite(id, root);
        seen.insert(ctx().rfind(id));
      }
    }
    for (const auto& a : t->args) number_desugared(a, seen);
  }

  // The type the impl body must check against: representation assignments
  // replaced by their target types, unassigned reprs kept.
  TypePtr expected_of(const TypePtr& t, Loc loc) {
    if (t->k == SemType::K::ReprAssign) {
      TypePtr inner = shallow(ctx(), t->args[0]);
      if (inner->k != SemType::K::Repr) inner = ctx().resolve(t->args[0]);
      if (inner->k != SemType::K::Repr)
        fail(loc, "representation assignment must wrap a repr type");
      const ReprRec* rr = find_repr(t->name, loc);
      auto [pat, target] = instantiate_repr(*rr);
      must_unify(inner->args[0], pat, loc,
                 "representation '" + t->name + "' pattern");
      return target;
    }
    if (t->args.empty()) return t;
    auto c = std::make_shared<SemType>(*t);
    for (auto& a : c->args) a = expected_of(a, loc);
    return c;
  }

  // --- Declarations -------------------------------------------------------

  void define_global(const std::string& name, Scheme s, Loc loc) {
    if (result_.globals.count(name))
      fail(loc, "duplicate top-level name '" + name + "'");
    result_.globals[name] = std::move(s);
  }

  void infer_decl(const DeclPtr& d) {
    current_impl_ = -1;
    switch (d->k) {
      case Decl::K::Type:
        opaque_types_.insert(d->name);
        break;
      case Decl::K::Variant: {
        for (const auto& ctor : d->ctors) {
          if (ctors_.count(ctor.name))
            fail(d->loc, "duplicate constructor '" + ctor.name + "'");
          for (const auto& a : ctor.args)
            if (contains_repr(a))
              fail(d->loc, "variant constructor arguments cannot mention "
                           "repr types");
          ctors_[ctor.name] = CtorInfo{d->name, d->params, ctor.args};
          std::vector<TypePtr> params;
          params.reserve(d->params.size());
          for (const auto& p : d->params) params.push_back(SemType::rigid(p));
          TypePtr res = SemType::con(d->name, params);
          Scheme s;
          s.vars = d->params;
          s.body = ctor.args.empty() ? res : SemType::arrow(ctor.args[0], res);
          define_global(ctor.name, std::move(s), d->loc);
        }
        break;
      }
      case Decl::K::Repr: {
        for (const auto& r : result_.reprs)
          if (r.name == d->name)
            fail(d->loc, "duplicate representation '" + d->name + "'");
        std::set<std::string> pat_vars;
        std::vector<std::string> tmp;
        collect_rigids(d->pattern, tmp, pat_vars);
        for (const auto& v : rigids_of(d->target))
          if (!pat_vars.count(v))
            fail(d->loc, "representation target mentions '" + v +
                             "' which is not bound by the pattern");
        if (contains_repr(d->pattern) || contains_repr(d->target))
          fail(d->loc, "representation patterns and targets cannot mention "
                       "repr types");
        result_.reprs.push_back(
            ReprRec{d->name, d->pattern, d->target, decl_index_});
        break;
      }
      case Decl::K::Op: {
        TypePtr body = number_annotation(d->scheme_body);
        d->scheme_body = body;
        Scheme s;
        s.vars = rigids_of(body);
        s.body = body;
        s.refresh_rvars = true;
        s.is_op = true;
        define_global(d->name, std::move(s), d->loc);
        break;
      }
      case Decl::K::Extern: {
        if (contains_repr(d->scheme_body))
          fail(d->loc, "external signatures cannot mention repr types");
        Scheme s;
        s.vars = rigids_of(d->scheme_body);
        s.body = d->scheme_body;
        define_global(d->name, std::move(s), d->loc);
        break;
      }
      case Decl::K::Impl:
        infer_impl(d);
        break;
      case Decl::K::Let:
        infer_let(d);
        break;
    }
  }

  void infer_impl(const DeclPtr& d) {
    auto it = result_.globals.find(d->op);
    if (it == result_.globals.end() || !it->second.is_op)
      fail(d->loc, "letimpl for unknown operation '" + d->op + "'");
    TypePtr op_inst = instantiate(it->second);
    TypePtr annot = d->annot ? *d->annot : SemType::wildcard();
    TypePtr desugared = merge_annot(annot, op_inst, d->loc);
    std::set<int> seen;
    number_desugared(desugared, seen);

    ImplRec rec;
    rec.decl_index = decl_index_;
    rec.op = d->op;
    rec.cost = d->cost;
    rec.annot = desugared;
    rec.src = d;
    int impl_index = static_cast<int>(result_.impls.size());
    result_.impls.push_back(rec);

    current_impl_ = impl_index;
    TypePtr expected = expected_of(desugared, d->loc);
    std::map<std::string, TypePtr> locals;
    TypePtr body_ty = infer_expr(d->body, locals);
    must_unify(body_ty, expected, d->loc,
               "implementation body does not match its annotation");
    current_impl_ = -1;
  }

  void infer_let(const DeclPtr& d) {
    std::map<std::string, TypePtr> locals;
    TypePtr self;
    if (d->is_rec) {
      self = SemType::unif(ctx().fresh_uvar());
      locals[d->name] = self;
    }
    TypePtr body_ty = infer_expr(d->body, locals);
    if (self) must_unify(body_ty, self, d->loc, "recursive binding");
    if (d->annot) {
      TypePtr annot = wildcards_to_uvars(number_annotation(*d->annot));
      if (has_assign(annot))
        fail(d->loc, "representation assignments are not allowed on let "
                     "annotations");
      d->annot = annot;
      must_unify(body_ty, annot, d->loc,
                 "let binding does not match its annotation");
    }
    // Generalize: every unification variable still free in the resolved
    // type becomes a quantified rigid (bound in the ctx, so later
    // resolutions agree).
    TypePtr resolved = ctx().resolve(body_ty);
    Scheme s;
    std::function<void(const TypePtr&)> walk = [&](const TypePtr& t) {
      if (t->k == SemType::K::Unif && !ctx().subst.count(t->id)) {
        std::string name = "g" + std::to_string(t->id);
        ctx().subst[t->id] = SemType::rigid(name);
        s.vars.push_back(name);
        return;
      }
      for (const auto& a : t->args) walk(a);
    };
    walk(resolved);
    s.body = ctx().resolve(resolved);
    result_.let_schemes[decl_index_] = s;
    define_global(d->name, std::move(s), d->loc);
  }

  static bool has_assign(const TypePtr& t) {
    if (t->k == SemType::K::ReprAssign) return true;
    for (const auto& a : t->args)
      if (has_assign(a)) return true;
    return false;
  }

  // --- Expressions --------------------------------------------------------

  TypePtr infer_expr(const ExprPtr& e, std::map<std::string, TypePtr> locals) {
    TypePtr t = infer_expr_inner(e, std::move(locals));
    e->ty = t;
    return t;
  }

  TypePtr instantiate_global(const ExprPtr& e, const Scheme& s,
                             CostPtr scale) {
    TypePtr t = instantiate(s);
    if (s.is_op) {
      OpUseRec use;
      use.id = static_cast<int>(result_.uses.size());
      use.op = e->name;
      use.scale = scale ? scale : CostExpr::literal(1.0);
      use.ty = t;
      use.owner_impl = current_impl_;
      use.decl_index = decl_index_;
      e->op_use_id = use.id;
      if (current_impl_ >= 0)
        result_.impls[current_impl_].use_ids.push_back(use.id);
      result_.uses.push_back(std::move(use));
    }
    return t;
  }

  TypePtr infer_expr_inner(const ExprPtr& e,
                           std::map<std::string, TypePtr> locals) {
    switch (e->k) {
      case Expr::K::Var: {
        auto lit = locals.find(e->name);
        if (lit != locals.end()) return lit->second;
        auto git = result_.globals.find(e->name);
        if (git == result_.globals.end())
          fail(e->loc, "unbound name '" + e->name + "'");
        return instantiate_global(e, git->second, nullptr);
      }
      case Expr::K::Scaled: {
        const ExprPtr& inner = e->kids[0];
        if (inner->k != Expr::K::Var)
          fail(e->loc, "a scale marker must be applied to an operation");
        if (locals.count(inner->name))
          fail(e->loc, "a scale marker must be applied to an operation, '" +
                           inner->name + "' is a local");
        auto git = result_.globals.find(inner->name);
        if (git == result_.globals.end() || !git->second.is_op)
          fail(e->loc, "a scale marker must be applied to an operation, '" +
                           inner->name + "' is not one");
        TypePtr t = instantiate_global(inner, git->second, e->scale);
        inner->ty = t;
        return t;
      }
      case Expr::K::Lit:
        switch (e->lit.k) {
          case Literal::K::Int: return SemType::con("int");
          case Literal::K::Float: return SemType::con("float");
          case Literal::K::String: return SemType::con("string");
          case Literal::K::Bool: return SemType::con("bool");
        }
        break;
      case Expr::K::Lambda: {
        TypePtr param = SemType::unif(ctx().fresh_uvar());
        if (e->name != "_") locals[e->name] = param;
        TypePtr body = infer_expr(e->kids[0], locals);
        return SemType::arrow(param, body);
      }
      case Expr::K::App: {
        TypePtr fn = infer_expr(e->kids[0], locals);
        TypePtr arg = infer_expr(e->kids[1], locals);
        TypePtr res = SemType::unif(ctx().fresh_uvar());
        must_unify(fn, SemType::arrow(arg, res), e->loc,
                   "function application");
        return res;
      }
      case Expr::K::LetIn: {
        TypePtr bound = infer_expr(e->kids[0], locals);
        if (e->annot) {
          TypePtr annot = wildcards_to_uvars(number_annotation(e->annot));
          if (has_assign(annot))
            fail(e->loc, "representation assignments are not allowed on let "
                         "annotations");
          e->annot = annot;
          must_unify(bound, annot, e->loc,
                     "let binding does not match its annotation");
          bound = annot;
        }
        if (e->name != "_") locals[e->name] = bound;
        return infer_expr(e->kids[1], locals);
      }
      case Expr::K::If: {
        TypePtr c = infer_expr(e->kids[0], locals);
        must_unify(c, SemType::con("bool"), e->loc, "if condition");
        TypePtr t = infer_expr(e->kids[1], locals);
        TypePtr f = infer_expr(e->kids[2], locals);
        must_unify(t, f, e->loc, "if branches");
        return t;
      }
      case Expr::K::Tuple: {
        std::vector<TypePtr> elems;
        elems.reserve(e->kids.size());
        for (const auto& kid : e->kids)
          elems.push_back(infer_expr(kid, locals));
        return SemType::tuple(std::move(elems));
      }
      case Expr::K::Match:
        return infer_match(e, std::move(locals));
    }
    fail(e->loc, "unsupported expression");
  }

  TypePtr infer_match(const ExprPtr& e, std::map<std::string, TypePtr> locals) {
    TypePtr scrut = infer_expr(e->kids[0], locals);
    TypePtr result;
    for (const auto& arm : e->arms) {
      std::map<std::string, TypePtr> arm_locals = locals;
      if (arm.ctor != "_") {
        auto cit = ctors_.find(arm.ctor);
        if (cit == ctors_.end())
          fail(e->loc, "unknown constructor '" + arm.ctor + "'");
        const CtorInfo& info = cit->second;
        std::map<std::string, TypePtr> map;
        std::vector<TypePtr> params;
        for (const auto& p : info.params) {
          map[p] = SemType::unif(ctx().fresh_uvar());
          params.push_back(map[p]);
        }
        must_unify(scrut, SemType::con(info.variant, params), e->loc,
                   "match scrutinee");
        if (info.args.empty()) {
          if (!arm.binders.empty())
            fail(e->loc, "constructor '" + arm.ctor + "' takes no argument");
        } else if (!arm.binders.empty()) {
          TypePtr arg = substitute_rigids(info.args[0], map);
          if (arm.tuple_pattern && arm.binders.size() > 1) {
            TypePtr res = shallow(ctx(), arg);
            if (res->k == SemType::K::Unif) {
              std::vector<TypePtr> elems;
              for (size_t i = 0; i < arm.binders.size(); ++i)
                elems.push_back(SemType::unif(ctx().fresh_uvar()));
              TypePtr tup = SemType::tuple(std::move(elems));
              must_unify(res, tup, e->loc, "tuple pattern");
              res = tup;
            }
            if (res->k != SemType::K::Tuple ||
                res->args.size() != arm.binders.size())
              fail(e->loc, "pattern arity does not match constructor '" +
                               arm.ctor + "'");
            for (size_t i = 0; i < arm.binders.size(); ++i)
              if (arm.binders[i] != "_")
                arm_locals[arm.binders[i]] = res->args[i];
          } else {
            if (arm.binders[0] != "_") arm_locals[arm.binders[0]] = arg;
          }
        }
      }
      TypePtr body = infer_expr(arm.body, arm_locals);
      if (!result) {
        result = body;
      } else {
        must_unify(result, body, e->loc, "match arms");
      }
    }
    if (!result) fail(e->loc, "match with no arms");
    return result;
  }
};

}  // namespace

InferredProgram infer_program(const Program& alias_expanded) {
  return Inferencer().run(alias_expanded);
}

Program lift_lets(const Program& alias_expanded) {
  InferredProgram inferred = infer_program(alias_expanded);
  Program out;
  for (size_t i = 0; i < alias_expanded.size(); ++i) {
    const DeclPtr& d = alias_expanded[i];
    auto sit = inferred.let_schemes.find(static_cast<int>(i));
    bool lift = d->k == Decl::K::Let && !d->is_rec &&
                sit != inferred.let_schemes.end() &&
                !sit->second.vars.empty() && contains_repr(sit->second.body);
    if (!lift) {
      out.push_back(d);
      continue;
    }
    // The binding becomes an operation plus a zero-cost implementation, so
    // every reference picks representations independently.
    auto strip = [](const TypePtr& t) {
      std::function<TypePtr(const TypePtr&)> go =
          [&](const TypePtr& x) -> TypePtr {
        auto c = std::make_shared<SemType>(*x);
        if (c->k == SemType::K::Repr) c->id = -1;
        for (auto& a : c->args) a = go(a);
        return c;
      };
      return go(t);
    };
    auto op = std::make_shared<Decl>();
    op->k = Decl::K::Op;
    op->loc = d->loc;
    op->name = d->name;
    op->scheme_body = strip(sit->second.body);
    auto impl = std::make_shared<Decl>();
    impl->k = Decl::K::Impl;
    impl->loc = d->loc;
    impl->op = d->name;
    impl->name = d->name;
    impl->cost = CostExpr::literal(0.0);
    impl->body = d->body;
    out.push_back(op);
    out.push_back(impl);
  }
  return out;
}

}  // namespace repml
