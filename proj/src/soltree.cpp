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

#include "repml/soltree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

#include "repml/printer.hpp"

namespace repml {

SolutionPtr recon_build(const Recon& r,
                        const std::vector<SolutionPtr>& chosen) {
  std::vector<SolutionPtr> subs;
  subs.reserve(r.slots.size());
  for (const auto& slot : r.slots)
    subs.push_back(slot.nested ? recon_build(*slot.nested, chosen)
                               : chosen[slot.child]);
  return Solution::make(r.impl, std::move(subs));
}

namespace {

constexpr double kCostEps = 1e-12;

void collect_marks(const TypePtr& t,
                   std::vector<std::pair<int, std::string>>& out) {
  if (t->k == SemType::K::ReprAssign) {
    const TypePtr& inner = t->args[0];
    if (inner->k == SemType::K::Repr && inner->id >= 0)
      out.emplace_back(inner->id, t->name);
  }
  for (const auto& a : t->args) collect_marks(a, out);
}

std::shared_ptr<SolNode> clone(const SolNode& n) {
  return std::make_shared<SolNode>(n);
}

/// Optimistic lower bound on the subtree's cheapest solution cost.
double min_cost(const NodePtr& n) {
  switch (n->k) {
    case SolNode::K::Single:
      return n->cost;
    case SolNode::K::And: {
      double total = n->cost;
      for (const auto& c : n->children) total += min_cost(c);
      return total;
    }
    case SolNode::K::Or: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : n->children) best = std::min(best, min_cost(c));
      return n->scale * best;
    }
  }
  return 0.0;
}

/// One-way matching: `general`'s free unification variables may bind to
/// arbitrary subtrees of `specific` (consistently by id); everything else
/// must match structurally. Rvar ids are ignored (assignments are compared
/// separately); wildcards match anything.
bool instance_of(const TypePtr& general, const TypePtr& specific,
                 std::map<int, TypePtr>& binds) {
  if (general->k == SemType::K::Wildcard ||
      specific->k == SemType::K::Wildcard)
    return true;
  if (general->k == SemType::K::Unif) {
    auto it = binds.find(general->id);
    if (it == binds.end()) {
      binds[general->id] = specific;
      return true;
    }
    return type_equal(it->second, specific);
  }
  if (general->k != specific->k) return false;
  if (general->name != specific->name) return false;
  if (general->args.size() != specific->args.size()) return false;
  for (size_t i = 0; i < general->args.size(); ++i)
    if (!instance_of(general->args[i], specific->args[i], binds)) return false;
  return true;
}

void type_vars(const TypePtr& t, std::set<std::string>& out) {
  switch (t->k) {
    case SemType::K::Unif:
      out.insert("u" + std::to_string(t->id));
      break;
    case SemType::K::Rigid:
      out.insert("n" + t->name);
      break;
    case SemType::K::Repr:
      if (t->id >= 0) out.insert("r" + std::to_string(t->id));
      break;
    default:
      break;
  }
  for (const auto& a : t->args) type_vars(a, out);
}

void node_vars(const NodePtr& n, std::set<std::string>& out) {
  if (n->use_ty) type_vars(n->use_ty, out);
  for (const auto& item : n->cons.items) {
    if (item.k == ConstraintItem::K::TypeEq) {
      type_vars(item.a, out);
      type_vars(item.b, out);
    } else {
      out.insert("r" + std::to_string(item.rvar));
    }
  }
  for (const auto& c : n->children) node_vars(c, out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Constraints

void ConstraintSet::add_eq(TypePtr a, TypePtr b) {
  ConstraintItem it;
  it.k = ConstraintItem::K::TypeEq;
  it.a = std::move(a);
  it.b = std::move(b);
  items.push_back(std::move(it));
}

void ConstraintSet::add_assign(int rvar, std::string repr) {
  ConstraintItem it;
  it.k = ConstraintItem::K::Assign;
  it.rvar = rvar;
  it.repr = std::move(repr);
  items.push_back(std::move(it));
}

void ConstraintSet::append(const ConstraintSet& other) {
  items.insert(items.end(), other.items.begin(), other.items.end());
}

UnifyOutcome replay(const ConstraintSet& cs, UnifCtx& ctx) {
  for (const auto& item : cs.items) {
    UnifyOutcome r = item.k == ConstraintItem::K::TypeEq
                         ? ctx.unify(item.a, item.b)
                         : ctx.assign_repr(item.rvar, item.repr);
    if (r != UnifyOutcome::Ok) return r;
  }
  return UnifyOutcome::Ok;
}

UnifCtx TreeCtx::scratch() const {
  UnifCtx ctx;
  ctx.next_uvar = next_uvar;
  ctx.next_rvar = next_rvar;
  return ctx;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

struct Builder {
  const ProblemInput& p;
  TreeCtx& tc;
  std::vector<std::string> stack;

  NodePtr build_use(const OpUse& use, const UnifCtx& branch) {
    auto orn = std::make_shared<SolNode>();
    orn->k = SolNode::K::Or;
    orn->op = use.op;
    orn->use_id = use.use_id;
    orn->scale = eval_cost(use.scale, tc.env);
    {
      UnifCtx fresh = branch;
      fresh.next_uvar = tc.next_uvar;
      orn->use_ty = freshen_wildcards(use.ty, fresh);
      tc.next_uvar = fresh.next_uvar;
    }

    std::string key = use.op + "|" + canonical_type(branch.resolve(orn->use_ty));
    if (std::find(stack.begin(), stack.end(), key) != stack.end())
      return orn;  // recursion at the same op and type: empty Or
    stack.push_back(key);

    for (const ImplDef* impl : p.impls_for(use.op, use.scope)) {
      UnifCtx ctx2 = branch;
      ctx2.next_uvar = tc.next_uvar;
      ctx2.next_rvar = tc.next_rvar;
      InstantiatedImpl inst = instantiate_impl(*impl, ctx2);
      tc.next_uvar = ctx2.next_uvar;
      tc.next_rvar = ctx2.next_rvar;

      auto andn = std::make_shared<SolNode>();
      andn->k = SolNode::K::And;
      andn->impl = impl;
      andn->cost = eval_cost(impl->cost, tc.env);
      andn->use_id = use.use_id;
      std::vector<std::pair<int, std::string>> marks;
      collect_marks(inst.ty, marks);
      for (const auto& [rv, nm] : marks) andn->cons.add_assign(rv, nm);
      andn->cons.add_eq(strip_repr_markers(inst.ty), orn->use_ty);

      // Constraints propagate down into nested op-uses but not up: apply
      // them to this branch's private context only. An impl whose
      // constraints are already unsatisfiable is omitted.
      if (replay(andn->cons, ctx2) != UnifyOutcome::Ok) continue;

      auto rec = std::make_shared<Recon>();
      rec->impl = impl;
      for (size_t i = 0; i < inst.uses.size(); ++i) {
        rec->slots.push_back({static_cast<int>(i), nullptr});
        andn->children.push_back(build_use(inst.uses[i], ctx2));
      }
      andn->recon = rec;
      orn->children.push_back(andn);
    }
    stack.pop_back();
    return orn;
  }
};

}  // namespace

NodePtr build_tree(const ProblemInput& problem, TreeCtx& tc) {
  tc.problem = &problem;
  tc.next_uvar = std::max(tc.next_uvar, problem.first_free_uvar);
  tc.next_rvar = std::max(tc.next_rvar, problem.first_free_rvar);

  Builder b{problem, tc, {}};
  auto root = std::make_shared<SolNode>();
  root->k = SolNode::K::And;
  root->impl = nullptr;
  auto rec = std::make_shared<Recon>();
  rec->impl = nullptr;
  UnifCtx base = problem.base_ctx();
  for (size_t i = 0; i < problem.top_uses.size(); ++i) {
    rec->slots.push_back({static_cast<int>(i), nullptr});
    root->children.push_back(b.build_use(problem.top_uses[i], base));
  }
  root->recon = rec;
  return root;
}

// ---------------------------------------------------------------------------
// flatten

namespace {

ReconPtr remap_recon(const ReconPtr& r,
                     const std::function<int(int)>& f,
                     int absorbed_at, const ReconPtr& absorbed) {
  auto out = std::make_shared<Recon>(*r);
  for (auto& slot : out->slots) {
    if (slot.nested) {
      slot.nested = remap_recon(slot.nested, f, absorbed_at, absorbed);
    } else if (slot.child == absorbed_at && absorbed) {
      slot.child = -1;
      slot.nested = absorbed;
    } else {
      slot.child = f(slot.child);
    }
  }
  return out;
}

}  // namespace

NodePtr flatten(const NodePtr& t) {
  auto n = clone(*t);
  for (auto& c : n->children) c = flatten(c);
  if (n->k != SolNode::K::And) return n;

  for (size_t p = 0; p < n->children.size();) {
    const NodePtr& child = n->children[p];
    if (child->k != SolNode::K::And) {
      ++p;
      continue;
    }
    NodePtr b = child;
    int m = static_cast<int>(b->children.size());
    int pi = static_cast<int>(p);
    // The absorbed node's recon indices shift to its splice position.
    ReconPtr babs = remap_recon(
        b->recon, [&](int q) { return q + pi; }, -1, nullptr);
    n->recon = remap_recon(
        n->recon,
        [&](int q) { return q > pi ? q + m - 1 : q; }, pi, babs);
    n->cost += b->cost;
    n->cons.append(b->cons);
    std::vector<NodePtr> merged;
    merged.reserve(n->children.size() + m - 1);
    merged.insert(merged.end(), n->children.begin(), n->children.begin() + pi);
    merged.insert(merged.end(), b->children.begin(), b->children.end());
    merged.insert(merged.end(), n->children.begin() + pi + 1,
                  n->children.end());
    n->children = std::move(merged);
    // Re-scan from the splice point (the absorbed node's children are Ors).
  }
  return n;
}

// ---------------------------------------------------------------------------
// propagate

namespace {

/// Folds an elided Or's scale into its surviving child.
NodePtr fold_scale(const NodePtr& child, double scale, int use_id) {
  auto c = clone(*child);
  c->use_id = use_id;
  if (c->k == SolNode::K::Single) {
    c->cost *= scale;
  } else if (c->k == SolNode::K::And) {
    c->cost *= scale;
    for (auto& g : c->children) {
      auto g2 = clone(*g);
      g2->scale *= scale;
      g = g2;
    }
  }
  return c;
}

bool consistent(const TreeCtx& tc, const ConstraintSet& cs) {
  UnifCtx ctx = tc.scratch();
  return replay(cs, ctx) == UnifyOutcome::Ok;
}

/// Replayed per-Single state for dominance checks: the representation
/// choices on the externally visible rvar classes and the resolved use
/// type. Computed once per Or child so pairwise checks need no replays.
struct DomInfo {
  std::map<int, std::string> reprs;
  TypePtr resolved;
};

std::optional<DomInfo> dom_info(const NodePtr& c, const SolNode& orn,
                                const TreeCtx& tc, const ConstraintSet& anc,
                                const std::vector<int>& keys) {
  UnifCtx ctx = tc.scratch();
  ConstraintSet cs = anc;
  cs.append(c->cons);
  if (replay(cs, ctx) != UnifyOutcome::Ok) return std::nullopt;
  DomInfo info;
  for (int k : keys) {
    if (auto r = ctx.repr_of(k)) info.reprs.emplace(k, *r);
  }
  if (orn.use_ty) info.resolved = ctx.resolve(orn.use_ty);
  return info;
}

/// Single-vs-Single dominance at an Or node (only certain wins prune):
/// a dominates b iff a is no more expensive, a's representation choices on
/// the externally visible rvar classes are a subset of b's, and b's resolved
/// use type is an instance of a's.
bool dominates(const NodePtr& a, const DomInfo& ia, const NodePtr& b,
               const DomInfo& ib, const SolNode& orn) {
  if (a->cost > b->cost + kCostEps) return false;

  for (const auto& [k, ra] : ia.reprs) {
    auto it = ib.reprs.find(k);
    if (it == ib.reprs.end() || it->second != ra) return false;
  }

  if (!orn.use_ty) return true;  // a collapse-produced Or has no use type
  std::map<int, TypePtr> binds;
  return instance_of(ia.resolved, ib.resolved, binds);
}

struct Propagator {
  const TreeCtx& tc;
  bool prune;
  bool changed = false;

  NodePtr run(const NodePtr& n, const ConstraintSet& anc) {
    ConstraintSet path = anc;
    path.append(n->cons);
    if (!consistent(tc, path)) {
      changed = true;
      return nullptr;
    }
    if (n->k == SolNode::K::Single) return n;

    auto out = clone(*n);
    std::vector<NodePtr> kids;
    for (const auto& c : n->children) {
      NodePtr nc = run(c, path);
      if (!nc) {
        if (n->k == SolNode::K::And) {
          changed = true;
          return nullptr;  // an impl needs every op-use solvable
        }
        continue;  // an Or just loses an alternative
      }
      kids.push_back(nc);
    }
    out->children = std::move(kids);

    if (out->k == SolNode::K::Or) {
      // Nested Or nodes are flattened (fold the inner scale in).
      std::vector<NodePtr> flat;
      for (const auto& c : out->children) {
        if (c->k == SolNode::K::Or) {
          changed = true;
          for (const auto& g : c->children)
            flat.push_back(fold_scale(g, c->scale, out->use_id));
        } else {
          flat.push_back(c);
        }
      }
      out->children = std::move(flat);

      if (prune) prune_singles(out, path);

      if (out->children.size() == 1) {
        changed = true;
        return fold_scale(out->children[0], out->scale, out->use_id);
      }
      return out;
    }

    // And: an empty Or child means some op-use has no alternative left.
    for (const auto& c : out->children) {
      if (c->k == SolNode::K::Or && c->children.empty()) {
        changed = true;
        return nullptr;
      }
    }
    // Collapse when everything below is decided (vacuously for leaf impls
    // and the empty root, which has one trivial solution).
    bool all_single = true;
    for (const auto& c : out->children)
      if (c->k != SolNode::K::Single) all_single = false;
    if (all_single) {
      ConstraintSet merged = out->cons;
      std::vector<SolutionPtr> chosen;
      double total = out->cost;
      for (const auto& c : out->children) {
        merged.append(c->cons);
        chosen.push_back(c->sol);
        total += c->cost;
      }
      ConstraintSet full = anc;
      full.append(merged);
      if (!consistent(tc, full)) {
        changed = true;
        return nullptr;
      }
      auto single = std::make_shared<SolNode>();
      single->k = SolNode::K::Single;
      single->sol = recon_build(*out->recon, chosen);
      single->cost = total;
      single->cons = std::move(merged);
      single->use_id = out->use_id;
      changed = true;
      return single;
    }
    return out;
  }

  void prune_singles(std::shared_ptr<SolNode>& orn, const ConstraintSet& anc) {
    std::vector<int> keys;
    {
      keys.reserve(tc.problem->first_free_rvar);
      for (int r = 0; r < tc.problem->first_free_rvar; ++r) keys.push_back(r);
      std::set<std::string> vars;
      if (orn->use_ty) type_vars(orn->use_ty, vars);
      for (const auto& v : vars)
        if (v[0] == 'r') keys.push_back(std::stoi(v.substr(1)));
    }
    struct Entry {
      NodePtr node;
      std::optional<DomInfo> info;
    };
    std::vector<Entry> kept;
    for (const auto& c : orn->children) {
      std::optional<DomInfo> info;
      if (c->k == SolNode::K::Single) info = dom_info(c, *orn, tc, anc, keys);
      if (!info) {
        kept.push_back({c, std::nullopt});
        continue;
      }
      bool dead = false;
      for (const auto& k : kept) {
        if (k.info && dominates(k.node, *k.info, c, *info, *orn)) {
          dead = true;
          break;
        }
      }
      if (dead) {
        changed = true;
        continue;
      }
      // The newcomer may retroactively dominate earlier survivors.
      std::vector<Entry> still;
      for (auto& k : kept) {
        if (k.info && dominates(c, *info, k.node, *k.info, *orn)) {
          changed = true;
          continue;
        }
        still.push_back(std::move(k));
      }
      still.push_back({c, std::move(info)});
      kept = std::move(still);
    }
    orn->children.clear();
    for (auto& k : kept) orn->children.push_back(std::move(k.node));
  }
};

}  // namespace

NodePtr propagate(const NodePtr& t, const TreeCtx& tc, bool prune) {
  NodePtr cur = t;
  for (int iter = 0; iter < 64; ++iter) {
    Propagator p{tc, prune};
    NodePtr next = p.run(cur, {});
    if (!next) return nullptr;
    cur = next;
    if (!p.changed) break;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// partition

std::vector<NodePtr> partition(const NodePtr& t,
                               std::vector<std::vector<int>>* members_out) {
  if (t->k != SolNode::K::And || t->children.empty()) {
    if (members_out) members_out->assign(1, {});
    return {t};
  }
  size_t n = t->children.size();
  // Entities 0..n-1 are the children; each root constraint item is a
  // further entity gluing together every child whose vars it touches
  // (flatten folds absorbed impls' constraints into the root).
  size_t m = t->cons.items.size();
  std::vector<std::set<std::string>> vars(n + m);
  for (size_t i = 0; i < n; ++i) node_vars(t->children[i], vars[i]);
  for (size_t i = 0; i < m; ++i) {
    const auto& item = t->cons.items[i];
    if (item.k == ConstraintItem::K::TypeEq) {
      type_vars(item.a, vars[n + i]);
      type_vars(item.b, vars[n + i]);
    } else {
      vars[n + i].insert("r" + std::to_string(item.rvar));
    }
  }

  std::vector<size_t> comp(n + m);
  for (size_t i = 0; i < n + m; ++i) comp[i] = i;
  std::function<size_t(size_t)> find = [&](size_t x) {
    return comp[x] == x ? x : comp[x] = find(comp[x]);
  };
  std::map<std::string, size_t> var_owner;
  for (size_t i = 0; i < n + m; ++i) {
    for (const auto& v : vars[i]) {
      auto [it, fresh] = var_owner.emplace(v, i);
      if (!fresh) comp[find(i)] = find(it->second);
    }
  }

  std::map<size_t, std::vector<size_t>> groups;
  for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

  if (members_out) members_out->clear();
  std::vector<NodePtr> out;
  for (const auto& [root, members] : groups) {
    if (members_out) {
      std::vector<int> idx(members.begin(), members.end());
      members_out->push_back(std::move(idx));
    }
    auto comp_root = std::make_shared<SolNode>();
    comp_root->k = SolNode::K::And;
    comp_root->impl = nullptr;
    comp_root->cons = t->cons;
    auto rec = std::make_shared<Recon>();
    rec->impl = nullptr;
    for (size_t i = 0; i < members.size(); ++i) {
      rec->slots.push_back({static_cast<int>(i), nullptr});
      comp_root->children.push_back(t->children[members[i]]);
    }
    comp_root->recon = rec;
    out.push_back(comp_root);
  }
  return out;
}

// ---------------------------------------------------------------------------
// collapse_leaves

namespace {

bool all_singles(const NodePtr& n) {
  for (const auto& c : n->children)
    if (c->k != SolNode::K::Single) return false;
  return true;
}

struct Collapser {
  const TreeCtx& tc;

  NodePtr run(const NodePtr& n, const ConstraintSet& anc) {
    if (n->k == SolNode::K::Single) return n;
    ConstraintSet path = anc;
    path.append(n->cons);
    auto out = clone(*n);
    for (auto& c : out->children) c = run(c, path);
    if (out->k != SolNode::K::And) return out;

    // Collapsible iff every child is a Single or an Or of Singles.
    for (const auto& c : out->children) {
      if (c->k == SolNode::K::Single) continue;
      if (c->k == SolNode::K::Or && all_singles(c)) continue;
      return out;
    }

    struct Option {
      SolutionPtr sol;
      double cost;
      const ConstraintSet* cons;
    };
    std::vector<std::vector<Option>> options;
    for (const auto& c : out->children) {
      std::vector<Option> opts;
      if (c->k == SolNode::K::Single) {
        opts.push_back({c->sol, c->cost, &c->cons});
      } else {
        for (const auto& s : c->children)
          opts.push_back({s->sol, c->scale * s->cost, &s->cons});
      }
      options.push_back(std::move(opts));
    }

    auto result = std::make_shared<SolNode>();
    result->k = SolNode::K::Or;
    result->op = out->impl ? out->impl->op : "<root>";
    result->use_id = out->use_id;
    result->scale = 1.0;

    for (const auto& opts : options)
      if (opts.empty()) return result;  // no combinations at all

    // Depth-first over one option per child, replaying each option's
    // constraints as it is chosen so that inconsistent prefixes are pruned
    // without enumerating the full cross-product.
    UnifCtx base = tc.scratch();
    {
      ConstraintSet head = anc;
      head.append(out->cons);
      if (replay(head, base) != UnifyOutcome::Ok) return result;
    }
    std::set<std::string> seen;
    std::vector<const Option*> picked(options.size(), nullptr);
    auto dfs = [&](auto&& self, size_t level, const UnifCtx& ctx) -> void {
      if (level == options.size()) {
        ConstraintSet merged = out->cons;
        std::vector<SolutionPtr> chosen;
        double total = out->cost;
        for (const Option* o : picked) {
          merged.append(*o->cons);
          chosen.push_back(o->sol);
          total += o->cost;
        }
        auto single = std::make_shared<SolNode>();
        single->k = SolNode::K::Single;
        single->sol = recon_build(*out->recon, chosen);
        single->cost = total;
        single->cons = std::move(merged);
        single->use_id = out->use_id;
        if (seen.insert(solution_brief(single->sol)).second)
          result->children.push_back(single);
        return;
      }
      for (const Option& o : options[level]) {
        UnifCtx next = ctx;
        if (replay(*o.cons, next) != UnifyOutcome::Ok) continue;
        picked[level] = &o;
        self(self, level + 1, next);
      }
    };
    dfs(dfs, 0, base);
    return result;
  }
};

}  // namespace

NodePtr collapse_leaves(const NodePtr& t, const TreeCtx& tc) {
  Collapser c{tc};
  return c.run(t, {});
}

// ---------------------------------------------------------------------------
// homogenize

namespace {

void gather_over(const NodePtr& n, const TreeCtx& tc, const ConstraintSet& anc,
                 std::map<int, std::set<std::string>>& over) {
  ConstraintSet path = anc;
  path.append(n->cons);
  if (n->k == SolNode::K::And || n->k == SolNode::K::Single) {
    UnifCtx ctx = tc.scratch();
    if (replay(path, ctx) == UnifyOutcome::Ok) {
      ReprAssignment snap = snapshot_assignment(*tc.problem, ctx);
      for (const auto& [cls, name] : snap.by_class) over[cls].insert(name);
    }
  }
  for (const auto& c : n->children) gather_over(c, tc, path, over);
}

void enumerate_assignments(
    const std::vector<const ReprDef*>& reprs,
    std::map<int, std::set<std::string>> remaining,
    std::map<int, std::string> acc, bool all_variants,
    std::vector<std::map<int, std::string>>& out) {
  if (remaining.empty()) {
    if (std::find(out.begin(), out.end(), acc) == out.end())
      out.push_back(std::move(acc));
    return;
  }
  bool picked_any = false;
  for (const ReprDef* r : reprs) {
    std::map<int, std::set<std::string>> rest;
    std::map<int, std::string> acc2 = acc;
    bool applies = false;
    for (const auto& [cls, names] : remaining) {
      if (names.count(r->name)) {
        acc2[cls] = r->name;
        applies = true;
      } else {
        rest[cls] = names;
      }
    }
    if (!applies) continue;
    picked_any = true;
    enumerate_assignments(reprs, std::move(rest), std::move(acc2),
                          all_variants, out);
    if (!all_variants) return;  // first representation in declaration order
  }
  if (!picked_any) {
    // Shouldn't happen (over-sets are nonempty), but stay safe.
    if (std::find(out.begin(), out.end(), acc) == out.end())
      out.push_back(std::move(acc));
  }
}

}  // namespace

std::vector<NodePtr> homogenize(
    const NodePtr& t, const TreeCtx& tc, bool all_variants,
    std::vector<std::map<int, std::string>>* out_assignments) {
  std::map<int, std::set<std::string>> over;
  gather_over(t, tc, {}, over);

  std::vector<const ReprDef*> reprs;
  for (const auto& r : tc.problem->reprs) reprs.push_back(&r);

  std::vector<std::map<int, std::string>> assignments;
  if (over.empty()) {
    assignments.push_back({});
  } else {
    enumerate_assignments(reprs, over, {}, all_variants, assignments);
  }
  if (out_assignments) *out_assignments = assignments;

  std::vector<NodePtr> out;
  for (const auto& a : assignments) {
    auto c = clone(*t);
    for (const auto& [cls, name] : a) c->cons.add_assign(cls, name);
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// materialize_lazy

namespace {

struct Stream {
  virtual ~Stream() = default;
  /// i-th cheapest candidate, or nullptr when exhausted.
  virtual const Cand* get(size_t i) = 0;
};

struct SingleStream : Stream {
  std::vector<Cand> memo;
  SingleStream(const NodePtr& n, const TreeCtx& tc, const ConstraintSet& anc) {
    ConstraintSet full = anc;
    full.append(n->cons);
    UnifCtx ctx = tc.scratch();
    if (replay(full, ctx) == UnifyOutcome::Ok)
      memo.push_back({n->sol, n->cost, n->cons});
  }
  const Cand* get(size_t i) override {
    return i < memo.size() ? &memo[i] : nullptr;
  }
};

std::unique_ptr<Stream> make_stream(const NodePtr& n, const TreeCtx& tc,
                                    const ConstraintSet& anc);

struct OrStream : Stream {
  double scale;
  std::vector<std::unique_ptr<Stream>> kids;
  // (cost, child, index-in-child)
  using Entry = std::tuple<double, size_t, size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<Cand> memo;
  std::set<std::string> seen;

  OrStream(const NodePtr& n, const TreeCtx& tc, const ConstraintSet& anc)
      : scale(n->scale) {
    ConstraintSet path = anc;
    path.append(n->cons);
    for (const auto& c : n->children)
      kids.push_back(make_stream(c, tc, path));
    for (size_t i = 0; i < kids.size(); ++i)
      if (const Cand* c = kids[i]->get(0)) heap.emplace(c->cost, i, 0);
  }

  const Cand* get(size_t i) override {
    while (memo.size() <= i) {
      if (heap.empty()) return nullptr;
      auto [cost, child, idx] = heap.top();
      heap.pop();
      Cand c = *kids[child]->get(idx);  // copy: the next get() may reallocate
      if (const Cand* nxt = kids[child]->get(idx + 1))
        heap.emplace(nxt->cost, child, idx + 1);
      if (seen.insert(solution_brief(c.sol)).second)
        memo.push_back({c.sol, scale * c.cost, c.cons});
    }
    return &memo[i];
  }
};

struct AndStream : Stream {
  const SolNode* node;
  const TreeCtx& tc;
  ConstraintSet path;
  std::vector<std::unique_ptr<Stream>> kids;
  struct Entry {
    double cost;
    std::vector<size_t> idx;
    bool operator>(const Entry& o) const { return cost > o.cost; }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::set<std::vector<size_t>> visited;
  std::vector<Cand> memo;

  AndStream(const NodePtr& n, const TreeCtx& tcx, const ConstraintSet& anc)
      : node(n.get()), tc(tcx) {
    path = anc;
    path.append(n->cons);
    for (const auto& c : n->children) kids.push_back(make_stream(c, tc, path));
    std::vector<size_t> first(kids.size(), 0);
    double cost = node->cost;
    bool ok = true;
    for (size_t i = 0; i < kids.size(); ++i) {
      const Cand* c = kids[i]->get(0);
      if (!c) {
        ok = false;
        break;
      }
      cost += c->cost;
    }
    if (ok) {
      visited.insert(first);
      heap.push({cost, std::move(first)});
    }
  }

  const Cand* get(size_t i) override {
    while (memo.size() <= i) {
      if (heap.empty()) return nullptr;
      Entry e = heap.top();
      heap.pop();
      // Successors first so skipped (inconsistent) combos still expand.
      for (size_t j = 0; j < kids.size(); ++j) {
        std::vector<size_t> nxt = e.idx;
        nxt[j]++;
        if (visited.count(nxt)) continue;
        const Cand* c = kids[j]->get(nxt[j]);
        if (!c) continue;
        double cost = node->cost;
        bool ok = true;
        for (size_t q = 0; q < kids.size(); ++q) {
          const Cand* cq = kids[q]->get(nxt[q]);
          if (!cq) {
            ok = false;
            break;
          }
          cost += cq->cost;
        }
        if (!ok) continue;
        visited.insert(nxt);
        heap.push({cost, std::move(nxt)});
      }
      // Check and emit the popped combination.
      ConstraintSet merged = node->cons;
      std::vector<SolutionPtr> chosen;
      for (size_t q = 0; q < kids.size(); ++q) {
        const Cand* cq = kids[q]->get(e.idx[q]);
        merged.append(cq->cons);
        chosen.push_back(cq->sol);
      }
      ConstraintSet full = path;
      // `path` already includes node->cons; rebuild cleanly:
      full = ConstraintSet{};
      full.append(path);
      for (size_t q = 0; q < kids.size(); ++q)
        full.append(kids[q]->get(e.idx[q])->cons);
      UnifCtx ctx = tc.scratch();
      if (replay(full, ctx) != UnifyOutcome::Ok) continue;
      memo.push_back({recon_build(*node->recon, chosen), e.cost, merged});
    }
    return &memo[i];
  }
};

std::unique_ptr<Stream> make_stream(const NodePtr& n, const TreeCtx& tc,
                                    const ConstraintSet& anc) {
  switch (n->k) {
    case SolNode::K::Single:
      return std::make_unique<SingleStream>(n, tc, anc);
    case SolNode::K::Or:
      return std::make_unique<OrStream>(n, tc, anc);
    case SolNode::K::And:
      return std::make_unique<AndStream>(n, tc, anc);
  }
  return nullptr;
}

}  // namespace

struct Materializer::Impl {
  std::unique_ptr<Stream> stream;
  size_t i = 0;
};

Materializer::Materializer(NodePtr root, const TreeCtx& tc)
    : impl_(std::make_unique<Impl>()) {
  impl_->stream = make_stream(root, tc, {});
}

Materializer::~Materializer() = default;

std::optional<Cand> Materializer::next() {
  const Cand* c = impl_->stream->get(impl_->i);
  if (!c) return std::nullopt;
  ++impl_->i;
  return *c;
}

// ---------------------------------------------------------------------------
// materialize_guided

namespace {

std::optional<Cand> guided(const NodePtr& n, const TreeCtx& tc,
                           const ConstraintSet& given) {
  switch (n->k) {
    case SolNode::K::Single: {
      ConstraintSet full = given;
      full.append(n->cons);
      UnifCtx ctx = tc.scratch();
      if (replay(full, ctx) != UnifyOutcome::Ok) return std::nullopt;
      return Cand{n->sol, n->cost, n->cons};
    }
    case SolNode::K::Or: {
      // Cheapest-first by optimistic bound.
      std::vector<std::pair<double, NodePtr>> order;
      for (const auto& c : n->children) order.emplace_back(min_cost(c), c);
      std::stable_sort(order.begin(), order.end(),
                       [](const auto& a, const auto& b) {
                         return a.first < b.first;
                       });
      for (const auto& [bound, c] : order) {
        auto r = guided(c, tc, given);
        if (r) {
          r->cost *= n->scale;
          return r;
        }
      }
      return std::nullopt;
    }
    case SolNode::K::And: {
      ConstraintSet base = given;
      base.append(n->cons);
      {
        UnifCtx ctx = tc.scratch();
        if (replay(base, ctx) != UnifyOutcome::Ok) return std::nullopt;
      }
      size_t m = n->children.size();
      std::vector<std::optional<Cand>> picks(m);
      for (size_t i = 0; i < m; ++i) {
        picks[i] = guided(n->children[i], tc, base);
        if (!picks[i]) return std::nullopt;
      }
      for (int fuel = 0; fuel < 16; ++fuel) {
        ConstraintSet all = base;
        for (const auto& p : picks) all.append(p->cons);
        UnifCtx ctx = tc.scratch();
        if (replay(all, ctx) == UnifyOutcome::Ok) {
          std::vector<SolutionPtr> chosen;
          ConstraintSet merged = n->cons;
          double total = n->cost;
          for (const auto& p : picks) {
            chosen.push_back(p->sol);
            merged.append(p->cons);
            total += p->cost;
          }
          return Cand{recon_build(*n->recon, chosen), total, merged};
        }
        // Combine the constraints of the children that agree (in order);
        // re-request solutions for the rest under the combined constraint.
        ConstraintSet combined = base;
        std::vector<size_t> redo;
        for (size_t i = 0; i < m; ++i) {
          ConstraintSet trial = combined;
          trial.append(picks[i]->cons);
          UnifCtx c2 = tc.scratch();
          if (replay(trial, c2) == UnifyOutcome::Ok) {
            combined = std::move(trial);
          } else {
            redo.push_back(i);
          }
        }
        if (redo.empty()) return std::nullopt;  // no progress possible
        for (size_t i : redo) {
          picks[i] = guided(n->children[i], tc, combined);
          if (!picks[i]) return std::nullopt;
          combined.append(picks[i]->cons);
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Cand> materialize_guided(const NodePtr& t, const TreeCtx& tc,
                                       const ConstraintSet& initial) {
  return guided(t, tc, initial);
}

// ---------------------------------------------------------------------------
// rendering and metrics

namespace {

std::string fmt_cost(double c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

void render_rec(const NodePtr& n, const TreeCtx& tc, const ConstraintSet& anc,
                int depth, std::ostringstream& os) {
  std::string ind(static_cast<size_t>(depth) * 2, ' ');
  ConstraintSet path = anc;
  path.append(n->cons);
  switch (n->k) {
    case SolNode::K::And: {
      os << ind << "and "
         << (n->impl ? n->impl->op + "#" + std::to_string(n->impl->impl_index)
                     : std::string("<root>"))
         << " cost=" << fmt_cost(n->cost);
      UnifCtx ctx = tc.scratch();
      if (replay(path, ctx) == UnifyOutcome::Ok) {
        ReprAssignment snap = snapshot_assignment(*tc.problem, ctx);
        if (!snap.by_class.empty()) {
          os << " repr={";
          bool first = true;
          for (const auto& [cls, name] : snap.by_class) {
            if (!first) os << ",";
            first = false;
            os << cls << ":" << name;
          }
          os << "}";
        }
      } else {
        os << " repr=<contradictory>";
      }
      os << "\n";
      break;
    }
    case SolNode::K::Or:
      os << ind << "or " << n->op << " scale=" << fmt_cost(n->scale)
         << (n->use_ty ? " ty=" + canonical_type(n->use_ty) : std::string())
         << "\n";
      break;
    case SolNode::K::Single: {
      os << ind << "single " << solution_brief(n->sol)
         << " cost=" << fmt_cost(n->cost);
      UnifCtx ctx = tc.scratch();
      if (replay(path, ctx) == UnifyOutcome::Ok) {
        ReprAssignment snap = snapshot_assignment(*tc.problem, ctx);
        if (!snap.by_class.empty()) {
          os << " repr={";
          bool first = true;
          for (const auto& [cls, name] : snap.by_class) {
            if (!first) os << ",";
            first = false;
            os << cls << ":" << name;
          }
          os << "}";
        }
      }
      os << "\n";
      break;
    }
  }
  for (const auto& c : n->children) render_rec(c, tc, path, depth + 1, os);
}

}  // namespace

std::string render_tree(const NodePtr& t, const TreeCtx& tc) {
  std::ostringstream os;
  render_rec(t, tc, {}, 0, os);
  return os.str();
}

double solution_space_estimate(const NodePtr& t) {
  switch (t->k) {
    case SolNode::K::Single:
      return 1.0;
    case SolNode::K::And: {
      double prod = 1.0;
      for (const auto& c : t->children) {
        prod *= solution_space_estimate(c);
        if (prod > 1e18) return 1e18;
      }
      return prod;
    }
    case SolNode::K::Or: {
      double total = 0.0;
      for (const auto& c : t->children) {
        total += solution_space_estimate(c);
        if (total > 1e18) return 1e18;
      }
      return total;
    }
  }
  return 1.0;
}

}  // namespace repml
