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

#include "repml/smt.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "repml/printer.hpp"

namespace repml {

namespace {

std::string fmt_real(double v) {
  if (v < 0) return "(- " + fmt_real(-v) + ")";
  char buf[64];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.1f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.12f", v);
  }
  return buf;
}

std::string child_label(const NodePtr& c) {
  if (c->k == SolNode::K::Single) return solution_brief(c->sol);
  if (c->impl)
    return c->impl->op + "#" + std::to_string(c->impl->impl_index);
  return "<and>";
}

struct Encoder {
  const TreeCtx& tc;
  std::ostringstream header;
  std::vector<std::string> asserts;
  std::vector<std::string> cost_terms;
  std::map<std::string, std::pair<NodePtr, NodePtr>> selections;
  std::vector<std::string> sel_order;
  std::set<int> rvars;
  std::set<int> uvars;
  std::map<std::string, int> repr_code;
  std::map<std::string, int> ty_code;
  int or_count = 0;

  explicit Encoder(const TreeCtx& t) : tc(t) {
    // Declared representations get stable codes in declaration order.
    for (const auto& r : tc.problem->reprs)
      repr_code.emplace(r.name, static_cast<int>(repr_code.size()));
  }

  int code_of_repr(const std::string& name) {
    return repr_code.emplace(name, static_cast<int>(repr_code.size()))
        .first->second;
  }

  /// Integer code for an opaque type fingerprint (ground types, and the
  /// documented approximation for composites that still contain variables).
  int code_of_type(const TypePtr& t) {
    std::string fp = canonical_type(t);
    return ty_code.emplace(fp, static_cast<int>(ty_code.size())).first->second;
  }

  std::string rv(int id) {
    rvars.insert(id);
    return "rv_" + std::to_string(id);
  }
  std::string tv(int id) {
    uvars.insert(id);
    return "tv_" + std::to_string(id);
  }

  void guarded(const std::string& g, const std::string& body) {
    if (g == "true")
      asserts.push_back("(assert " + body + ")");
    else
      asserts.push_back("(assert (=> " + g + " " + body + "))");
  }

  /// Structural decomposition of a type equality into integer equalities
  /// over unification-variable and fingerprint codes. Mixed cases that a
  /// full unifier would decompose further fall back to fingerprint codes.
  void eq(const TypePtr& a, const TypePtr& b, const std::string& g) {
    using K = SemType::K;
    if (a->k == K::Wildcard || b->k == K::Wildcard) return;
    if (a->k == K::ReprAssign) {
      const TypePtr& inner = a->args[0];
      if (inner->k == K::Repr && inner->id >= 0)
        guarded(g, "(= " + rv(inner->id) + " " +
                       std::to_string(code_of_repr(a->name)) + ")");
      eq(inner, b, g);
      return;
    }
    if (b->k == K::ReprAssign) {
      eq(b, a, g);
      return;
    }
    if (a->k == K::Unif && b->k == K::Unif) {
      if (a->id != b->id) guarded(g, "(= " + tv(a->id) + " " + tv(b->id) + ")");
      return;
    }
    if (a->k == K::Unif || b->k == K::Unif) {
      const TypePtr& u = a->k == K::Unif ? a : b;
      const TypePtr& other = a->k == K::Unif ? b : a;
      guarded(g, "(= " + tv(u->id) + " " +
                     std::to_string(code_of_type(other)) + ")");
      return;
    }
    if (a->k == K::Repr && b->k == K::Repr) {
      if (a->id >= 0 && b->id >= 0 && a->id != b->id)
        guarded(g, "(= " + rv(a->id) + " " + rv(b->id) + ")");
      eq(a->args[0], b->args[0], g);
      return;
    }
    bool same_shape =
        a->k == b->k && a->name == b->name && a->args.size() == b->args.size();
    if (!same_shape) {
      guarded(g, "false");
      return;
    }
    for (size_t i = 0; i < a->args.size(); ++i) eq(a->args[i], b->args[i], g);
  }

  void emit_cons(const ConstraintSet& cs, const std::string& g) {
    for (const auto& item : cs.items) {
      if (item.k == ConstraintItem::K::Assign) {
        guarded(g, "(= " + rv(item.rvar) + " " +
                       std::to_string(code_of_repr(item.repr)) + ")");
      } else {
        eq(item.a, item.b, g);
      }
    }
  }

  void walk(const NodePtr& n, const std::string& g, double mult) {
    emit_cons(n->cons, g);
    switch (n->k) {
      case SolNode::K::Single:
        if (n->cost != 0.0)
          cost_terms.push_back("(ite " + g + " " + fmt_real(mult * n->cost) +
                               " 0.0)");
        return;
      case SolNode::K::And:
        if (n->cost != 0.0)
          cost_terms.push_back("(ite " + g + " " + fmt_real(mult * n->cost) +
                               " 0.0)");
        for (const auto& c : n->children) walk(c, g, mult);
        return;
      case SolNode::K::Or: {
        int id = or_count++;
        header << "; or " << id << ": op=" << n->op << " use_id=" << n->use_id
               << " guard=" << g << "\n";
        std::vector<std::string> sels;
        for (size_t j = 0; j < n->children.size(); ++j) {
          std::string s = "sel_" + std::to_string(id) + "_" +
                          std::to_string(j);
          sels.push_back(s);
          sel_order.push_back(s);
          selections.emplace(s, std::make_pair(n, n->children[j]));
          header << ";   " << s << " -> " << child_label(n->children[j])
                 << "\n";
        }
        if (sels.empty()) {
          guarded(g, "false");  // dead op-use: no alternative exists
          return;
        }
        // Exactly one child, reachable only under the guard.
        std::string any = "(or";
        for (const auto& s : sels) any += " " + s;
        any += ")";
        guarded(g, any);
        for (size_t i = 0; i < sels.size(); ++i)
          for (size_t j = i + 1; j < sels.size(); ++j)
            asserts.push_back("(assert (not (and " + sels[i] + " " + sels[j] +
                              ")))");
        for (const auto& s : sels)
          if (g != "true")
            asserts.push_back("(assert (=> " + s + " " + g + "))");
        for (size_t j = 0; j < n->children.size(); ++j)
          walk(n->children[j], sels[j], mult * n->scale);
        return;
      }
    }
  }

  std::string render() {
    std::ostringstream out;
    out << "; repml solution-tree encoding (SMT-LIB2)\n";
    out << "; node <-> variable mapping:\n";
    out << header.str();
    for (const auto& [name, code] : repr_code)
      out << "; repr code " << code << " = " << name << "\n";
    for (const auto& [fp, code] : ty_code)
      out << "; type code " << code << " = " << fp << "\n";
    out << "(set-option :produce-models true)\n";
    for (const auto& s : sel_order)
      out << "(declare-const " << s << " Bool)\n";
    for (int r : rvars) out << "(declare-const rv_" << r << " Int)\n";
    for (int u : uvars) out << "(declare-const tv_" << u << " Int)\n";
    for (const auto& a : asserts) out << a << "\n";
    out << "(define-fun total_cost () Real (+ 0.0";
    for (const auto& t : cost_terms) out << " " << t;
    out << "))\n";
    out << "(minimize total_cost)\n";
    out << "(check-sat)\n";
    out << "(get-model)\n";
    return out.str();
  }
};

}  // namespace

SmtEncoding encode_smt_tree(const NodePtr& t, const TreeCtx& tc) {
  Encoder enc(tc);
  enc.walk(t, "true", 1.0);
  SmtEncoding out;
  out.text = enc.render();
  out.root = t;
  out.selections = std::move(enc.selections);
  return out;
}

std::string encode_smt(const NodePtr& t, const TreeCtx& tc) {
  return encode_smt_tree(t, tc).text;
}

namespace {

/// Pulls `(define-fun <name> () Bool true)` bindings out of a model dump.
std::set<std::string> true_selections(const std::string& model) {
  std::set<std::string> out;
  size_t pos = 0;
  const std::string key = "define-fun";
  while ((pos = model.find(key, pos)) != std::string::npos) {
    pos += key.size();
    size_t ns = model.find_first_not_of(" \t\n", pos);
    if (ns == std::string::npos) break;
    size_t ne = model.find_first_of(" \t\n(", ns);
    std::string name = model.substr(ns, ne - ns);
    size_t close = model.find(')', ne);  // end of the empty arg list
    if (close == std::string::npos) break;
    size_t vs = model.find_first_not_of(" \t\n", close + 1);
    if (vs == std::string::npos) break;
    // Skip the sort token ("Bool") to reach the value.
    size_t sort_end = model.find_first_of(" \t\n", vs);
    if (sort_end == std::string::npos) break;
    size_t val = model.find_first_not_of(" \t\n", sort_end);
    if (val != std::string::npos && model.compare(val, 4, "true") == 0)
      out.insert(name);
    pos = ne;
  }
  return out;
}

struct Decoder {
  const SmtEncoding& enc;
  const std::set<std::string>& selected;
  bool ok = true;

  NodePtr chosen_child(const NodePtr& orn) {
    for (const auto& [name, pair] : enc.selections)
      if (pair.first == orn && selected.count(name)) return pair.second;
    return nullptr;
  }

  SolutionPtr build(const NodePtr& n, ConstraintSet& acc, double& cost,
                    double mult) {
    acc.append(n->cons);
    switch (n->k) {
      case SolNode::K::Single:
        cost += mult * n->cost;
        return n->sol;
      case SolNode::K::And: {
        cost += mult * n->cost;
        std::vector<SolutionPtr> subs;
        for (const auto& c : n->children) {
          SolutionPtr s = build(c, acc, cost, mult);
          if (!s) {
            ok = false;
            return nullptr;
          }
          subs.push_back(std::move(s));
        }
        return n->recon ? recon_build(*n->recon, subs)
                        : Solution::make(n->impl, std::move(subs));
      }
      case SolNode::K::Or: {
        NodePtr c = chosen_child(n);
        if (!c) {
          ok = false;
          return nullptr;
        }
        return build(c, acc, cost, mult * n->scale);
      }
    }
    return nullptr;
  }
};

}  // namespace

std::optional<Cand> decode_smt_model(const SmtEncoding& enc, const TreeCtx& tc,
                                     const std::string& model_text) {
  std::set<std::string> selected = true_selections(model_text);
  Decoder dec{enc, selected};
  ConstraintSet acc;
  double cost = 0.0;
  SolutionPtr sol = dec.build(enc.root, acc, cost, 1.0);
  if (!sol || !dec.ok) return std::nullopt;
  UnifCtx ctx = tc.scratch();
  if (replay(acc, ctx) != UnifyOutcome::Ok) return std::nullopt;
  return Cand{std::move(sol), cost, std::move(acc)};
}

}  // namespace repml
