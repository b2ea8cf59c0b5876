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

#include "shredjoin/planner.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

#include "shredjoin/errors.hpp"

namespace shredjoin {

namespace plan {

BinaryPlan leaf(Atom atom, std::size_t index) {
  auto n = std::make_shared<PlanNode>();
  n->atom = std::move(atom);
  n->leaf = index;
  return n;
}

BinaryPlan join(BinaryPlan left, BinaryPlan right) {
  auto n = std::make_shared<PlanNode>();
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

}  // namespace plan

// ---- text form --------------------------------------------------------------

namespace {

class PlanParser {
 public:
  explicit PlanParser(std::string_view text) : text_(text) {}

  BinaryPlan parse() {
    BinaryPlan p = expr();
    skip();
    if (pos_ < text_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  BinaryPlan expr() {
    BinaryPlan p = term();
    while (true) {
      skip();
      if (peek() == '*') {
        ++pos_;
      } else if (text_.substr(pos_, 3) == "⋈") {  // UTF-8 bowtie
        pos_ += 3;
      } else {
        return p;
      }
      p = plan::join(p, term());
    }
  }

  BinaryPlan term() {
    skip();
    if (peek() == '(') {
      ++pos_;
      BinaryPlan p = expr();
      skip();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return p;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ')') ++pos_;
    if (pos_ < text_.size()) ++pos_;
    try {
      return plan::leaf(parse_atom(text_.substr(start, pos_ - start)), next_leaf_++);
    } catch (const ParseError& e) {
      fail(std::string("bad atom: ") + e.what());
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("plan: " + msg, 1, pos_ + 1); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t next_leaf_ = 0;
};

void collect_leaves(const BinaryPlan& p, std::vector<const PlanNode*>& out) {
  if (p->is_leaf()) {
    out.push_back(p.get());
    return;
  }
  collect_leaves(p->left, out);
  collect_leaves(p->right, out);
}

std::vector<std::string> intersect(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<std::string> sorted_attrs(const Atom& a) {
  std::vector<std::string> v = a.attrs;
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

BinaryPlan parse_plan(std::string_view text) { return PlanParser(text).parse(); }

BinaryPlan bind_plan(const BinaryPlan& p, const JoinQuery& q) {
  std::vector<bool> used(q.atoms.size(), false);
  std::size_t count = 0;
  std::function<BinaryPlan(const BinaryPlan&)> rebuild = [&](const BinaryPlan& n) -> BinaryPlan {
    if (!n->is_leaf()) return plan::join(rebuild(n->left), rebuild(n->right));
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
      if (!used[i] && q.atoms[i] == n->atom) {
        used[i] = true;
        ++count;
        return plan::leaf(n->atom, i);
      }
    }
    throw ParseError("plan atom " + n->atom.str() + " does not match an unused query atom");
  };
  BinaryPlan out = rebuild(p);
  if (count != q.atoms.size()) throw ParseError("plan does not cover every query atom");
  return out;
}

std::string to_string(const BinaryPlan& p) {
  if (p->is_leaf()) return p->atom.str();
  return "(" + to_string(p->left) + " * " + to_string(p->right) + ")";
}

std::vector<const PlanNode*> leaves(const BinaryPlan& p) {
  std::vector<const PlanNode*> out;
  collect_leaves(p, out);
  return out;
}

JoinQuery query_of(const BinaryPlan& p) {
  auto ls = leaves(p);
  std::sort(ls.begin(), ls.end(), [](const PlanNode* a, const PlanNode* b) { return a->leaf < b->leaf; });
  JoinQuery q;
  for (const auto* l : ls) q.atoms.push_back(l->atom);
  return q;
}

std::vector<std::string> attrs(const BinaryPlan& p) {
  std::set<std::string> s;
  for (const auto* l : leaves(p)) s.insert(l->atom.attrs.begin(), l->atom.attrs.end());
  return {s.begin(), s.end()};
}

std::vector<std::string> ja(const BinaryPlan& p) {
  if (p->is_leaf()) return {};
  return intersect(attrs(p->left), attrs(p->right));
}

const PlanNode& lleaf(const BinaryPlan& p) {
  const PlanNode* n = p.get();
  while (!n->is_leaf()) n = n->left.get();
  return *n;
}

std::vector<std::string> la(const BinaryPlan& p) { return sorted_attrs(lleaf(p).atom); }

const PlanNode* find_violation(const BinaryPlan& p) {
  if (p->is_leaf()) return nullptr;
  auto j = ja(p);
  if (!subset(j, la(p->left)) || !subset(j, la(p->right))) return p.get();
  if (const auto* v = find_violation(p->left)) return v;
  return find_violation(p->right);
}

bool is_well_behaved(const BinaryPlan& p) { return find_violation(p) == nullptr; }

// ---- join trees --------------------------------------------------------------

std::size_t JoinTree::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::string JoinTree::str() const {
  std::string out = atom.str();
  if (children.empty()) return out;
  out += "[";
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i > 0) out += ", ";
    out += children[i].str();
  }
  return out + "]";
}

namespace {

void tree_stats(const JoinTree& t, const std::string& a, std::size_t& nodes, std::size_t& edges) {
  bool here = std::find(t.atom.attrs.begin(), t.atom.attrs.end(), a) != t.atom.attrs.end();
  if (here) ++nodes;
  for (const auto& c : t.children) {
    bool there = std::find(c.atom.attrs.begin(), c.atom.attrs.end(), a) != c.atom.attrs.end();
    if (here && there) ++edges;
    tree_stats(c, a, nodes, edges);
  }
}

void tree_attrs(const JoinTree& t, std::set<std::string>& out) {
  out.insert(t.atom.attrs.begin(), t.atom.attrs.end());
  for (const auto& c : t.children) tree_attrs(c, out);
}

}  // namespace

bool is_valid_join_tree(const JoinTree& t) {
  std::set<std::string> all;
  tree_attrs(t, all);
  for (const auto& a : all) {
    std::size_t nodes = 0, edges = 0;
    tree_stats(t, a, nodes, edges);
    if (edges + 1 != nodes) return false;
  }
  return true;
}

std::optional<JoinTree> gyo(const JoinQuery& q) {
  const std::size_t n = q.atoms.size();
  if (n == 0) return std::nullopt;
  std::vector<std::set<std::string>> rem(n);
  for (std::size_t i = 0; i < n; ++i) rem[i] = {q.atoms[i].attrs.begin(), q.atoms[i].attrs.end()};
  std::vector<bool> alive(n, true);
  std::vector<std::vector<std::size_t>> adj(n);
  std::size_t left = n;

  while (left > 1) {
    // Drop attributes that occur in a single remaining atom.
    std::map<std::string, std::size_t> occ;
    for (std::size_t i = 0; i < n; ++i)
      if (alive[i])
        for (const auto& a : rem[i]) ++occ[a];
    for (std::size_t i = 0; i < n; ++i)
      if (alive[i])
        for (auto it = rem[i].begin(); it != rem[i].end();) it = occ[*it] == 1 ? rem[i].erase(it) : std::next(it);

    bool removed = false;
    for (std::size_t e = 0; e < n && !removed; ++e) {
      if (!alive[e]) continue;
      for (std::size_t f = 0; f < n; ++f) {
        if (f == e || !alive[f]) continue;
        if (std::includes(rem[f].begin(), rem[f].end(), rem[e].begin(), rem[e].end())) {
          alive[e] = false;
          adj[e].push_back(f);
          adj[f].push_back(e);
          --left;
          removed = true;
          break;
        }
      }
    }
    if (!removed) return std::nullopt;
  }

  // Re-root at atom 0 with children in query order.
  std::function<JoinTree(std::size_t, std::size_t)> build = [&](std::size_t v, std::size_t parent) {
    JoinTree t{q.atoms[v], v, {}};
    std::vector<std::size_t> kids;
    for (std::size_t w : adj[v])
      if (w != parent) kids.push_back(w);
    std::sort(kids.begin(), kids.end());
    for (std::size_t w : kids) t.children.push_back(build(w, v));
    return t;
  };
  return build(0, n);
}

BinaryPlan tree_to_plan(const JoinTree& t) {
  BinaryPlan p = plan::leaf(t.atom, t.index);
  for (const auto& c : t.children) p = plan::join(p, tree_to_plan(c));
  return p;
}

namespace {

JoinTree plan_to_tree_unchecked(const BinaryPlan& p) {
  if (p->is_leaf()) return JoinTree{p->atom, p->leaf, {}};
  JoinTree t = plan_to_tree_unchecked(p->left);
  t.children.push_back(plan_to_tree_unchecked(p->right));
  return t;
}

std::string braces(const std::vector<std::string>& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out + "}";
}

}  // namespace

std::string describe_violation(const PlanNode& v) {
  auto node = std::shared_ptr<const PlanNode>(&v, [](const PlanNode*) {});
  auto j = ja(node);
  const BinaryPlan& side = subset(j, la(node->left)) ? node->right : node->left;
  return "at subplan " + to_string(side) + ": ja=" + braces(j) + " not contained in la=" +
         braces(la(side)) + " (join " + to_string(node) + ")";
}

JoinTree plan_to_tree(const BinaryPlan& p) {
  if (const auto* v = find_violation(p)) throw NotWellBehaved(describe_violation(*v));
  return plan_to_tree_unchecked(p);
}

// ---- NSA rewrites -----------------------------------------------------------------

NsaExpr tonsemijoin(const BinaryPlan& p) {
  if (p->is_leaf()) return nsa::input(p->atom, p->leaf);
  return nsa::nsemijoin(tonsemijoin(p->left), nsa::groupby(tonsemijoin(p->right), ja(p)));
}

NsaExpr to_2nsa(const BinaryPlan& p) {
  if (const auto* v = find_violation(p)) throw NotWellBehaved(describe_violation(*v));
  if (p->is_leaf()) return tonsemijoin(p);
  return nsa::flatten(tonsemijoin(p));
}

NsaExpr binary_to_nsa_naive(const BinaryPlan& p) {
  if (p->is_leaf()) return nsa::input(p->atom, p->leaf);
  auto keys = ja(p);
  std::vector<std::string> rest;
  for (const auto& a : attrs(p->right))
    if (!std::binary_search(keys.begin(), keys.end(), a)) rest.push_back(a);
  NsaExpr joined = nsa::nsemijoin(binary_to_nsa_naive(p->left),
                                  nsa::groupby(binary_to_nsa_naive(p->right), keys));
  return nsa::unnest(joined, Scheme::of_flat(rest));
}

bool is_shrinking(NsaOp op) {
  switch (op) {
    case NsaOp::kSelect:
    case NsaOp::kDifference:
    case NsaOp::kNSemijoin:
    case NsaOp::kGroupBy:
      return true;
    default:
      return false;
  }
}

namespace {

bool two_phase(const NsaExpr& e, bool shrinking_above) {
  if ((e->op == NsaOp::kUnnest || e->op == NsaOp::kFlatten) && shrinking_above) return false;
  bool below = shrinking_above || is_shrinking(e->op);
  for (const auto& c : e->children)
    if (!two_phase(c, below)) return false;
  return true;
}

}  // namespace

bool is_two_phase(const NsaExpr& e) { return two_phase(e, false); }

// ---- repair ---------------------------------------------------------------------

namespace {

struct Choice {
  std::size_t delta = 0;
  JoinTree tree;
};

using Choices = std::map<const PlanNode*, Choice>;  // keyed by root leaf

class Repairer {
 public:
  explicit Repairer(const LeafCardinality& card) : card_(card) {}

  Choices solve(const BinaryPlan& p) {
    Choices out;
    if (p->is_leaf()) {
      out[p.get()] = Choice{0, JoinTree{p->atom, p->leaf, {}}};
      return out;
    }
    auto j = ja(p);
    Choices left = solve(p->left);
    Choices right = solve(p->right);
    if (j.empty())
      throw AssumptionViolated("join " + to_string(p) + " is a Cartesian product");
    const PlanNode* b_right = best(right, j, false);
    const PlanNode* b_left = best(left, j, true);
    if (b_right == nullptr || b_left == nullptr)
      throw AssumptionViolated("no atom pair covers ja of " + to_string(p));

    const Choice& r_best = right.at(b_right);
    for (const auto& [a, c] : left)
      out[a] = Choice{c.delta + r_best.delta, concat(c.tree, r_best.tree, j)};
    const Choice& l_best = left.at(b_left);
    for (const auto& [a, c] : right)
      out[a] = Choice{c.delta + l_best.delta + card_(*b_left), concat(c.tree, l_best.tree, j)};
    return out;
  }

  // Candidate roots containing `j`, minimising delta (plus |B| when the
  // candidate becomes a build side). Ties: cardinality, atom text, leaf index.
  const PlanNode* best(const Choices& choices, const std::vector<std::string>& j, bool add_card) const {
    const PlanNode* winner = nullptr;
    std::tuple<std::size_t, std::size_t, std::string, std::size_t> best_key;
    for (const auto& [a, c] : choices) {
      if (!subset(j, sorted_attrs(a->atom))) continue;
      std::size_t card = card_(*a);
      auto key = std::make_tuple(c.delta + (add_card ? card : 0), card, a->atom.str(), a->leaf);
      if (winner == nullptr || key < best_key) {
        winner = a;
        best_key = key;
      }
    }
    return winner;
  }

 private:
  // t2 becomes the last child of the top-most node of t1 containing j.
  static JoinTree concat(JoinTree t1, const JoinTree& t2, const std::vector<std::string>& j) {
    std::deque<JoinTree*> queue{&t1};
    while (!queue.empty()) {
      JoinTree* n = queue.front();
      queue.pop_front();
      if (subset(j, sorted_attrs(n->atom))) {
        n->children.push_back(t2);
        return t1;
      }
      for (auto& c : n->children) queue.push_back(&c);
    }
    throw AssumptionViolated("no node covers the join attributes");
  }

  const LeafCardinality& card_;
};

}  // namespace

RepairResult repair(const BinaryPlan& p, const LeafCardinality& card) {
  Repairer r(card);
  Choices all = r.solve(p);
  if (p->is_leaf()) return {all.begin()->second.tree, 0};
  const PlanNode* alpha = nullptr;
  std::tuple<std::size_t, std::size_t, std::string, std::size_t> best_key;
  auto j = ja(p);
  for (const auto& [a, c] : all) {
    if (!subset(j, sorted_attrs(a->atom))) continue;
    auto key = std::make_tuple(c.delta, card(*a), a->atom.str(), a->leaf);
    if (alpha == nullptr || key < best_key) {
      alpha = a;
      best_key = key;
    }
  }
  if (alpha == nullptr) throw AssumptionViolated("no root candidate for " + to_string(p));
  return {all.at(alpha).tree, all.at(alpha).delta};
}

// ---- classic Yannakakis -------------------------------------------------------------

namespace {

PhysicalRelation semijoin(const PhysicalRelation& r, const PhysicalRelation& s, Counters* counters) {
  std::vector<std::string> shared;
  for (const auto& c : r.columns())
    if (s.has_column(c.name())) shared.push_back(c.name());
  std::unordered_set<KeyTuple, KeyTupleHash> keys;
  for (std::size_t i = 1; i <= s.size(); ++i) keys.insert(s.row(i, shared));
  std::vector<std::size_t> kept;
  for (std::size_t i = 1; i <= r.size(); ++i)
    if (keys.count(r.row(i, shared))) kept.push_back(i);
  if (counters != nullptr) {
    counters->record_build(s.size());
    counters->record_probe(r.size(), keys.size());
  }
  if (kept.size() == r.size()) return r;
  return take_all(r, kept);
}

void bottom_up(const JoinTree& t, std::vector<PhysicalRelation>& rel, Counters* counters) {
  for (const auto& c : t.children) {
    bottom_up(c, rel, counters);
    rel[t.index] = semijoin(rel[t.index], rel[c.index], counters);
  }
}

void top_down(const JoinTree& t, std::vector<PhysicalRelation>& rel, Counters* counters) {
  for (const auto& c : t.children) {
    rel[c.index] = semijoin(rel[c.index], rel[t.index], counters);
    top_down(c, rel, counters);
  }
}

}  // namespace

std::vector<PhysicalRelation> classic_ya_reduce(const JoinTree& t, std::vector<PhysicalRelation> bound,
                                                Counters* counters) {
  Counters::Scope scope(counters, "ya-reduce");
  bottom_up(t, bound, counters);
  top_down(t, bound, counters);
  return bound;
}

}  // namespace shredjoin
