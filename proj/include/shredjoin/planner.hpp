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

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shredjoin/columns.hpp"
#include "shredjoin/counters.hpp"
#include "shredjoin/nsa_expr.hpp"
#include "shredjoin/query.hpp"

namespace shredjoin {

struct PlanNode;
using BinaryPlan = std::shared_ptr<const PlanNode>;

/// Internal nodes are hash joins with the probe side left and the build side
/// right. Leaves carry the index of their atom occurrence in the query.
struct PlanNode {
  Atom atom;
  std::size_t leaf = 0;
  BinaryPlan left;
  BinaryPlan right;

  bool is_leaf() const { return left == nullptr; }
};

namespace plan {
BinaryPlan leaf(Atom atom, std::size_t index);
BinaryPlan join(BinaryPlan left, BinaryPlan right);
}  // namespace plan

/// `(R(x,y) * (S(y,z) * T(z,u)))`. Leaves are numbered left to right.
BinaryPlan parse_plan(std::string_view text);
/// Renumbers leaves to match occurrences in `q` (first unused equal atom).
/// Throws ParseError if the plan's atoms are not exactly q's atoms.
BinaryPlan bind_plan(const BinaryPlan& p, const JoinQuery& q);
std::string to_string(const BinaryPlan& p);

std::vector<const PlanNode*> leaves(const BinaryPlan& p);
/// Query whose atoms are the plan's leaves in leaf-index order.
JoinQuery query_of(const BinaryPlan& p);

std::vector<std::string> attrs(const BinaryPlan& p);  // sorted
std::vector<std::string> ja(const BinaryPlan& p);     // sorted; empty for a leaf
std::vector<std::string> la(const BinaryPlan& p);     // sorted
const PlanNode& lleaf(const BinaryPlan& p);

/// First join node (pre-order) violating well-behavedness, or nullptr.
const PlanNode* find_violation(const BinaryPlan& p);
bool is_well_behaved(const BinaryPlan& p);
/// e.g. `at subplan (T(z,u) * S(y,z)): ja={y} not contained in la={u,z} (...)`
std::string describe_violation(const PlanNode& join);

/// Rooted tree of atom occurrences; children are ordered.
struct JoinTree {
  Atom atom;
  std::size_t index = 0;
  std::vector<JoinTree> children;

  std::size_t size() const;
  std::string str() const;  // e.g. S(y,z)[R(x,y), T(z,u)]
  friend bool operator==(const JoinTree&, const JoinTree&) = default;
};

/// True iff the atoms containing each attribute form a connected subtree.
bool is_valid_join_tree(const JoinTree& t);

/// Ear removal. Returns nullopt for cyclic queries. The tree is rooted at
/// atom 0 with children ordered by query index.
std::optional<JoinTree> gyo(const JoinQuery& q);

BinaryPlan tree_to_plan(const JoinTree& t);
/// Throws NotWellBehaved.
JoinTree plan_to_tree(const BinaryPlan& p);

/// ton(P1 * P2) = ton(P1) semijoin groupby_ja(ton(P2)).
NsaExpr tonsemijoin(const BinaryPlan& p);
/// Flatten on top of tonsemijoin; a bare leaf stays a bare input.
/// Throws NotWellBehaved.
NsaExpr to_2nsa(const BinaryPlan& p);
/// Every join becomes unnest(P1 semijoin groupby(P2)).
NsaExpr binary_to_nsa_naive(const BinaryPlan& p);

bool is_shrinking(NsaOp op);
/// Every unnest and flatten has only non-shrinking ancestors.
bool is_two_phase(const NsaExpr& e);

/// Base cardinality of a leaf (after filters).
using LeafCardinality = std::function<std::size_t(const PlanNode&)>;

struct RepairResult {
  JoinTree tree;
  std::size_t penalty = 0;
};

/// Dynamic program over root choices. Throws AssumptionViolated when some
/// join has an empty ja or no atom pair covering it.
RepairResult repair(const BinaryPlan& p, const LeafCardinality& card);

/// Bottom-up then top-down semijoin passes over bound relations (one per atom,
/// indexed like the tree's atom indices). Bag multiplicities are kept. Each
/// semijoin records a build on its right and a probe from its left operand.
std::vector<PhysicalRelation> classic_ya_reduce(const JoinTree& t,
                                                std::vector<PhysicalRelation> bound,
                                                Counters* counters = nullptr);

}  // namespace shredjoin
