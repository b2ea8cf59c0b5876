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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "shredjoin/cost.hpp"
#include "shredjoin/counters.hpp"
#include "shredjoin/database.hpp"
#include "shredjoin/nested_value.hpp"
#include "shredjoin/nsa_expr.hpp"
#include "shredjoin/planner.hpp"
#include "shredjoin/shredded.hpp"

namespace shredjoin {

// ---- ingestion ------------------------------------------------------------

struct RelationDecl {
  std::string name;
  std::vector<std::pair<std::string, ValueKind>> columns;
};

/// One declaration per line, e.g. `T(z:int,u:int)`; `#` starts a comment.
std::vector<RelationDecl> parse_schema(const std::string& text);
std::string to_string(const RelationDecl& decl);

/// RFC-4180 subset. A first row equal to the declared column names is a header.
PhysicalRelation parse_csv(const std::string& text, const RelationDecl& decl);
PhysicalRelation load_csv(const std::string& path, const RelationDecl& decl);
/// Rows sorted lexicographically; header row included.
std::string format_csv(const PhysicalRelation& rel);

/// Reads `<data_dir>/<name>.csv` for every declared relation.
Database load_database(const std::string& schema_path, const std::string& data_dir);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Flat bag view of a relation, and back.
FlatBag to_bag(const PhysicalRelation& rel);
PhysicalRelation from_bag(const FlatBag& bag);

// ---- generators -----------------------------------------------------------

enum class DiamondVariant { kGood, kBad };

/// R(x,y), S(y,z), T(z,u) over strings x1.., y1.., ...
Database gen_diamond(std::size_t n, DiamondVariant variant);
JoinQuery diamond_query();
std::vector<RelationDecl> diamond_schema();

// ---- execution ------------------------------------------------------------

using NsaResult = std::variant<ShreddedRelation, ShreddedDictionary>;
/// Called after each operator with its node and output.
using TraceHook = std::function<void(const NsaNode&, const NsaResult&)>;

NsaResult execute_nsa(const NsaExpr& e, const InputResolver& inputs,
                      Counters* counters = nullptr, const TraceHook& trace = {});
ShreddedRelation execute_nsa_relation(const NsaExpr& e, const InputResolver& inputs,
                                      Counters* counters = nullptr,
                                      const TraceHook& trace = {});

/// Hash-join evaluation; builds on the right input.
PhysicalRelation execute_binary(const BinaryPlan& p, const InputResolver& inputs,
                                Counters* counters = nullptr);

/// Cardinalities obtained by running the engine itself.
class EngineCardinalities : public CardinalityOracle {
 public:
  explicit EngineCardinalities(InputResolver inputs) : inputs_(std::move(inputs)) {}
  std::size_t plan_size(const BinaryPlan& p) override;
  std::size_t plan_keys(const BinaryPlan& p, const std::vector<std::string>& keys) override;
  std::size_t expr_size(const NsaExpr& e) override;

 private:
  const PhysicalRelation& plan_result(const BinaryPlan& p);
  InputResolver inputs_;
  std::map<const PlanNode*, PhysicalRelation> plans_;
  std::map<const NsaNode*, std::size_t> exprs_;
  // Memo keys are node addresses; holding the roots stops their reuse.
  std::vector<std::shared_ptr<const void>> pinned_;
};

enum class Mode { kBinary, kSya, kYaFull, kOracle };

std::string to_string(Mode m);
Mode parse_mode(const std::string& text);

struct RunOptions {
  Mode mode = Mode::kSya;
  bool count_only = false;
  std::size_t oracle_cap = 10'000;
};

struct RunReport {
  Mode mode = Mode::kSya;
  std::size_t cardinality = 0;
  std::optional<PhysicalRelation> result;
  Counters counters;
  std::string plan_text;  // binary plan actually evaluated (after repair for sya)
  std::string nsa_text;   // sya only
  std::string note;       // e.g. repair or fallback taken
  double millis = 0.0;
};

/// The sya plan: to_2nsa(p) if well-behaved, else the repaired plan, else the
/// gyo plan. `note` receives a short explanation of the path taken.
/// A right-hand leaf whose attributes all join groups to the empty scheme,
/// which may occur at most once per plan. Every such leaf after the first
/// gets a synthetic row-number attribute (and column in `bound`, when given)
/// so its group stays non-empty. The attribute never reaches query results.
BinaryPlan pad_empty_groups(const BinaryPlan& p, std::vector<PhysicalRelation>* bound = nullptr,
                            std::string* note = nullptr);

BinaryPlan sya_plan(const BinaryPlan& p, const JoinQuery& q,
                    const std::vector<PhysicalRelation>& bound, std::string* note = nullptr);

/// `plan` defaults to tree_to_plan(gyo(q)). Throws AcyclicityError when a mode
/// needs a join tree and q is cyclic.
RunReport run(const JoinQuery& q, const std::optional<BinaryPlan>& plan, const Database& db,
              const RunOptions& options = {});

nlohmann::json report_to_json(const RunReport& r);

/// Human-readable plan analysis; costs are computed when `db` is given.
std::string explain(const BinaryPlan& p, const Database* db = nullptr,
                    const std::vector<Comparison>& filters = {});

// ---- bench ----------------------------------------------------------------

/// Runs every entry of a JSON suite in all four modes and returns a table.
/// Throws Error when modes disagree.
std::string run_bench(const std::string& suite_path);

}  // namespace shredjoin
