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

#include "shredjoin/engine.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "shredjoin/errors.hpp"
#include "shredjoin/reference.hpp"

namespace shredjoin {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kBinary: return "binary";
    case Mode::kSya: return "sya";
    case Mode::kYaFull: return "ya-full";
    case Mode::kOracle: return "oracle";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  for (Mode m : {Mode::kBinary, Mode::kSya, Mode::kYaFull, Mode::kOracle})
    if (to_string(m) == text) return m;
  throw ParseError("unknown mode '" + text + "' (expected binary, sya, ya-full or oracle)");
}

namespace {

JoinTree require_tree(const JoinQuery& q) {
  auto t = gyo(q);
  if (!t) throw AcyclicityError("query " + q.str() + " is cyclic");
  return *t;
}

BinaryPlan left_deep(const JoinQuery& q) {
  BinaryPlan p = plan::leaf(q.atoms[0], 0);
  for (std::size_t i = 1; i < q.atoms.size(); ++i) p = plan::join(p, plan::leaf(q.atoms[i], i));
  return p;
}

// Reorders columns to the query's attribute order.
PhysicalRelation in_query_order(const PhysicalRelation& rel, const JoinQuery& q) {
  PhysicalRelation out(rel.size());
  for (const auto& a : q.attrs()) out.add_column(rel.column(a));
  return out;
}

void empty_group_leaves(const BinaryPlan& p, std::vector<const PlanNode*>& out) {
  if (p->is_leaf()) return;
  empty_group_leaves(p->left, out);
  empty_group_leaves(p->right, out);
  if (p->right->is_leaf() && attrs(p->right) == ja(p)) out.push_back(p->right.get());
}

BinaryPlan with_extra_attr(const BinaryPlan& p, const std::map<const PlanNode*, std::string>& extra) {
  if (p->is_leaf()) {
    auto it = extra.find(p.get());
    if (it == extra.end()) return p;
    Atom a = p->atom;
    a.attrs.push_back(it->second);
    return plan::leaf(a, p->leaf);
  }
  return plan::join(with_extra_attr(p->left, extra), with_extra_attr(p->right, extra));
}

}  // namespace

BinaryPlan pad_empty_groups(const BinaryPlan& p, std::vector<PhysicalRelation>* bound, std::string* note) {
  std::vector<const PlanNode*> hits;
  empty_group_leaves(p, hits);
  if (hits.size() < 2) return p;
  auto used = attrs(p);
  std::map<const PlanNode*, std::string> extra;
  std::size_t k = 0;
  for (std::size_t i = 1; i < hits.size(); ++i) {
    std::string name;
    do name = "_rid" + std::to_string(k++);
    while (std::find(used.begin(), used.end(), name) != used.end());
    extra[hits[i]] = name;
    if (bound != nullptr) {
      PhysicalRelation& rel = bound->at(hits[i]->leaf);
      std::vector<std::int64_t> ids(rel.size());
      for (std::size_t r = 0; r < ids.size(); ++r) ids[r] = static_cast<std::int64_t>(r + 1);
      rel.add_column(Column(name, std::move(ids)));
    }
  }
  if (note != nullptr)
    *note += (note->empty() ? "" : "; ") + std::to_string(extra.size()) +
             " fully-joined leaf(s) given a row-number attribute";
  return with_extra_attr(p, extra);
}

BinaryPlan sya_plan(const BinaryPlan& p, const JoinQuery& q, const std::vector<PhysicalRelation>& bound,
                    std::string* note) {
  auto say = [&](std::string s) {
    if (note != nullptr) *note = std::move(s);
  };
  if (is_well_behaved(p)) {
    say("plan is well-behaved");
    return p;
  }
  try {
    RepairResult r = repair(p, [&](const PlanNode& leaf) { return bound.at(leaf.leaf).size(); });
    say("plan repaired, penalty " + std::to_string(r.penalty) + ", join tree " + r.tree.str());
    return tree_to_plan(r.tree);
  } catch (const AssumptionViolated& e) {
    JoinTree t = require_tree(q);
    say(std::string("repair not applicable (") + e.what() + "); using join tree " + t.str());
    return tree_to_plan(t);
  }
}

RunReport run(const JoinQuery& q, const std::optional<BinaryPlan>& plan_in, const Database& db,
              const RunOptions& options) {
  auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.mode = options.mode;
  std::vector<PhysicalRelation> bound = bind_query(db, q);
  InputResolver inputs = resolver_for(bound);

  BinaryPlan p;
  if (plan_in) {
    p = bind_plan(*plan_in, q);
  } else if (options.mode == Mode::kBinary || options.mode == Mode::kOracle) {
    auto t = gyo(q);
    p = t ? tree_to_plan(*t) : left_deep(q);
  } else {
    p = tree_to_plan(require_tree(q));
  }

  PhysicalRelation result;
  switch (options.mode) {
    case Mode::kBinary:
      report.plan_text = to_string(p);
      result = execute_binary(p, inputs, &report.counters);
      break;
    case Mode::kSya: {
      require_tree(q);
      BinaryPlan wb = sya_plan(p, q, bound, &report.note);
      report.plan_text = to_string(wb);
      wb = pad_empty_groups(wb, &bound, &report.note);
      inputs = resolver_for(bound);
      if (options.count_only && !wb->is_leaf()) {
        // Sum the weights of the nested result instead of flattening it.
        NsaExpr e = tonsemijoin(wb);
        report.nsa_text = to_string(e);
        ShreddedRelation r = execute_nsa_relation(e, inputs, &report.counters);
        auto w = multiply_weights(r.phys, r.scheme);
        for (std::size_t i : r.sel) report.cardinality += w[i - 1];
        report.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return report;
      }
      NsaExpr e = to_2nsa(wb);
      report.nsa_text = to_string(e);
      ShreddedRelation r = execute_nsa_relation(e, inputs, &report.counters);
      result = r.sel.is_all(r.phys.size()) ? r.phys : take_all(r.phys, r.sel.rows());
      break;
    }
    case Mode::kYaFull: {
      JoinTree t = require_tree(q);
      report.note = "join tree " + t.str();
      auto reduced = classic_ya_reduce(t, bound, &report.counters);
      report.plan_text = to_string(p);
      result = execute_binary(p, resolver_for(reduced), &report.counters);
      break;
    }
    case Mode::kOracle:
      report.plan_text = "(nested loops)";
      result = from_bag(ref::brute_force_join(q.atoms, bound, options.oracle_cap));
      if (result.columns().empty()) {
        // from_bag of an empty bag still needs the columns.
        FlatBag empty;
        empty.attrs = q.attrs();
        result = from_bag(empty);
      }
      break;
  }
  result = in_query_order(result, q);
  report.cardinality = result.size();
  if (!options.count_only) report.result = std::move(result);
  report.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["mode"] = to_string(r.mode);
  j["cardinality"] = r.cardinality;
  j["plan"] = r.plan_text;
  if (!r.nsa_text.empty()) j["nsa"] = r.nsa_text;
  if (!r.note.empty()) j["note"] = r.note;
  j["millis"] = r.millis;
  j["counters"] = counters_to_json(r.counters);
  return j;
}

std::string explain(const BinaryPlan& p, const Database* db, const std::vector<Comparison>& filters) {
  std::ostringstream out;
  out << "plan: " << to_string(p) << "\n";
  if (p->is_leaf()) {
    out << "trivial plan (single atom), no joins\n";
    out << "2NSA plan:\n" << annotate(to_2nsa(p));
    out << "static cost (unit-linear): binary = 0, 2nsa = 0\n";
    return out.str();
  }
  JoinQuery q = query_of(p);
  q.filters = filters;
  std::vector<PhysicalRelation> bound;
  if (db != nullptr) bound = bind_query(*db, q);

  BinaryPlan wb = p;
  if (const PlanNode* v = find_violation(p)) {
    out << "ill-behaved " << describe_violation(*v) << "\n";
    try {
      RepairResult r = repair(p, [&](const PlanNode& leaf) {
        return db != nullptr ? bound.at(leaf.leaf).size() : std::size_t{1};
      });
      out << "repaired join tree: " << r.tree.str() << " (penalty " << r.penalty
          << (db == nullptr ? ", unit cardinalities" : "") << ")\n";
      wb = tree_to_plan(r.tree);
    } catch (const AssumptionViolated& e) {
      auto t = gyo(q);
      if (!t) throw AcyclicityError("plan " + to_string(p) + " is cyclic");
      out << "repair not applicable: " << e.what() << "\njoin tree from gyo: " << t->str() << "\n";
      wb = tree_to_plan(*t);
    }
    out << "well-behaved plan: " << to_string(wb) << "\n";
  } else {
    out << "well-behaved\n";
    out << "join tree: " << plan_to_tree(p).str() << "\n";
  }
  std::string padded;
  wb = pad_empty_groups(wb, db != nullptr ? &bound : nullptr, &padded);
  if (!padded.empty()) out << "note: " << padded << "\n";
  NsaExpr e = to_2nsa(wb);
  out << "2-phase: " << (is_two_phase(e) ? "yes" : "no") << "\n";
  out << "2NSA plan:\n" << annotate(e);
  if (db != nullptr) {
    EngineCardinalities card(resolver_for(bound));
    out << "static cost (unit-linear): binary = " << static_cost_binary(p, card)
        << ", 2nsa = " << static_cost_nsa(e, card) << "\n";
  }
  return out.str();
}

std::string run_bench(const std::string& suite_path) {
  namespace fs = std::filesystem;
  nlohmann::json suite;
  try {
    suite = nlohmann::json::parse(read_file(suite_path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(suite_path + ": " + e.what());
  }
  fs::path base = fs::path(suite_path).parent_path();
  auto resolve = [&](const std::string& p) { return (base / p).string(); };

  std::ostringstream table;
  table << std::left << std::setw(22) << "entry" << std::setw(9) << "mode" << std::right << std::setw(10)
        << "rows" << std::setw(10) << "build" << std::setw(10) << "probe" << std::setw(12) << "gen"
        << std::setw(12) << "total" << std::setw(11) << "ms" << "  result\n";
  bool mismatch = false;
  for (const auto& entry : suite.at("entries")) {
    std::string name = entry.value("name", "entry");
    Database db;
    JoinQuery q;
    if (entry.contains("diamond")) {
      const auto& d = entry["diamond"];
      db = gen_diamond(d.at("n").get<std::size_t>(),
                       d.value("variant", "bad") == "good" ? DiamondVariant::kGood : DiamondVariant::kBad);
      q = diamond_query();
    } else {
      db = load_database(resolve(entry.at("schema").get<std::string>()),
                         resolve(entry.at("data").get<std::string>()));
    }
    if (entry.contains("query")) q = parse_query(entry["query"].get<std::string>());
    std::optional<BinaryPlan> p;
    if (entry.contains("plan")) p = parse_plan(entry["plan"].get<std::string>());
    std::size_t cap = entry.value("oracle_cap", std::size_t{100'000});

    std::optional<FlatBag> reference;
    for (Mode m : {Mode::kOracle, Mode::kBinary, Mode::kYaFull, Mode::kSya}) {
      table << std::left << std::setw(22) << name << std::setw(9) << to_string(m) << std::right;
      RunReport r;
      try {
        r = run(q, p, db, RunOptions{m, false, cap});
      } catch (const CapExceeded&) {
        table << std::setw(10) << "-" << "  skipped (oracle cap)\n";
        continue;
      }
      FlatBag bag = to_bag(*r.result);
      std::string verdict = "reference";
      if (reference) {
        bool same = bag_equal(bag, *reference);
        verdict = same ? "agrees" : "MISMATCH";
        mismatch = mismatch || !same;
      } else {
        reference = std::move(bag);
      }
      table << std::setw(10) << r.cardinality << std::setw(10) << r.counters.total_build() << std::setw(10)
            << r.counters.total_probe() << std::setw(12) << r.counters.total_gen() << std::setw(12)
            << r.counters.total() << std::setw(11) << std::fixed << std::setprecision(2) << r.millis << "  "
            << verdict << "\n";
    }
  }
  if (mismatch) throw Error("modes disagree:\n" + table.str(), false);
  return table.str();
}

}  // namespace shredjoin
