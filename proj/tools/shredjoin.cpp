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

// Command-line front end: load, run, explain, gen, bench.

#include <cctype>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "shredjoin/engine.hpp"
#include "shredjoin/errors.hpp"

using namespace shredjoin;

namespace {

std::string trimmed_file(const std::string& path) {
  std::string text = read_file(path);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  return text;
}

int cmd_load(const std::string& schema, const std::string& data) {
  Database db = load_database(schema, data);
  for (const auto& decl : parse_schema(read_file(schema)))
    std::cout << to_string(decl) << ": " << db.get(decl.name).size() << " rows\n";
  return 0;
}

struct RunArgs {
  std::string mode = "sya";
  std::string query, plan, schema, data, out, stats;
  bool count_only = false;
  std::size_t oracle_cap = 10'000;
};

int cmd_run(const RunArgs& a) {
  JoinQuery q = parse_query(read_file(a.query));
  std::optional<BinaryPlan> p;
  if (!a.plan.empty()) p = parse_plan(trimmed_file(a.plan));
  Database db = load_database(a.schema, a.data);
  RunReport r = run(q, p, db, RunOptions{parse_mode(a.mode), a.count_only, a.oracle_cap});

  std::cout << "mode: " << to_string(r.mode) << "\n";
  std::cout << "plan: " << r.plan_text << "\n";
  if (!r.nsa_text.empty()) std::cout << "2nsa: " << r.nsa_text << "\n";
  if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
  std::cout << "rows: " << r.cardinality << "\n";
  std::cout << "counters: build " << r.counters.total_build() << ", probe " << r.counters.total_probe()
            << ", gen " << r.counters.total_gen() << "\n";
  if (!a.out.empty()) {
    if (!r.result) throw Error("--out cannot be combined with --count-only");
    write_file(a.out, format_csv(*r.result));
  }
  if (!a.stats.empty()) write_file(a.stats, report_to_json(r).dump(2) + "\n");
  return 0;
}

int cmd_explain(const std::string& plan_path, const std::string& query_path, const std::string& schema,
                const std::string& data) {
  BinaryPlan p = parse_plan(trimmed_file(plan_path));
  std::vector<Comparison> filters;
  if (!query_path.empty()) {
    JoinQuery q = parse_query(read_file(query_path));
    p = bind_plan(p, q);
    filters = q.filters;
  }
  std::optional<Database> db;
  if (!schema.empty() || !data.empty()) {
    if (schema.empty() || data.empty()) throw Error("--schema and --data must be given together");
    db = load_database(schema, data);
  }
  std::cout << explain(p, db ? &*db : nullptr, filters);
  return 0;
}

int cmd_gen(std::size_t n, const std::string& variant, const std::string& out) {
  if (n < 1) throw Error("--diamond must be at least 1");
  DiamondVariant v;
  if (variant == "good") v = DiamondVariant::kGood;
  else if (variant == "bad") v = DiamondVariant::kBad;
  else throw Error("--variant must be good or bad");
  namespace fs = std::filesystem;
  fs::create_directories(out);
  Database db = gen_diamond(n, v);
  std::string schema;
  for (const auto& decl : diamond_schema()) {
    schema += to_string(decl) + "\n";
    write_file((fs::path(out) / (decl.name + ".csv")).string(), format_csv(db.get(decl.name)));
  }
  write_file((fs::path(out) / "schema.txt").string(), schema);
  write_file((fs::path(out) / "query.txt").string(), diamond_query().str() + "\n");
  write_file((fs::path(out) / "plan_left_deep.txt").string(), "((R(x,y) * S(y,z)) * T(z,u))\n");
  write_file((fs::path(out) / "plan_tree.txt").string(), "(R(x,y) * (S(y,z) * T(z,u)))\n");
  std::cout << "wrote diamond N=" << n << " (" << variant << ") to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shredded Yannakakis join engine"};
  app.require_subcommand(1);

  std::string schema, data;
  auto* load = app.add_subcommand("load", "parse a schema and CSV directory and report sizes");
  load->add_option("--schema", schema, "schema file")->required();
  load->add_option("--data", data, "directory holding <Relation>.csv")->required();

  RunArgs ra;
  auto* runc = app.add_subcommand("run", "evaluate a query");
  runc->add_option("--mode", ra.mode, "binary | sya | ya-full | oracle")->capture_default_str();
  runc->add_option("--query", ra.query, "query file")->required();
  runc->add_option("--plan", ra.plan, "binary plan file (default: from the join tree)");
  runc->add_option("--schema", ra.schema, "schema file")->required();
  runc->add_option("--data", ra.data, "directory holding <Relation>.csv")->required();
  runc->add_option("--out", ra.out, "write the result as sorted CSV");
  runc->add_option("--stats", ra.stats, "write counters as JSON");
  runc->add_flag("--count-only", ra.count_only, "report the cardinality without materializing");
  runc->add_option("--oracle-cap", ra.oracle_cap, "partial-tuple cap for oracle mode")->capture_default_str();

  std::string plan, query, eschema, edata;
  auto* expl = app.add_subcommand("explain", "classify, repair and cost a plan");
  expl->add_option("--plan", plan, "binary plan file")->required();
  expl->add_option("--query", query, "query file supplying filters and variable names");
  expl->add_option("--schema", eschema, "schema file, enables data-dependent costs");
  expl->add_option("--data", edata, "data directory");

  std::size_t n = 0;
  std::string variant = "bad", out;
  auto* gen = app.add_subcommand("gen", "write a diamond instance");
  gen->add_option("--diamond", n, "N")->required();
  gen->add_option("--variant", variant, "good | bad")->capture_default_str();
  gen->add_option("--out", out, "output directory")->required();

  std::string suite;
  auto* bench = app.add_subcommand("bench", "run a suite in every mode and compare");
  bench->add_option("--suite", suite, "suite JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*load) return cmd_load(schema, data);
    if (*runc) return cmd_run(ra);
    if (*expl) return cmd_explain(plan, query, eschema, edata);
    if (*gen) return cmd_gen(n, variant, out);
    if (*bench) {
      std::cout << run_bench(suite);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.user_error() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
