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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace shredjoin;

namespace {

const char* kTreePlan = "(R(x,y) * (S(y,z) * T(z,u)))";

// Monotone but far from linear, to catch agreement that only holds by accident.
CostFunctions skewed() {
  CostFunctions f;
  f.build = [](std::size_t n) { return 3.0 * static_cast<double>(n * n) + 1.0; };
  f.probe = [](std::size_t n, std::size_t m) { return static_cast<double>(n) * std::log2(2.0 + static_cast<double>(m)); };
  f.gen = [](std::size_t n) { return 0.5 * static_cast<double>(n) + 2.0; };
  return f;
}

}  // namespace

TEST_CASE("running example: binary 46, 2NSA 29") {
  auto db = testing::running_db();
  auto q = testing::q3();
  auto p = bind_plan(parse_plan(kTreePlan), q);
  auto bound = bind_query(db, q);
  ReferenceCardinalities card(resolver_for(bound));
  CHECK(static_cost_binary(p, card) == 46.0);
  CHECK(static_cost_nsa(to_2nsa(p), card) == 29.0);
  CHECK(static_cost_nsa(testing::two_phase_plan(), card) == 29.0);
}

TEST_CASE("worked example: executed counters equal the static costs") {
  auto db = testing::running_db();
  auto q = testing::q3();
  auto p = bind_plan(parse_plan(kTreePlan), q);
  auto inputs = resolver_for(bind_query(db, q));

  Counters nsa_counters;
  execute_nsa(to_2nsa(p), inputs, &nsa_counters);
  CHECK(nsa_counters.builds() == std::vector<std::size_t>{3, 3});
  CHECK(nsa_counters.probes() == std::vector<std::pair<std::size_t, std::size_t>>{{4, 2}, {3, 3}});
  CHECK(counters_to_cost(nsa_counters, CostFunctions::unit_linear()) == 29.0);

  Counters bin;
  execute_binary(p, inputs, &bin);
  CHECK(counters_to_cost(bin, CostFunctions::unit_linear()) == 46.0);
}

TEST_CASE("trivial costs") {
  auto db = testing::running_db();
  ReferenceCardinalities card(resolver_for(db));
  CHECK(static_cost_binary(parse_plan("R(x,y)"), card) == 0.0);
  CHECK(static_cost_nsa(nsa::input(parse_atom("R(x,y)")), card) == 0.0);
  CHECK(counters_to_cost(Counters{}, CostFunctions::unit_linear()) == 0.0);
}

TEST_CASE("the naive embedding costs exactly the binary plan") {
  auto db = testing::running_db();
  auto q = testing::q3();
  auto p = bind_plan(parse_plan(kTreePlan), q);
  ReferenceCardinalities card(resolver_for(bind_query(db, q)));
  CHECK(static_cost_nsa(binary_to_nsa_naive(p), card) == static_cost_binary(p, card));
  CHECK(static_cost_nsa(testing::naive_plan(), card) == 46.0);
}

TEST_CASE("counter cost is linear under linear functions") {
  Counters c;
  c.record_build(5);
  c.record_probe(7, 3);
  c.record_gen(4);
  Counters twice;
  twice.record_build(10);
  twice.record_probe(14, 6);
  twice.record_gen(8);
  auto f = CostFunctions::unit_linear();
  CHECK(counters_to_cost(twice, f) == 2 * counters_to_cost(c, f));
  CHECK(counters_to_cost(c, f) == 16.0);
}

TEST_CASE("left-deep plan on the bad diamond is probe dominated") {
  std::size_t n = 50;
  auto q = diamond_query();
  auto p = bind_plan(parse_plan("((R(x,y) * S(y,z)) * T(z,u))"), q);
  EngineCardinalities card(resolver_for(bind_query(gen_diamond(n, DiamondVariant::kBad), q)));
  double probe_top = static_cast<double>(card.plan_size(p->left));
  CHECK(probe_top == static_cast<double>(n * n + 1));
  CHECK(static_cost_binary(p, card) > probe_top);
}

TEST_CASE("reference and engine cardinalities agree") {
  std::mt19937 rng(3);
  for (int i = 0; i < 60; ++i) {
    auto q = testing::random_acyclic_query(rng, 2 + i % 4, testing::shape_of(i));
    auto db = testing::random_db(rng, q, 15);
    auto bound = bind_query(db, q);
    auto p = pad_empty_groups(tree_to_plan(testing::random_reroot(rng, *gyo(q))), &bound);
    ReferenceCardinalities ref_card(resolver_for(bound));
    EngineCardinalities eng_card(resolver_for(bound));
    CHECK(static_cost_binary(p, ref_card) == static_cost_binary(p, eng_card));
    CHECK(static_cost_nsa(to_2nsa(p), ref_card) == static_cost_nsa(to_2nsa(p), eng_card));
  }
}

TEST_CASE("dominance and executor agreement on random well-behaved plans") {
  std::mt19937 rng(606);
  for (int i = 0; i < 100; ++i) {
    auto q = testing::random_acyclic_query(rng, 2 + i % 4, testing::shape_of(i));
    auto db = testing::random_db(rng, q);
    auto bound = bind_query(db, q);
    auto p = pad_empty_groups(tree_to_plan(testing::random_reroot(rng, *gyo(q))), &bound);
    auto inputs = resolver_for(bound);
    auto e = to_2nsa(p);
    EngineCardinalities card(inputs);
    INFO(to_string(p));
    for (const auto& f : {CostFunctions::unit_linear(), skewed()}) {
      double nsa_static = static_cost_nsa(e, card, f);
      double bin_static = static_cost_binary(p, card, f);
      Counters nc, bc;
      execute_nsa(e, inputs, &nc);
      execute_binary(p, inputs, &bc);
      CHECK(counters_to_cost(nc, f) == Catch::Approx(nsa_static));
      CHECK(counters_to_cost(bc, f) == Catch::Approx(bin_static));
    }
    CHECK(static_cost_nsa(e, card) <= static_cost_binary(p, card));
  }
}

TEST_CASE("counters serialize to JSON") {
  Counters c;
  {
    Counters::Scope scope(&c, "groupby");
    c.record_build(3);
  }
  c.record_probe(4, 2);
  c.record_gen(5);
  auto j = counters_to_json(c);
  REQUIRE(j["events"].size() == 3);
  CHECK(j["events"][0]["op"] == "groupby");
  CHECK(j["events"][0]["kind"] == "build");
  CHECK(j["events"][1]["map_size"] == 2);
  CHECK(j["totals"]["build"] == 3);
  CHECK(j["totals"]["probe"] == 4);
  CHECK(j["totals"]["gen"] == 5);
  CHECK(j["totals"]["cost_unit_linear"] == 12.0);
}
