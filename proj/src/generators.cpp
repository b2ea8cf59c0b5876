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

namespace shredjoin {

namespace {

std::string name(char prefix, std::size_t i) { return std::string(1, prefix) + std::to_string(i); }

PhysicalRelation pairs(const std::string& a, const std::string& b,
                       const std::vector<std::pair<std::string, std::string>>& rows) {
  std::vector<std::string> left, right;
  for (const auto& [l, r] : rows) {
    left.push_back(l);
    right.push_back(r);
  }
  return PhysicalRelation({Column(a, std::move(left)), Column(b, std::move(right))});
}

}  // namespace

Database gen_diamond(std::size_t n, DiamondVariant variant) {
  std::vector<std::pair<std::string, std::string>> r, s, t;
  if (variant == DiamondVariant::kGood) {
    for (std::size_t i = 1; i <= n; ++i) {
      r.emplace_back(name('x', i), name('y', i));
      s.emplace_back(name('y', i), name('z', i));
      t.emplace_back(name('z', i), name('u', i));
    }
  } else {
    r.emplace_back("x1", "y1");
    for (std::size_t i = 1; i <= n; ++i) r.emplace_back(name('x', i + 1), name('y', n + 1));
    for (std::size_t i = 1; i <= n; ++i) s.emplace_back(name('y', i), "z1");
    for (std::size_t i = 1; i <= n; ++i) s.emplace_back(name('y', n + 1), name('z', i + 1));
    for (std::size_t i = 1; i <= n; ++i) t.emplace_back("z1", name('u', i));
    t.emplace_back(name('z', n + 1), name('u', n + 1));
  }
  Database db;
  db.put("R", pairs("x", "y", r));
  db.put("S", pairs("y", "z", s));
  db.put("T", pairs("z", "u", t));
  return db;
}

JoinQuery diamond_query() { return parse_query("Q() :- R(x,y), S(y,z), T(z,u)."); }

std::vector<RelationDecl> diamond_schema() {
  return {
      {"R", {{"x", ValueKind::kString}, {"y", ValueKind::kString}}},
      {"S", {{"y", ValueKind::kString}, {"z", ValueKind::kString}}},
      {"T", {{"z", ValueKind::kString}, {"u", ValueKind::kString}}},
  };
}

}  // namespace shredjoin
