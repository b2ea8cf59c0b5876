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

#include "shredjoin/counters.hpp"

namespace shredjoin {

CostFunctions CostFunctions::unit_linear() {
  return CostFunctions{
      [](std::size_t n) { return static_cast<double>(n); },
      [](std::size_t n, std::size_t) { return static_cast<double>(n); },
      [](std::size_t n) { return static_cast<double>(n); },
  };
}

Counters::Scope::Scope(Counters* counters, std::string op) : counters_(counters) {
  if (counters_ != nullptr) {
    previous_ = std::move(counters_->current_op_);
    counters_->current_op_ = std::move(op);
  }
}

Counters::Scope::~Scope() {
  if (counters_ != nullptr) counters_->current_op_ = std::move(previous_);
}

void Counters::record_build(std::size_t tuples) {
  events_.push_back({Kind::kBuild, tuples, 0, current_op_});
}

void Counters::record_probe(std::size_t probes, std::size_t map_size) {
  events_.push_back({Kind::kProbe, probes, map_size, current_op_});
}

void Counters::record_gen(std::size_t length) {
  events_.push_back({Kind::kGen, length, 0, current_op_});
}

std::vector<std::size_t> Counters::builds() const {
  std::vector<std::size_t> out;
  for (const auto& e : events_)
    if (e.kind == Kind::kBuild) out.push_back(e.size);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Counters::probes() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : events_)
    if (e.kind == Kind::kProbe) out.emplace_back(e.size, e.map_size);
  return out;
}

std::vector<std::size_t> Counters::gens() const {
  std::vector<std::size_t> out;
  for (const auto& e : events_)
    if (e.kind == Kind::kGen) out.push_back(e.size);
  return out;
}

std::size_t Counters::sum(Kind kind) const {
  std::size_t total = 0;
  for (const auto& e : events_)
    if (e.kind == kind) total += e.size;
  return total;
}

std::size_t Counters::total_build() const { return sum(Kind::kBuild); }
std::size_t Counters::total_probe() const { return sum(Kind::kProbe); }
std::size_t Counters::total_gen() const { return sum(Kind::kGen); }

double counters_to_cost(const Counters& counters, const CostFunctions& f) {
  double cost = 0.0;
  for (const auto& e : counters.events()) {
    switch (e.kind) {
      case Counters::Kind::kBuild: cost += f.build(e.size); break;
      case Counters::Kind::kProbe: cost += f.probe(e.size, e.map_size); break;
      case Counters::Kind::kGen: cost += f.gen(e.size); break;
    }
  }
  return cost;
}

}  // namespace shredjoin
