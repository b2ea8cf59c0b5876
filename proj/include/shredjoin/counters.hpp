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
#include <string>
#include <utility>
#include <vector>

namespace shredjoin {

/// The three abstract cost functions of the hash-join cost model. All three
/// must be monotone in every argument.
struct CostFunctions {
  std::function<double(std::size_t)> build;
  std::function<double(std::size_t, std::size_t)> probe;
  std::function<double(std::size_t)> gen;

  /// c_build(N) = N, c_probe(N, M) = N, c_gen(N) = N.
  static CostFunctions unit_linear();
};

/// Runtime instrumentation. Operators append one event per hash-map build,
/// per probe loop and per generated column; lists are append-only.
class Counters {
 public:
  enum class Kind { kBuild, kProbe, kGen };

  struct Event {
    Kind kind;
    std::size_t size;      // build: tuples inserted; probe: keys probed; gen: column length
    std::size_t map_size;  // probe only: number of keys in the probed map
    std::string op;
  };

  // Labels every event recorded while alive with the given operator name.
  class Scope {
   public:
    Scope(Counters* counters, std::string op);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Counters* counters_;
    std::string previous_;
  };

  void record_build(std::size_t tuples);
  void record_probe(std::size_t probes, std::size_t map_size);
  void record_gen(std::size_t length);

  const std::vector<Event>& events() const { return events_; }
  std::vector<std::size_t> builds() const;
  std::vector<std::pair<std::size_t, std::size_t>> probes() const;
  std::vector<std::size_t> gens() const;

  std::size_t total_build() const;
  std::size_t total_probe() const;
  std::size_t total_gen() const;
  /// Sum of every recorded size (probe events contribute their probe count).
  std::size_t total() const { return total_build() + total_probe() + total_gen(); }

  void clear() { events_.clear(); }

 private:
  std::size_t sum(Kind kind) const;

  std::vector<Event> events_;
  std::string current_op_;
};

/// Evaluates `f` over every recorded event.
double counters_to_cost(const Counters& counters, const CostFunctions& f);

}  // namespace shredjoin
