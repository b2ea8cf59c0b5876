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

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace shredjoin {

enum class ValueKind { kInt, kString };

/// A scalar data value. Values of different kinds never compare equal.
using Value = std::variant<std::int64_t, std::string>;

inline ValueKind kind_of(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) ? ValueKind::kInt : ValueKind::kString;
}

std::string to_string(const Value& v);
std::string to_string(ValueKind k);

/// A flat key tuple, e.g. the group-by key of a hash map entry.
using KeyTuple = std::vector<Value>;

inline void hash_combine(std::size_t& seed, std::size_t h) {
  seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct ValueHash {
  std::size_t operator()(const Value& v) const {
    std::size_t seed = v.index();
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      hash_combine(seed, std::hash<std::int64_t>{}(*i));
    } else {
      hash_combine(seed, std::hash<std::string>{}(std::get<std::string>(v)));
    }
    return seed;
  }
};

struct KeyTupleHash {
  std::size_t operator()(const KeyTuple& key) const {
    std::size_t seed = key.size();
    for (const auto& v : key) hash_combine(seed, ValueHash{}(v));
    return seed;
  }
};

}  // namespace shredjoin
