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
#include <map>
#include <string>
#include <vector>

#include "shredjoin/scheme.hpp"
#include "shredjoin/value.hpp"

namespace shredjoin {

// Tree-structured nested values. This is the model the shredded encoding is
// checked against, so it stays deliberately naive.

struct NestedTuple;

/// A finite bag of tuples over one scheme.
struct NestedRelationValue {
  Scheme scheme;
  std::vector<NestedTuple> tuples;

  std::size_t size() const { return tuples.size(); }
  bool empty() const { return tuples.empty(); }
  /// Order-insensitive rendering; two bags are equal iff their canonical forms are.
  std::string canonical() const;
};

struct NestedTuple {
  std::map<std::string, Value> flat;
  std::map<Scheme, NestedRelationValue> nested;

  std::string canonical() const;
};

bool bag_equal(const NestedRelationValue& a, const NestedRelationValue& b);

/// Keys are tuples over `dscheme.keys` in that (sorted) order.
struct DictValue {
  DictScheme dscheme;
  std::map<KeyTuple, NestedRelationValue> entries;

  std::size_t size() const { return entries.size(); }
  std::string canonical() const;
};

bool dict_equal(const DictValue& a, const DictValue& b);

/// Number of tuples produced by flattening.
std::size_t weight_of(const NestedTuple& t);
std::size_t weight_of(const NestedRelationValue& v);

/// Throws SchemeError if a tuple does not conform to the scheme or an inner
/// relation is empty.
void check_conformance(const NestedRelationValue& v);

/// Flat bags with named columns, used for join results.
struct FlatBag {
  std::vector<std::string> attrs;
  std::vector<KeyTuple> rows;

  std::size_t size() const { return rows.size(); }
  /// Columns in sorted name order, rows sorted.
  FlatBag canonical() const;
};

bool bag_equal(const FlatBag& a, const FlatBag& b);

FlatBag to_flat_bag(const NestedRelationValue& v);
NestedRelationValue to_nested(const FlatBag& b);

}  // namespace shredjoin
