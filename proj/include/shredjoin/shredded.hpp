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
#include <unordered_map>
#include <vector>

#include "shredjoin/columns.hpp"
#include "shredjoin/nested_value.hpp"
#include "shredjoin/scheme.hpp"

namespace shredjoin {

/// One physical relation over ishred(Y) per nested scheme Y.
using Store = std::map<Scheme, PhysicalRelation>;

/// Shredded nested relation: the top-level physical relation over shred(X),
/// a store over X, and the selection vector of valid rows.
struct ShreddedRelation {
  Scheme scheme;
  PhysicalRelation phys;
  Store store;
  SelectionVector sel;

  std::size_t cardinality() const { return sel.size(); }
};

struct DictEntry {
  std::size_t head = 0;
  std::size_t weight = 0;
  friend bool operator==(const DictEntry&, const DictEntry&) = default;
};

using DictMap = std::unordered_map<KeyTuple, DictEntry, KeyTupleHash>;

/// Shredded dictionary: key tuples (in dscheme.keys order) mapped to the head
/// of a linked list in store(dscheme.value) and its weight.
struct ShreddedDictionary {
  DictScheme dscheme;
  DictMap hmap;
  Store store;

  std::size_t cardinality() const { return hmap.size(); }
};

/// Wraps a flat physical relation; the store is empty and sel = allsel.
ShreddedRelation shred_flat(PhysicalRelation rel);

/// Decodes the represented bag. Throws StructuralError if validation fails.
NestedRelationValue unshred(const ShreddedRelation& r);
DictValue unshred(const ShreddedDictionary& d);

/// Direct encoder used to build test inputs. With `pad`, every valid top-level
/// row is preceded by an invalid copy that the selection vector skips.
ShreddedRelation shred_nested(const NestedRelationValue& v, bool pad = false);

struct Violation {
  std::string invariant;
  std::string location;
};

std::vector<Violation> validate(const ShreddedRelation& r);
std::vector<Violation> validate(const ShreddedDictionary& d);

/// w[i] = product over the nested members Y of `x` of phys.w(Y)[i].
std::vector<std::size_t> multiply_weights(const PhysicalRelation& phys, const Scheme& x);

/// Iterates the 1-based offsets of one linked list in a store relation.
class ListIterator {
 public:
  ListIterator(const std::vector<std::int64_t>& nxt, std::size_t head)
      : nxt_(&nxt), current_(head) {}
  bool done() const { return current_ == 0; }
  std::size_t current() const { return current_; }
  void advance() { current_ = static_cast<std::size_t>((*nxt_)[current_ - 1]); }

 private:
  const std::vector<std::int64_t>* nxt_;
  std::size_t current_;
};

/// Debug dumps: 1-based row numbers, hol/w pairs, nxt offsets.
std::string dump(const PhysicalRelation& rel, const std::string& title);
std::string dump(const ShreddedRelation& r);
std::string dump(const ShreddedDictionary& d);

}  // namespace shredjoin
