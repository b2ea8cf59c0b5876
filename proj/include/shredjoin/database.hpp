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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "shredjoin/columns.hpp"
#include "shredjoin/query.hpp"

namespace shredjoin {

/// Named flat base relations. Column names are the declared attribute names.
struct Database {
  std::map<std::string, PhysicalRelation> relations;

  bool has(const std::string& name) const { return relations.count(name) != 0; }
  const PhysicalRelation& get(const std::string& name) const;
  void put(const std::string& name, PhysicalRelation rel);
};

/// The relation of `atom` with its columns renamed positionally to the atom's
/// variables. Throws SchemeError on unknown relation or arity mismatch.
PhysicalRelation bind_atom(const Database& db, const Atom& atom);

/// Applies every filter whose attributes are all columns of `rel`.
PhysicalRelation apply_filters(const PhysicalRelation& rel,
                               const std::vector<Comparison>& filters);

/// One bound, filtered relation per query atom, indexed like `q.atoms`.
std::vector<PhysicalRelation> bind_query(const Database& db, const JoinQuery& q);

/// Resolves an input atom occurrence (atom, index in the query) to its relation.
using InputResolver = std::function<PhysicalRelation(const Atom&, std::size_t)>;

InputResolver resolver_for(const std::vector<PhysicalRelation>& bound);
InputResolver resolver_for(const Database& db, std::vector<Comparison> filters = {});

}  // namespace shredjoin
