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

#include "shredjoin/database.hpp"

#include <algorithm>
#include <memory>

#include "shredjoin/errors.hpp"

namespace shredjoin {

const PhysicalRelation& Database::get(const std::string& name) const {
  auto it = relations.find(name);
  if (it == relations.end()) throw SchemeError("unknown relation " + name);
  return it->second;
}

void Database::put(const std::string& name, PhysicalRelation rel) {
  relations[name] = std::move(rel);
}

PhysicalRelation bind_atom(const Database& db, const Atom& atom) {
  const PhysicalRelation& rel = db.get(atom.relation);
  if (rel.columns().size() != atom.attrs.size())
    throw SchemeError("atom " + atom.str() + " has arity " + std::to_string(atom.attrs.size()) +
                      " but relation " + atom.relation + " has " +
                      std::to_string(rel.columns().size()) + " columns");
  PhysicalRelation out(rel.size());
  for (std::size_t i = 0; i < atom.attrs.size(); ++i)
    out.add_column(rel.columns()[i].renamed(atom.attrs[i]));
  return out;
}

PhysicalRelation apply_filters(const PhysicalRelation& rel, const std::vector<Comparison>& filters) {
  Predicate p;
  for (const auto& f : filters) {
    auto attrs = f.attributes();
    if (std::all_of(attrs.begin(), attrs.end(), [&](const std::string& a) { return rel.has_column(a); }))
      p.conjuncts.push_back(f);
  }
  if (p.is_true()) return rel;
  std::vector<std::size_t> kept;
  for (std::size_t i = 1; i <= rel.size(); ++i)
    if (p.eval([&](const std::string& a) { return rel.column(a).at(i); })) kept.push_back(i);
  return take_all(rel, kept);
}

std::vector<PhysicalRelation> bind_query(const Database& db, const JoinQuery& q) {
  std::vector<PhysicalRelation> out;
  out.reserve(q.atoms.size());
  for (const auto& atom : q.atoms) out.push_back(apply_filters(bind_atom(db, atom), q.filters));
  return out;
}

InputResolver resolver_for(const std::vector<PhysicalRelation>& bound) {
  auto shared = std::make_shared<const std::vector<PhysicalRelation>>(bound);
  return [shared](const Atom& atom, std::size_t index) -> PhysicalRelation {
    if (index >= shared->size())
      throw OutOfRange("no bound relation for atom " + atom.str() + " #" + std::to_string(index));
    const PhysicalRelation& rel = (*shared)[index];
    for (const auto& a : atom.attrs)
      if (!rel.has_column(a))
        throw OutOfRange("bound relation #" + std::to_string(index) + " lacks " + a);
    return rel;
  };
}

InputResolver resolver_for(const Database& db, std::vector<Comparison> filters) {
  auto shared = std::make_shared<const Database>(db);
  return [shared, filters = std::move(filters)](const Atom& atom, std::size_t) {
    return apply_filters(bind_atom(*shared, atom), filters);
  };
}

}  // namespace shredjoin
