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

#include <map>
#include <string>
#include <vector>

#include "shredjoin/counters.hpp"
#include "shredjoin/query.hpp"
#include "shredjoin/shredded.hpp"

namespace shredjoin {

// Physical NSA operators over shredded representations. Relation arguments
// taken by value are consumed: nsemijoin extends the physical relation of its
// input in place.

/// Hash build. Keys are the sel rows' values on `keys`; Z = scheme \ keys.
ShreddedDictionary groupby(ShreddedRelation r, const std::vector<std::string>& keys,
                           Counters* counters = nullptr);

/// Hash probe. Adds hol(Z)/w(Z) columns to r.phys and narrows the selection.
ShreddedRelation nsemijoin(ShreddedRelation r, const ShreddedDictionary& d,
                           Counters* counters = nullptr);

ShreddedRelation unnest(ShreddedRelation r, const Scheme& nested,
                        Counters* counters = nullptr);

/// Complete flattening with a single take per flat output attribute.
ShreddedRelation flatten(const ShreddedRelation& r, Counters* counters = nullptr);

ShreddedRelation select(ShreddedRelation r, const Predicate& predicate);
ShreddedRelation project(ShreddedRelation r, const Scheme& keep);
ShreddedRelation rename(const ShreddedRelation& r,
                        const std::map<std::string, std::string>& renaming);
ShreddedRelation unite(ShreddedRelation a, ShreddedRelation b);
ShreddedRelation difference(const ShreddedRelation& a, const ShreddedRelation& b);

}  // namespace shredjoin
