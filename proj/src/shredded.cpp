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

#include "shredjoin/shredded.hpp"

#include <algorithm>
#include <set>

#include "shredjoin/errors.hpp"

namespace shredjoin {

namespace {

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<std::string> column_names(const PhysicalRelation& rel) {
  std::vector<std::string> out;
  for (const auto& c : rel.columns()) out.push_back(c.name());
  return out;
}

Column column_of(const std::string& name, const std::vector<Value>& values) {
  bool strings = std::any_of(values.begin(), values.end(),
                             [](const Value& v) { return kind_of(v) == ValueKind::kString; });
  if (!strings) {
    std::vector<std::int64_t> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(std::get<std::int64_t>(v));
    return Column(name, std::move(out));
  }
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (kind_of(v) != ValueKind::kString) throw SchemeError("column " + name + " mixes value kinds");
    out.push_back(std::get<std::string>(v));
  }
  return Column(name, std::move(out));
}

std::vector<std::int64_t> to_ints(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

// Checks every structural invariant reachable from a set of valid rows.
class Validator {
 public:
  Validator(const Store& store, std::vector<Violation>& out) : store_(store), out_(out) {}

  void check_store(const std::vector<Scheme>& expected, const std::string& where) {
    std::set<Scheme> want(expected.begin(), expected.end());
    std::set<Scheme> have;
    for (const auto& [s, rel] : store_) have.insert(s);
    if (want != have) add("store domain", where + ": store schemes differ from sub-schemes");
    for (const auto& [s, rel] : store_) {
      std::string loc = "store " + s.str();
      if (sorted(column_names(rel)) != sorted(shred_scheme(s, true).columns())) {
        add("store columns", loc);
        broken_.insert(s);
        continue;
      }
      check_nxt(s, rel, loc);
    }
  }

  // Returns the weight of row `row` of `rel` over `scheme`, checking hol/w
  // consistency of every list reachable from it. Returns 0 on violation.
  std::size_t row_weight(const PhysicalRelation& rel, const Scheme& scheme, std::size_t row,
                         const std::string& loc) {
    std::size_t product = 1;
    for (const auto& z : scheme.nested_members()) {
      std::int64_t head = rel.column(hol_name(z)).ints()[row - 1];
      std::int64_t w = rel.column(weight_name(z)).ints()[row - 1];
      std::size_t actual = list_weight(z, head, loc + " row " + std::to_string(row) + " " + z.str());
      if (actual == 0) return 0;
      if (w < 0 || static_cast<std::size_t>(w) != actual) {
        add("weight consistency", loc + " row " + std::to_string(row) + " " + weight_name(z) +
                                      "=" + std::to_string(w) + " but list weighs " +
                                      std::to_string(actual));
        return 0;
      }
      product *= actual;
    }
    return product;
  }

  // Weight of the list starting at `head` in store(z); 0 on violation.
  std::size_t list_weight(const Scheme& z, std::int64_t head, const std::string& loc) {
    auto it = store_.find(z);
    if (it == store_.end() || broken_.count(z)) {
      add("store domain", loc + ": no usable store for " + z.str());
      return 0;
    }
    const PhysicalRelation& rel = it->second;
    if (head <= 0 || static_cast<std::size_t>(head) > rel.size()) {
      add("head offset", loc + ": head " + std::to_string(head) + " outside 1.." +
                             std::to_string(rel.size()));
      return 0;
    }
    const auto& nxt = rel.column(std::string(kNxt)).ints();
    std::size_t total = 0;
    for (ListIterator li(nxt, static_cast<std::size_t>(head)); !li.done(); li.advance()) {
      auto key = std::make_pair(z, li.current());
      auto memo = memo_.find(key);
      std::size_t w;
      if (memo != memo_.end()) {
        w = memo->second;
      } else {
        w = row_weight(rel, z, li.current(), "store " + z.str());
        memo_[key] = w;
      }
      if (w == 0) return 0;
      total += w;
    }
    return total;
  }

  void add(const std::string& invariant, const std::string& location) {
    out_.push_back({invariant, location});
  }

 private:
  void check_nxt(const Scheme& s, const PhysicalRelation& rel, const std::string& loc) {
    const auto& nxt = rel.column(std::string(kNxt)).ints();
    for (std::size_t i = 0; i < nxt.size(); ++i) {
      if (nxt[i] < 0 || static_cast<std::size_t>(nxt[i]) > rel.size()) {
        add("nxt range", loc + " row " + std::to_string(i + 1));
        broken_.insert(s);
        return;
      }
    }
    // nxt is a functional graph; colour rows to find cycles.
    std::vector<int> colour(nxt.size() + 1, 0);
    for (std::size_t start = 1; start <= nxt.size(); ++start) {
      if (colour[start] != 0) continue;
      std::vector<std::size_t> path;
      std::size_t cur = start;
      while (cur != 0 && colour[cur] == 0) {
        colour[cur] = 1;
        path.push_back(cur);
        cur = static_cast<std::size_t>(nxt[cur - 1]);
      }
      if (cur != 0 && colour[cur] == 1) {
        add("nxt acyclicity", loc + " cycle through row " + std::to_string(cur));
        broken_.insert(s);
        return;
      }
      for (std::size_t p : path) colour[p] = 2;
    }
  }

  const Store& store_;
  std::vector<Violation>& out_;
  std::set<Scheme> broken_;
  std::map<std::pair<Scheme, std::size_t>, std::size_t> memo_;
};

struct RelBuilder {
  Scheme scheme;
  std::map<std::string, std::vector<Value>> flat;
  std::map<Scheme, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> nested;
  std::vector<std::size_t> nxt;
  std::size_t rows = 0;

  explicit RelBuilder(Scheme s) : scheme(std::move(s)) {}

  std::size_t append(const NestedTuple& t, const std::map<Scheme, std::pair<std::size_t, std::size_t>>& lists,
                     std::size_t next) {
    for (const auto& a : scheme.flat_members()) flat[a].push_back(t.flat.at(a));
    for (const auto& z : scheme.nested_members()) {
      auto [head, w] = lists.at(z);
      nested[z].first.push_back(head);
      nested[z].second.push_back(w);
    }
    nxt.push_back(next);
    return ++rows;
  }

  PhysicalRelation build(bool inner) const {
    PhysicalRelation rel(rows);
    for (const auto& a : scheme.flat_members()) {
      auto it = flat.find(a);
      rel.add_column(column_of(a, it == flat.end() ? std::vector<Value>{} : it->second));
    }
    for (const auto& z : scheme.nested_members()) {
      auto it = nested.find(z);
      std::vector<std::size_t> h, w;
      if (it != nested.end()) std::tie(h, w) = it->second;
      rel.add_column(Column(hol_name(z), to_ints(h)));
      rel.add_column(Column(weight_name(z), to_ints(w)));
    }
    if (inner) rel.add_column(Column(std::string(kNxt), to_ints(nxt)));
    return rel;
  }
};

class Encoder {
 public:
  explicit Encoder(const Scheme& top) {
    for (const auto& s : sub_schemes(top)) builders_.emplace(s, RelBuilder(s));
  }

  std::map<Scheme, std::pair<std::size_t, std::size_t>> encode_nested(const NestedTuple& t,
                                                                        const Scheme& scheme) {
    std::map<Scheme, std::pair<std::size_t, std::size_t>> lists;
    for (const auto& z : scheme.nested_members()) lists[z] = encode_list(t.nested.at(z));
    return lists;
  }

  Store store() const {
    Store out;
    for (const auto& [s, b] : builders_) out.emplace(s, b.build(true));
    return out;
  }

 private:
  // Appends the tuples as one linked list; returns (head, weight).
  std::pair<std::size_t, std::size_t> encode_list(const NestedRelationValue& v) {
    if (v.empty()) throw SchemeError("cannot encode an empty inner relation");
    std::size_t head = 0;
    std::size_t weight = 0;
    for (const auto& t : v.tuples) {
      auto lists = encode_nested(t, v.scheme);
      head = builders_.at(v.scheme).append(t, lists, head);
      weight += weight_of(t);
    }
    return {head, weight};
  }

  std::map<Scheme, RelBuilder> builders_;
};

std::string pad_to(const std::string& s, std::size_t width) {
  return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
}

std::string key_str(const KeyTuple& k) {
  if (k.size() == 1) return to_string(k[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i > 0) out += ",";
    out += to_string(k[i]);
  }
  return out + ")";
}

std::string dump_store(const Store& store) {
  std::string out;
  for (const auto& [s, rel] : store) out += dump(rel, "store " + s.str());
  return out;
}

}  // namespace

ShreddedRelation shred_flat(PhysicalRelation rel) {
  ShreddedRelation r;
  r.scheme = Scheme::of_flat(column_names(rel));
  r.sel = allsel(rel);
  r.phys = std::move(rel);
  return r;
}

std::vector<std::size_t> multiply_weights(const PhysicalRelation& phys, const Scheme& x) {
  std::vector<std::size_t> w(phys.size(), 1);
  for (const auto& z : x.nested_members()) {
    const auto& col = phys.column(weight_name(z)).ints();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= static_cast<std::size_t>(col[i]);
  }
  return w;
}

std::vector<Violation> validate(const ShreddedRelation& r) {
  std::vector<Violation> out;
  Validator v(r.store, out);
  if (sorted(column_names(r.phys)) != sorted(shred_scheme(r.scheme, false).columns())) {
    v.add("phys columns", "phys of " + r.scheme.str());
    return out;
  }
  if (!r.sel.empty() && r.sel.rows().back() > r.phys.size()) {
    v.add("selection range", "sel entry " + std::to_string(r.sel.rows().back()) +
                                 " exceeds phys length " + std::to_string(r.phys.size()));
    return out;
  }
  if (r.scheme.is_flat()) {
    if (!r.store.empty()) v.add("flat store", "flat relation has a non-empty store");
    if (!r.sel.is_all(r.phys.size())) v.add("flat selection", "flat relation with sel != allsel");
    return out;
  }
  v.check_store(sub_schemes(r.scheme), "relation " + r.scheme.str());
  if (!out.empty()) return out;
  for (std::size_t row : r.sel) v.row_weight(r.phys, r.scheme, row, "phys");
  return out;
}

std::vector<Violation> validate(const ShreddedDictionary& d) {
  std::vector<Violation> out;
  Validator v(d.store, out);
  auto expected = sub_schemes(d.dscheme.value);
  expected.push_back(d.dscheme.value);
  v.check_store(expected, "dictionary " + d.dscheme.str());
  if (!out.empty()) return out;
  for (const auto& [key, entry] : d.hmap) {
    if (key.size() != d.dscheme.keys.size()) {
      v.add("key arity", "key " + key_str(key));
      continue;
    }
    std::string loc = "hmap[" + key_str(key) + "]";
    std::size_t actual = v.list_weight(d.dscheme.value, static_cast<std::int64_t>(entry.head), loc);
    if (actual != 0 && actual != entry.weight)
      v.add("weight consistency", loc + ": weight " + std::to_string(entry.weight) +
                                      " but list weighs " + std::to_string(actual));
  }
  return out;
}

namespace {

NestedTuple decode_row(const PhysicalRelation& rel, const Scheme& scheme, std::size_t row,
                       const Store& store);

NestedRelationValue decode_list(const Scheme& z, std::size_t head, const Store& store) {
  NestedRelationValue out;
  out.scheme = z;
  const PhysicalRelation& rel = store.at(z);
  const auto& nxt = rel.column(std::string(kNxt)).ints();
  for (ListIterator li(nxt, head); !li.done(); li.advance())
    out.tuples.push_back(decode_row(rel, z, li.current(), store));
  return out;
}

NestedTuple decode_row(const PhysicalRelation& rel, const Scheme& scheme, std::size_t row,
                       const Store& store) {
  NestedTuple t;
  for (const auto& a : scheme.flat_members()) t.flat[a] = rel.column(a).at(row);
  for (const auto& z : scheme.nested_members()) {
    auto head = static_cast<std::size_t>(rel.column(hol_name(z)).ints()[row - 1]);
    t.nested.emplace(z, decode_list(z, head, store));
  }
  return t;
}

[[noreturn]] void structural(const std::vector<Violation>& v) {
  throw StructuralError(v.front().invariant + " at " + v.front().location);
}

}  // namespace

NestedRelationValue unshred(const ShreddedRelation& r) {
  auto violations = validate(r);
  if (!violations.empty()) structural(violations);
  NestedRelationValue out;
  out.scheme = r.scheme;
  for (std::size_t row : r.sel) out.tuples.push_back(decode_row(r.phys, r.scheme, row, r.store));
  return out;
}

DictValue unshred(const ShreddedDictionary& d) {
  auto violations = validate(d);
  if (!violations.empty()) structural(violations);
  DictValue out;
  out.dscheme = d.dscheme;
  for (const auto& [key, entry] : d.hmap)
    out.entries.emplace(key, decode_list(d.dscheme.value, entry.head, d.store));
  return out;
}

ShreddedRelation shred_nested(const NestedRelationValue& v, bool pad) {
  check_conformance(v);
  if (v.scheme.is_flat()) pad = false;
  Encoder enc(v.scheme);
  RelBuilder top(v.scheme);
  std::vector<std::size_t> sel;
  for (const auto& t : v.tuples) {
    auto lists = enc.encode_nested(t, v.scheme);
    if (pad) {
      auto junk = lists;
      for (auto& [z, hw] : junk) hw = {0, 0};
      top.append(t, junk, 0);
    }
    sel.push_back(top.append(t, lists, 0));
  }
  ShreddedRelation r;
  r.scheme = v.scheme;
  r.phys = top.build(false);
  r.store = enc.store();
  r.sel = SelectionVector(std::move(sel));
  return r;
}

std::string dump(const PhysicalRelation& rel, const std::string& title) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"#"};
  for (const auto& c : rel.columns()) header.push_back(c.name());
  cells.push_back(header);
  for (std::size_t i = 1; i <= rel.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (const auto& c : rel.columns()) row.push_back(to_string(c.at(i)));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  std::string out = title + "\n";
  for (const auto& row : cells) {
    std::string line = " ";
    for (std::size_t j = 0; j < row.size(); ++j) line += " " + pad_to(row[j], width[j]);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string dump(const ShreddedRelation& r) {
  std::string out = "relation " + r.scheme.str() + "\nsel = [";
  for (std::size_t i = 0; i < r.sel.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(r.sel[i]);
  }
  out += "]\n" + dump(r.phys, "phys");
  return out + dump_store(r.store);
}

std::string dump(const ShreddedDictionary& d) {
  std::string out = "dictionary " + d.dscheme.str() + "\nhmap\n";
  std::vector<std::pair<KeyTuple, DictEntry>> entries(d.hmap.begin(), d.hmap.end());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [k, e] : entries)
    out += "  " + key_str(k) + " -> (" + std::to_string(e.head) + "," + std::to_string(e.weight) + ")\n";
  return out + dump_store(d.store);
}

}  // namespace shredjoin
