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

#include "shredjoin/nsa_ops.hpp"

#include <algorithm>
#include <set>

#include "shredjoin/errors.hpp"

namespace shredjoin {

namespace {

Column ints_column(const std::string& name, const std::vector<std::size_t>& v) {
  return Column(name, std::vector<std::int64_t>(v.begin(), v.end()));
}

void merge_store(Store& into, const Store& from, const std::string& op) {
  for (const auto& [s, rel] : from) {
    if (!into.emplace(s, rel).second)
      throw StoreClashError(op + ": both stores define " + s.str());
  }
}

std::vector<std::size_t> list_positions(const std::vector<std::int64_t>& nxt, std::int64_t head) {
  std::vector<std::size_t> out;
  for (ListIterator li(nxt, static_cast<std::size_t>(head)); !li.done(); li.advance())
    out.push_back(li.current());
  return out;
}

// Adds `delta` to every non-zero entry.
Column shifted(const Column& c, std::size_t delta) {
  if (delta == 0) return c;
  std::vector<std::int64_t> v = c.ints();
  for (auto& x : v)
    if (x != 0) x += static_cast<std::int64_t>(delta);
  return Column(c.name(), std::move(v));
}

Column concat(const Column& a, const Column& b) {
  if (a.size() == 0) return b.renamed(a.name());
  if (b.size() == 0) return a;
  if (a.kind() != b.kind()) throw TypeError("union", a.name(), "columns differ in value kind");
  return std::visit(
      [&](const auto& va) {
        using V = std::decay_t<decltype(va)>;
        V out = va;
        const auto& vb = std::get<V>(b.data());
        out.insert(out.end(), vb.begin(), vb.end());
        return Column(a.name(), ColumnData(std::move(out)));
      },
      a.data());
}

// b's hol and nxt offsets shifted by the sizes of a's store relations.
PhysicalRelation append_shifted(const PhysicalRelation& a, const PhysicalRelation& b,
                                const Scheme& scheme, const std::map<Scheme, std::size_t>& offset,
                                std::size_t self_offset, bool inner) {
  std::map<std::string, std::size_t> delta;
  for (const auto& z : scheme.nested_members()) delta[hol_name(z)] = offset.at(z);
  if (inner) delta[std::string(kNxt)] = self_offset;
  PhysicalRelation out(a.size() + b.size());
  for (const auto& col : a.columns()) {
    Column other = b.column(col.name());
    auto it = delta.find(col.name());
    if (it != delta.end()) other = shifted(other, it->second);
    out.add_column(concat(col, other));
  }
  return out;
}

}  // namespace

ShreddedDictionary groupby(ShreddedRelation r, const std::vector<std::string>& keys_in,
                           Counters* counters) {
  Counters::Scope scope(counters, "groupby");
  std::vector<std::string> keys = keys_in;
  std::sort(keys.begin(), keys.end());
  std::vector<std::string> rest;
  for (const auto& k : keys)
    if (!r.scheme.has_flat(k))
      throw TypeError("groupby", r.scheme.str(), "key '" + k + "' is not a flat member");
  for (const auto& a : r.scheme.flat_members())
    if (!std::binary_search(keys.begin(), keys.end(), a)) rest.push_back(a);

  ShreddedDictionary d;
  d.dscheme = DictScheme(keys, Scheme(rest, r.scheme.nested_members()));
  const Scheme& z = d.dscheme.value;

  // store(Z) aliases the shred(Z) columns of phys and adds a fresh nxt.
  PhysicalRelation zrel(r.phys.size());
  for (const auto& name : shred_scheme(z, false).columns()) zrel.add_column(r.phys.column(name));

  std::vector<std::size_t> w = multiply_weights(r.phys, r.scheme);
  std::vector<std::size_t> nxt(r.phys.size(), 0);
  d.hmap.reserve(r.sel.size());
  for (std::size_t i : r.sel) {
    auto [it, inserted] = d.hmap.try_emplace(r.phys.row(i, keys));
    nxt[i - 1] = it->second.head;  // 0 for a fresh key
    it->second.head = i;
    it->second.weight += w[i - 1];
  }
  if (counters != nullptr) counters->record_build(r.sel.size());
  zrel.add_column(ints_column(std::string(kNxt), nxt));

  d.store = std::move(r.store);
  if (!d.store.emplace(z, std::move(zrel)).second)
    throw StoreClashError("groupby: store already defines " + z.str());
  return d;
}

ShreddedRelation nsemijoin(ShreddedRelation r, const ShreddedDictionary& d, Counters* counters) {
  Counters::Scope scope(counters, "semijoin");
  if (!compatible(r.scheme, d.dscheme))
    throw TypeError("nsemijoin", r.scheme.str(),
                    "not compatible with dictionary " + d.dscheme.str());
  const Scheme& z = d.dscheme.value;
  std::vector<std::size_t> hol(r.phys.size(), 0);
  std::vector<std::size_t> w(r.phys.size(), 0);
  std::vector<std::size_t> kept;
  kept.reserve(r.sel.size());
  for (std::size_t i : r.sel) {
    auto it = d.hmap.find(r.phys.row(i, d.dscheme.keys));
    if (it == d.hmap.end()) continue;
    hol[i - 1] = it->second.head;
    w[i - 1] = it->second.weight;
    kept.push_back(i);
  }
  if (counters != nullptr) counters->record_probe(r.sel.size(), d.hmap.size());

  r.phys.add_column(ints_column(hol_name(z), hol));
  r.phys.add_column(ints_column(weight_name(z), w));
  merge_store(r.store, d.store, "nsemijoin");
  r.scheme = r.scheme.with_nested(z);
  r.sel = SelectionVector(std::move(kept));
  return r;
}

ShreddedRelation unnest(ShreddedRelation r, const Scheme& y, Counters* counters) {
  Counters::Scope scope(counters, "unnest");
  if (!r.scheme.has_nested(y))
    throw TypeError("unnest", r.scheme.str(), y.str() + " is not a nested member");
  const PhysicalRelation& ystore = r.store.at(y);
  const auto& nxt = ystore.column(std::string(kNxt)).ints();
  const auto& heads = r.phys.column(hol_name(y)).ints();

  std::vector<std::size_t> pos_r;
  std::vector<std::size_t> pos_y;
  for (std::size_t i : r.sel) {
    for (ListIterator li(nxt, static_cast<std::size_t>(heads[i - 1])); !li.done(); li.advance()) {
      pos_r.push_back(i);
      pos_y.push_back(li.current());
    }
  }

  ShreddedRelation out;
  Scheme rest = r.scheme.without_nested(y);
  std::vector<std::string> flat = rest.flat_members();
  flat.insert(flat.end(), y.flat_members().begin(), y.flat_members().end());
  std::vector<Scheme> nested = rest.nested_members();
  nested.insert(nested.end(), y.nested_members().begin(), y.nested_members().end());
  out.scheme = Scheme(flat, nested);
  out.phys = PhysicalRelation(pos_r.size());

  // One counted take per output attribute; a nested attribute's weight column
  // travels with its head column.
  auto emit = [&](const PhysicalRelation& src, const Scheme& scheme,
                  const std::vector<std::size_t>& pos) {
    for (const auto& a : scheme.flat_members()) out.phys.add_column(take(src.column(a), pos, counters));
    for (const auto& z : scheme.nested_members()) {
      out.phys.add_column(take(src.column(hol_name(z)), pos, counters));
      out.phys.add_column(take(src.column(weight_name(z)), pos));
    }
  };
  emit(r.phys, rest, pos_r);
  emit(ystore, y, pos_y);

  out.store = std::move(r.store);
  out.store.erase(y);
  out.sel = allsel(out.phys);
  return out;
}

namespace {

// A run of one relation row in the flattened output: each of the row's
// flattened tuples appears `rep` times consecutively.
struct Run {
  std::size_t pos;
  std::size_t rep;
};

class Flattener {
 public:
  Flattener(const ShreddedRelation& r, Counters* counters, std::size_t out_len)
      : store_(r.store), counters_(counters), out_len_(out_len) {}

  void level(const PhysicalRelation& rel, const Scheme& scheme, const std::vector<Run>& runs) {
    std::vector<std::vector<std::int64_t>> weights;
    for (const auto& z : scheme.nested_members()) weights.push_back(rel.column(weight_name(z)).ints());
    auto row_weight = [&](std::size_t p) {
      std::size_t w = 1;
      for (const auto& col : weights) w *= static_cast<std::size_t>(col[p - 1]);
      return w;
    };

    if (!scheme.flat_members().empty()) {
      std::vector<std::size_t> pos;
      pos.reserve(out_len_);
      for (const Run& run : runs) pos.insert(pos.end(), row_weight(run.pos) * run.rep, run.pos);
      for (const auto& a : scheme.flat_members()) columns_.push_back(take(rel.column(a), pos, counters_));
    }

    const auto& nested = scheme.nested_members();
    for (std::size_t i = 0; i < nested.size(); ++i) {
      const PhysicalRelation& child = store_.at(nested[i]);
      const auto& nxt = child.column(std::string(kNxt)).ints();
      const auto& heads = rel.column(hol_name(nested[i])).ints();
      std::vector<Run> child_runs;
      for (const Run& run : runs) {
        std::size_t prefix = 1;
        std::size_t rest = 1;
        for (std::size_t j = 0; j < nested.size(); ++j) {
          auto wj = static_cast<std::size_t>(weights[j][run.pos - 1]);
          if (j < i) prefix *= wj;
          if (j > i) rest *= wj;
        }
        std::vector<std::size_t> list = list_positions(nxt, heads[run.pos - 1]);
        for (std::size_t k = 0; k < prefix; ++k)
          for (std::size_t e : list) child_runs.push_back({e, run.rep * rest});
      }
      level(child, nested[i], child_runs);
    }
  }

  std::vector<Column> take_columns() { return std::move(columns_); }

 private:
  const Store& store_;
  Counters* counters_;
  std::size_t out_len_;
  std::vector<Column> columns_;
};

}  // namespace

ShreddedRelation flatten(const ShreddedRelation& r, Counters* counters) {
  Counters::Scope scope(counters, "flatten");
  std::vector<std::size_t> w = multiply_weights(r.phys, r.scheme);
  std::size_t total = 0;
  std::vector<Run> runs;
  runs.reserve(r.sel.size());
  for (std::size_t i : r.sel) {
    total += w[i - 1];
    runs.push_back({i, 1});
  }
  Flattener f(r, counters, total);
  f.level(r.phys, r.scheme, runs);
  std::vector<Column> cols = f.take_columns();
  std::sort(cols.begin(), cols.end(),
            [](const Column& a, const Column& b) { return a.name() < b.name(); });

  ShreddedRelation out;
  out.scheme = Scheme::of_flat(flat_attrs(r.scheme));
  out.phys = PhysicalRelation(total);
  for (auto& c : cols) out.phys.add_column(std::move(c));
  out.sel = allsel(out.phys);
  return out;
}

ShreddedRelation select(ShreddedRelation r, const Predicate& predicate) {
  for (const auto& a : predicate.attributes())
    if (!r.scheme.has_flat(a))
      throw TypeError("select", r.scheme.str(), "'" + a + "' is not a flat member");
  if (predicate.is_true()) return r;
  std::vector<std::size_t> kept;
  for (std::size_t i : r.sel) {
    if (predicate.eval([&](const std::string& a) { return r.phys.column(a).at(i); }))
      kept.push_back(i);
  }
  if (r.scheme.is_flat()) {
    if (kept.size() != r.phys.size()) r.phys = take_all(r.phys, kept);
    r.sel = allsel(r.phys);
  } else {
    r.sel = SelectionVector(std::move(kept));
  }
  return r;
}

ShreddedRelation project(ShreddedRelation r, const Scheme& keep) {
  for (const auto& a : keep.flat_members())
    if (!r.scheme.has_flat(a)) throw TypeError("project", r.scheme.str(), "'" + a + "' is not a member");
  for (const auto& z : keep.nested_members())
    if (!r.scheme.has_nested(z)) throw TypeError("project", r.scheme.str(), z.str() + " is not a member");

  auto wanted = shred_scheme(keep, false).columns();
  std::vector<std::string> drop;
  for (const auto& c : r.phys.columns())
    if (std::find(wanted.begin(), wanted.end(), c.name()) == wanted.end()) drop.push_back(c.name());
  for (const auto& name : drop) r.phys.remove_column(name);

  auto subs = sub_schemes(keep);
  for (auto it = r.store.begin(); it != r.store.end();) {
    if (std::binary_search(subs.begin(), subs.end(), it->first)) {
      ++it;
    } else {
      it = r.store.erase(it);
    }
  }
  r.scheme = keep;
  if (keep.is_flat() && !r.sel.is_all(r.phys.size())) {
    r.phys = take_all(r.phys, r.sel.rows());
    r.sel = allsel(r.phys);
  }
  return r;
}

ShreddedRelation rename(const ShreddedRelation& r,
                        const std::map<std::string, std::string>& renaming) {
  auto all = flat_attrs(r.scheme);
  for (const auto& [from, to] : renaming) {
    if (!std::binary_search(all.begin(), all.end(), from))
      throw TypeError("rename", r.scheme.str(), "'" + from + "' does not occur");
  }
  Scheme renamed;
  try {
    renamed = rename_scheme(r.scheme, renaming);
  } catch (const SchemeError& e) {
    throw NameClash(std::string("renaming of ") + r.scheme.str() + " is not injective: " + e.what());
  }

  auto rename_rel = [&](const PhysicalRelation& rel, const Scheme& scheme) {
    std::map<std::string, std::string> names;
    for (const auto& a : scheme.flat_members()) {
      auto it = renaming.find(a);
      names[a] = it == renaming.end() ? a : it->second;
    }
    for (const auto& z : scheme.nested_members()) {
      Scheme rz = rename_scheme(z, renaming);
      names[hol_name(z)] = hol_name(rz);
      names[weight_name(z)] = weight_name(rz);
    }
    PhysicalRelation out(rel.size());
    for (const auto& c : rel.columns()) {
      auto it = names.find(c.name());
      out.add_column(it == names.end() ? c : c.renamed(it->second));
    }
    return out;
  };

  ShreddedRelation out;
  out.scheme = renamed;
  out.phys = rename_rel(r.phys, r.scheme);
  for (const auto& [s, rel] : r.store) out.store.emplace(rename_scheme(s, renaming), rename_rel(rel, s));
  out.sel = r.sel;
  return out;
}

ShreddedRelation unite(ShreddedRelation a, ShreddedRelation b) {
  if (a.scheme != b.scheme)
    throw TypeError("union", a.scheme.str(), "schemes differ: " + a.scheme.str() + " vs " + b.scheme.str());
  PhysicalRelation pa = take_all(a.phys, a.sel.rows());
  PhysicalRelation pb = take_all(b.phys, b.sel.rows());

  std::map<Scheme, std::size_t> offset;
  for (const auto& s : sub_schemes(a.scheme)) offset[s] = a.store.at(s).size();

  ShreddedRelation out;
  out.scheme = a.scheme;
  for (const auto& s : sub_schemes(a.scheme))
    out.store.emplace(s, append_shifted(a.store.at(s), b.store.at(s), s, offset, offset[s], true));
  out.phys = append_shifted(pa, pb, a.scheme, offset, 0, false);
  out.sel = allsel(out.phys);
  return out;
}

ShreddedRelation difference(const ShreddedRelation& a, const ShreddedRelation& b) {
  if (a.scheme != b.scheme)
    throw TypeError("difference", a.scheme.str(), "schemes differ: " + a.scheme.str() + " vs " + b.scheme.str());
  if (!a.scheme.is_flat())
    throw TypeError("difference", a.scheme.str(), "difference requires a flat scheme");
  const auto& names = a.scheme.flat_members();
  std::unordered_map<KeyTuple, std::size_t, KeyTupleHash> count;
  for (std::size_t i : b.sel) ++count[b.phys.row(i, names)];
  std::vector<std::size_t> kept;
  for (std::size_t i : a.sel) {
    auto it = count.find(a.phys.row(i, names));
    if (it != count.end() && it->second > 0) {
      --it->second;
      continue;
    }
    kept.push_back(i);
  }
  ShreddedRelation out;
  out.scheme = a.scheme;
  out.phys = take_all(a.phys, kept);
  out.sel = allsel(out.phys);
  return out;
}

}  // namespace shredjoin
