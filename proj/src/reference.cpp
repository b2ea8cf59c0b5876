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

#include "shredjoin/reference.hpp"

#include <algorithm>
#include <optional>

#include "shredjoin/errors.hpp"

namespace shredjoin::ref {

NestedRelationValue from_physical(const PhysicalRelation& rel) {
  NestedRelationValue out;
  std::vector<std::string> names;
  for (const auto& c : rel.columns()) names.push_back(c.name());
  out.scheme = Scheme::of_flat(names);
  for (std::size_t i = 1; i <= rel.size(); ++i) {
    NestedTuple t;
    for (const auto& c : rel.columns()) t.flat[c.name()] = c.at(i);
    out.tuples.push_back(std::move(t));
  }
  return out;
}

DictValue groupby(const NestedRelationValue& r, const std::vector<std::string>& keys_in) {
  std::vector<std::string> keys = keys_in;
  std::sort(keys.begin(), keys.end());
  std::vector<std::string> rest;
  for (const auto& k : keys)
    if (!r.scheme.has_flat(k)) throw TypeError("groupby", r.scheme.str(), "unknown key " + k);
  for (const auto& a : r.scheme.flat_members())
    if (!std::binary_search(keys.begin(), keys.end(), a)) rest.push_back(a);
  DictValue d;
  d.dscheme = DictScheme(keys, Scheme(rest, r.scheme.nested_members()));
  for (const auto& t : r.tuples) {
    KeyTuple key;
    NestedTuple inner = t;
    for (const auto& k : keys) {
      key.push_back(t.flat.at(k));
      inner.flat.erase(k);
    }
    auto& bucket = d.entries[key];
    bucket.scheme = d.dscheme.value;
    bucket.tuples.push_back(std::move(inner));
  }
  return d;
}

NestedRelationValue nsemijoin(const NestedRelationValue& r, const DictValue& d) {
  if (!compatible(r.scheme, d.dscheme))
    throw TypeError("nsemijoin", r.scheme.str(), "incompatible with " + d.dscheme.str());
  NestedRelationValue out;
  out.scheme = r.scheme.with_nested(d.dscheme.value);
  for (const auto& t : r.tuples) {
    KeyTuple key;
    for (const auto& k : d.dscheme.keys) key.push_back(t.flat.at(k));
    auto it = d.entries.find(key);
    if (it == d.entries.end()) continue;
    NestedTuple u = t;
    u.nested.emplace(d.dscheme.value, it->second);
    out.tuples.push_back(std::move(u));
  }
  return out;
}

NestedRelationValue unnest(const NestedRelationValue& r, const Scheme& y) {
  if (!r.scheme.has_nested(y)) throw TypeError("unnest", r.scheme.str(), y.str() + " not nested");
  Scheme rest = r.scheme.without_nested(y);
  std::vector<std::string> flat = rest.flat_members();
  flat.insert(flat.end(), y.flat_members().begin(), y.flat_members().end());
  std::vector<Scheme> nested = rest.nested_members();
  nested.insert(nested.end(), y.nested_members().begin(), y.nested_members().end());
  NestedRelationValue out;
  out.scheme = Scheme(flat, nested);
  for (const auto& t : r.tuples) {
    for (const auto& u : t.nested.at(y).tuples) {
      NestedTuple v = t;
      v.nested.erase(y);
      for (const auto& [a, x] : u.flat) v.flat[a] = x;
      for (const auto& [s, inner] : u.nested) v.nested.emplace(s, inner);
      out.tuples.push_back(std::move(v));
    }
  }
  return out;
}

namespace {

std::vector<std::map<std::string, Value>> flatten_tuple(const NestedTuple& t) {
  std::vector<std::map<std::string, Value>> acc{t.flat};
  for (const auto& [s, inner] : t.nested) {
    std::vector<std::map<std::string, Value>> parts;
    for (const auto& u : inner.tuples) {
      auto sub = flatten_tuple(u);
      parts.insert(parts.end(), sub.begin(), sub.end());
    }
    std::vector<std::map<std::string, Value>> next;
    for (const auto& a : acc) {
      for (const auto& p : parts) {
        auto m = a;
        m.insert(p.begin(), p.end());
        next.push_back(std::move(m));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

NestedTuple rename_tuple(const NestedTuple& t, const std::map<std::string, std::string>& m) {
  NestedTuple out;
  for (const auto& [a, v] : t.flat) {
    auto it = m.find(a);
    out.flat[it == m.end() ? a : it->second] = v;
  }
  for (const auto& [s, inner] : t.nested) out.nested.emplace(rename_scheme(s, m), rename(inner, m));
  return out;
}

}  // namespace

NestedRelationValue flatten(const NestedRelationValue& r) {
  NestedRelationValue out;
  out.scheme = Scheme::of_flat(flat_attrs(r.scheme));
  for (const auto& t : r.tuples) {
    for (auto& m : flatten_tuple(t)) {
      NestedTuple u;
      u.flat = std::move(m);
      out.tuples.push_back(std::move(u));
    }
  }
  return out;
}

NestedRelationValue select(const NestedRelationValue& r, const Predicate& predicate) {
  for (const auto& a : predicate.attributes())
    if (!r.scheme.has_flat(a)) throw TypeError("select", r.scheme.str(), a + " is not flat");
  NestedRelationValue out;
  out.scheme = r.scheme;
  for (const auto& t : r.tuples)
    if (predicate.eval([&](const std::string& a) { return t.flat.at(a); })) out.tuples.push_back(t);
  return out;
}

NestedRelationValue project(const NestedRelationValue& r, const Scheme& keep) {
  for (const auto& a : keep.flat_members())
    if (!r.scheme.has_flat(a)) throw TypeError("project", r.scheme.str(), a + " not a member");
  for (const auto& z : keep.nested_members())
    if (!r.scheme.has_nested(z)) throw TypeError("project", r.scheme.str(), z.str() + " not a member");
  NestedRelationValue out;
  out.scheme = keep;
  for (const auto& t : r.tuples) {
    NestedTuple u;
    for (const auto& a : keep.flat_members()) u.flat[a] = t.flat.at(a);
    for (const auto& z : keep.nested_members()) u.nested.emplace(z, t.nested.at(z));
    out.tuples.push_back(std::move(u));
  }
  return out;
}

NestedRelationValue rename(const NestedRelationValue& r,
                           const std::map<std::string, std::string>& renaming) {
  NestedRelationValue out;
  try {
    out.scheme = rename_scheme(r.scheme, renaming);
  } catch (const SchemeError& e) {
    throw NameClash(e.what());
  }
  for (const auto& t : r.tuples) out.tuples.push_back(rename_tuple(t, renaming));
  return out;
}

NestedRelationValue unite(const NestedRelationValue& a, const NestedRelationValue& b) {
  if (a.scheme != b.scheme) throw TypeError("union", a.scheme.str(), "schemes differ");
  NestedRelationValue out = a;
  out.tuples.insert(out.tuples.end(), b.tuples.begin(), b.tuples.end());
  return out;
}

NestedRelationValue difference(const NestedRelationValue& a, const NestedRelationValue& b) {
  if (a.scheme != b.scheme || !a.scheme.is_flat())
    throw TypeError("difference", a.scheme.str(), "needs identical flat schemes");
  std::map<std::string, std::size_t> count;
  for (const auto& t : b.tuples) ++count[t.canonical()];
  NestedRelationValue out;
  out.scheme = a.scheme;
  for (const auto& t : a.tuples) {
    auto it = count.find(t.canonical());
    if (it != count.end() && it->second > 0) {
      --it->second;
      continue;
    }
    out.tuples.push_back(t);
  }
  return out;
}

namespace {

RefValue eval_node(const NsaExpr& e, const InputResolver& inputs) {
  const NsaNode& n = *e;
  auto rel = [&](std::size_t i) { return std::get<NestedRelationValue>(eval_node(n.children[i], inputs)); };
  switch (n.op) {
    case NsaOp::kInput: {
      PhysicalRelation bound = inputs(n.atom, n.leaf);
      PhysicalRelation only(bound.size());
      for (const auto& a : n.atom.attrs) only.add_column(bound.column(a));
      return from_physical(only);
    }
    case NsaOp::kSelect: return select(rel(0), n.predicate);
    case NsaOp::kProject: return project(rel(0), n.target);
    case NsaOp::kRename: return rename(rel(0), n.renaming);
    case NsaOp::kUnion: return unite(rel(0), rel(1));
    case NsaOp::kDifference: return difference(rel(0), rel(1));
    case NsaOp::kGroupBy: return groupby(rel(0), n.keys);
    case NsaOp::kNSemijoin: {
      auto d = std::get<DictValue>(eval_node(n.children[1], inputs));
      return nsemijoin(rel(0), d);
    }
    case NsaOp::kUnnest: return unnest(rel(0), n.target);
    case NsaOp::kFlatten: return flatten(rel(0));
  }
  throw TypeError("unknown", to_string(e), "unknown operator");
}

}  // namespace

RefValue eval(const NsaExpr& e, const InputResolver& inputs) {
  infer_scheme(e);  // surfaces type errors before evaluation
  return eval_node(e, inputs);
}

NestedRelationValue eval_relation(const NsaExpr& e, const InputResolver& inputs) {
  RefValue v = eval(e, inputs);
  if (auto* r = std::get_if<NestedRelationValue>(&v)) return std::move(*r);
  throw TypeError("relation", to_string(e), "expression denotes a dictionary");
}

namespace {

class Backtracker {
 public:
  Backtracker(const std::vector<Atom>& atoms, const std::vector<PhysicalRelation>& bound,
              const std::vector<Comparison>& filters, std::size_t cap)
      : atoms_(atoms), bound_(bound), cap_(cap) {
    for (const auto& a : atoms)
      for (const auto& x : a.attrs)
        if (std::find(attrs_.begin(), attrs_.end(), x) == attrs_.end()) attrs_.push_back(x);
    predicate_.conjuncts = filters;
    values_.resize(attrs_.size());
    for (const auto& a : atoms) {
      std::vector<std::size_t> ids;
      for (const auto& x : a.attrs)
        ids.push_back(static_cast<std::size_t>(std::find(attrs_.begin(), attrs_.end(), x) - attrs_.begin()));
      ids_.push_back(std::move(ids));
    }
  }

  FlatBag run() {
    FlatBag out;
    out.attrs = attrs_;
    extend(0, out);
    return out;
  }

 private:
  void extend(std::size_t k, FlatBag& out) {
    if (k == atoms_.size()) {
      if (!predicate_.is_true()) {
        bool ok = predicate_.eval([&](const std::string& a) {
          auto i = static_cast<std::size_t>(std::find(attrs_.begin(), attrs_.end(), a) - attrs_.begin());
          return *values_.at(i);
        });
        if (!ok) return;
      }
      KeyTuple row;
      for (const auto& v : values_) row.push_back(*v);
      out.rows.push_back(std::move(row));
      return;
    }
    const PhysicalRelation& rel = bound_[k];
    const auto& ids = ids_[k];
    for (std::size_t r = 1; r <= rel.size(); ++r) {
      std::vector<std::size_t> fresh;
      bool ok = true;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        Value v = rel.column(atoms_[k].attrs[j]).at(r);
        auto& slot = values_[ids[j]];
        if (slot.has_value()) {
          if (*slot != v) {
            ok = false;
            break;
          }
        } else {
          slot = std::move(v);
          fresh.push_back(ids[j]);
        }
      }
      if (ok) {
        if (++produced_ > cap_)
          throw CapExceeded("brute-force join produced more than " + std::to_string(cap_) +
                            " partial tuples");
        extend(k + 1, out);
      }
      for (std::size_t id : fresh) values_[id].reset();
    }
  }

  const std::vector<Atom>& atoms_;
  const std::vector<PhysicalRelation>& bound_;
  std::size_t cap_;
  Predicate predicate_;
  std::vector<std::string> attrs_;
  std::vector<std::vector<std::size_t>> ids_;
  std::vector<std::optional<Value>> values_;
  std::size_t produced_ = 0;
};

}  // namespace

FlatBag brute_force_join(const JoinQuery& q, const Database& db, std::size_t cap) {
  std::vector<PhysicalRelation> bound;
  for (const auto& a : q.atoms) bound.push_back(bind_atom(db, a));
  return Backtracker(q.atoms, bound, q.filters, cap).run();
}

FlatBag brute_force_join(const std::vector<Atom>& atoms, const std::vector<PhysicalRelation>& bound,
                         std::size_t cap) {
  if (atoms.size() != bound.size()) throw OutOfRange("brute_force_join: atoms and relations differ in number");
  return Backtracker(atoms, bound, {}, cap).run();
}

}  // namespace shredjoin::ref
