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

#include "shredjoin/nested_value.hpp"

#include <algorithm>
#include <numeric>

#include "shredjoin/errors.hpp"

namespace shredjoin {

namespace {

std::string encode(const Value& v) {
  if (kind_of(v) == ValueKind::kInt) return "i" + to_string(v);
  const auto& s = std::get<std::string>(v);
  return "s" + std::to_string(s.size()) + ":" + s;
}

}  // namespace

std::string NestedTuple::canonical() const {
  std::string out = "(";
  for (const auto& [a, v] : flat) out += a + "=" + encode(v) + ";";
  for (const auto& [s, r] : nested) out += s.str() + "=" + r.canonical() + ";";
  return out + ")";
}

std::string NestedRelationValue::canonical() const {
  std::vector<std::string> parts;
  parts.reserve(tuples.size());
  for (const auto& t : tuples) parts.push_back(t.canonical());
  std::sort(parts.begin(), parts.end());
  std::string out = scheme.str() + "[";
  for (const auto& p : parts) out += p + ",";
  return out + "]";
}

bool bag_equal(const NestedRelationValue& a, const NestedRelationValue& b) {
  return a.scheme == b.scheme && a.size() == b.size() && a.canonical() == b.canonical();
}

std::string DictValue::canonical() const {
  std::string out = dscheme.str() + "{";
  for (const auto& [k, v] : entries) {
    out += "<";
    for (const auto& x : k) out += encode(x) + ";";
    out += ">=" + v.canonical() + ",";
  }
  return out + "}";
}

bool dict_equal(const DictValue& a, const DictValue& b) {
  return a.dscheme == b.dscheme && a.canonical() == b.canonical();
}

std::size_t weight_of(const NestedTuple& t) {
  std::size_t w = 1;
  for (const auto& [s, r] : t.nested) w *= weight_of(r);
  return w;
}

std::size_t weight_of(const NestedRelationValue& v) {
  std::size_t w = 0;
  for (const auto& t : v.tuples) w += weight_of(t);
  return w;
}

void check_conformance(const NestedRelationValue& v) {
  for (const auto& t : v.tuples) {
    if (t.flat.size() != v.scheme.flat_members().size() ||
        t.nested.size() != v.scheme.nested_members().size())
      throw SchemeError("tuple " + t.canonical() + " does not conform to " + v.scheme.str());
    for (const auto& a : v.scheme.flat_members())
      if (!t.flat.count(a)) throw SchemeError("tuple lacks attribute " + a);
    for (const auto& z : v.scheme.nested_members()) {
      auto it = t.nested.find(z);
      if (it == t.nested.end()) throw SchemeError("tuple lacks nested attribute " + z.str());
      if (it->second.scheme != z) throw SchemeError("inner relation scheme mismatch at " + z.str());
      if (it->second.empty()) throw SchemeError("empty inner relation at " + z.str());
      check_conformance(it->second);
    }
  }
}

FlatBag FlatBag::canonical() const {
  std::vector<std::size_t> perm(attrs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return attrs[a] < attrs[b]; });
  FlatBag out;
  for (std::size_t p : perm) out.attrs.push_back(attrs[p]);
  out.rows.reserve(rows.size());
  for (const auto& r : rows) {
    KeyTuple t;
    t.reserve(perm.size());
    for (std::size_t p : perm) t.push_back(r[p]);
    out.rows.push_back(std::move(t));
  }
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

bool bag_equal(const FlatBag& a, const FlatBag& b) {
  if (a.size() != b.size()) return false;
  FlatBag ca = a.canonical();
  FlatBag cb = b.canonical();
  return ca.attrs == cb.attrs && ca.rows == cb.rows;
}

FlatBag to_flat_bag(const NestedRelationValue& v) {
  if (!v.scheme.is_flat()) throw SchemeError("to_flat_bag on nested scheme " + v.scheme.str());
  FlatBag out;
  out.attrs = v.scheme.flat_members();
  for (const auto& t : v.tuples) {
    KeyTuple row;
    for (const auto& a : out.attrs) row.push_back(t.flat.at(a));
    out.rows.push_back(std::move(row));
  }
  return out;
}

NestedRelationValue to_nested(const FlatBag& b) {
  NestedRelationValue out;
  out.scheme = Scheme::of_flat(b.attrs);
  for (const auto& r : b.rows) {
    NestedTuple t;
    for (std::size_t i = 0; i < b.attrs.size(); ++i) t.flat[b.attrs[i]] = r[i];
    out.tuples.push_back(std::move(t));
  }
  return out;
}

}  // namespace shredjoin
