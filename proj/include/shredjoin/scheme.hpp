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

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace shredjoin {

/// A nested scheme: a finite set of flat attribute names and nested schemes.
///
/// Members are kept in canonical order (flat names sorted, nested schemes
/// sorted by their canonical text), so two schemes are equal iff their
/// canonical strings are equal. Construction rejects schemes in which a flat
/// attribute occurs twice anywhere, or in which the empty scheme occurs more
/// than once.
class Scheme {
 public:
  Scheme() : text_("{}") {}
  Scheme(std::vector<std::string> flat, std::vector<Scheme> nested = {});

  static Scheme of_flat(std::vector<std::string> flat) { return Scheme(std::move(flat)); }
  /// Parses the canonical syntax, e.g. `{x,{y},{u,{v}}}`.
  static Scheme parse(std::string_view text);

  const std::vector<std::string>& flat_members() const { return flat_; }
  const std::vector<Scheme>& nested_members() const { return nested_; }

  bool empty() const { return flat_.empty() && nested_.empty(); }
  bool is_flat() const { return nested_.empty(); }
  /// Number of top-level members, flat and nested alike.
  std::size_t width() const { return flat_.size() + nested_.size(); }
  bool has_flat(const std::string& attr) const;
  bool has_nested(const Scheme& member) const;

  Scheme with_nested(const Scheme& member) const;
  Scheme without_nested(const Scheme& member) const;

  const std::string& str() const { return text_; }

  friend bool operator==(const Scheme& a, const Scheme& b) { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(const Scheme& a, const Scheme& b) {
    return a.text_ <=> b.text_;
  }

 private:
  std::vector<std::string> flat_;
  std::vector<Scheme> nested_;
  std::string text_;
};

/// The scheme ⟨keys → value⟩ of a dictionary.
struct DictScheme {
  DictScheme() = default;
  /// Throws SchemeError if a key attribute occurs inside `value`.
  DictScheme(std::vector<std::string> keys, Scheme value);

  std::vector<std::string> keys;  // sorted
  Scheme value;

  std::string str() const;
  friend bool operator==(const DictScheme&, const DictScheme&) = default;
};

/// Column names of a shredded physical relation: flat attributes, one
/// (hol, w) pair per top-level nested attribute, and nxt for store relations.
struct ShreddedScheme {
  std::vector<std::string> flat;
  std::vector<Scheme> nested;
  bool inner = false;

  std::vector<std::string> columns() const;
};

inline constexpr std::string_view kNxt = "nxt";

std::string hol_name(const Scheme& nested);
std::string weight_name(const Scheme& nested);

/// All flat attributes occurring in `x`, directly or recursively (sorted).
std::vector<std::string> flat_attrs(const Scheme& x);
/// All schemes occurring in `x`, directly or recursively, excluding `x`.
std::vector<Scheme> sub_schemes(const Scheme& x);
ShreddedScheme shred_scheme(const Scheme& x, bool inner);
/// keys ⊆ x (as flat members) and flat_attrs(d.value) ∩ flat_attrs(x) = ∅.
bool compatible(const Scheme& x, const DictScheme& d);

/// Applies a flat-attribute renaming at every nesting level.
Scheme rename_scheme(const Scheme& x, const std::map<std::string, std::string>& renaming);

bool is_identifier(std::string_view name);

}  // namespace shredjoin
