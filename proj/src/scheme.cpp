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

#include "shredjoin/scheme.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "shredjoin/errors.hpp"

namespace shredjoin {

namespace {

void collect_flat(const Scheme& x, std::vector<std::string>& out) {
  for (const auto& a : x.flat_members()) out.push_back(a);
  for (const auto& z : x.nested_members()) collect_flat(z, out);
}

void collect_sub(const Scheme& x, std::vector<Scheme>& out) {
  for (const auto& z : x.nested_members()) {
    out.push_back(z);
    collect_sub(z, out);
  }
}

std::size_t count_empty(const Scheme& x) {
  std::vector<Scheme> sub;
  collect_sub(x, sub);
  return static_cast<std::size_t>(
      std::count_if(sub.begin(), sub.end(), [](const Scheme& s) { return s.empty(); }));
}

class SchemeParser {
 public:
  explicit SchemeParser(std::string_view text) : text_(text) {}

  Scheme parse_all() {
    Scheme s = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return s;
  }

 private:
  Scheme parse() {
    skip_ws();
    expect('{');
    std::vector<std::string> flat;
    std::vector<Scheme> nested;
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return Scheme(flat, nested);
    }
    while (true) {
      skip_ws();
      if (peek() == '{') {
        nested.push_back(parse());
      } else {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_'))
          ++pos_;
        if (start == pos_) fail("expected attribute or '{'");
        flat.emplace_back(text_.substr(start, pos_ - start));
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return Scheme(flat, nested);
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("scheme '" + std::string(text_) + "': " + msg, 0, pos_ + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

Scheme::Scheme(std::vector<std::string> flat, std::vector<Scheme> nested)
    : flat_(std::move(flat)), nested_(std::move(nested)) {
  std::sort(flat_.begin(), flat_.end());
  std::sort(nested_.begin(), nested_.end());
  for (const auto& a : flat_) {
    if (!is_identifier(a)) throw SchemeError("invalid attribute name '" + a + "'");
    if (a == kNxt) throw SchemeError("attribute name 'nxt' is reserved");
  }
  std::vector<std::string> all;
  collect_flat(*this, all);
  std::sort(all.begin(), all.end());
  auto dup = std::adjacent_find(all.begin(), all.end());
  if (dup != all.end()) throw SchemeError("attribute '" + *dup + "' occurs more than once");

  text_ = "{";
  bool first = true;
  for (const auto& a : flat_) {
    if (!first) text_ += ",";
    text_ += a;
    first = false;
  }
  for (const auto& z : nested_) {
    if (!first) text_ += ",";
    text_ += z.str();
    first = false;
  }
  text_ += "}";
  if (count_empty(*this) > 1) throw SchemeError("empty scheme occurs more than once in " + text_);
}

Scheme Scheme::parse(std::string_view text) { return SchemeParser(text).parse_all(); }

bool Scheme::has_flat(const std::string& attr) const {
  return std::binary_search(flat_.begin(), flat_.end(), attr);
}

bool Scheme::has_nested(const Scheme& member) const {
  return std::binary_search(nested_.begin(), nested_.end(), member);
}

Scheme Scheme::with_nested(const Scheme& member) const {
  auto nested = nested_;
  nested.push_back(member);
  return Scheme(flat_, std::move(nested));
}

Scheme Scheme::without_nested(const Scheme& member) const {
  auto nested = nested_;
  auto it = std::find(nested.begin(), nested.end(), member);
  if (it == nested.end()) throw SchemeError(member.str() + " is not a member of " + text_);
  nested.erase(it);
  return Scheme(flat_, std::move(nested));
}

DictScheme::DictScheme(std::vector<std::string> k, Scheme v) : keys(std::move(k)), value(std::move(v)) {
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
    throw SchemeError("duplicate dictionary key attribute");
  for (const auto& a : keys) {
    if (!is_identifier(a)) throw SchemeError("invalid key attribute '" + a + "'");
  }
  auto inner = flat_attrs(value);
  for (const auto& a : keys) {
    if (std::find(inner.begin(), inner.end(), a) != inner.end())
      throw SchemeError("key attribute '" + a + "' occurs in value scheme " + value.str());
  }
}

std::string DictScheme::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0) out += ",";
    out += keys[i];
  }
  return out + "} -> " + value.str();
}

std::vector<std::string> ShreddedScheme::columns() const {
  std::vector<std::string> out = flat;
  for (const auto& z : nested) {
    out.push_back(hol_name(z));
    out.push_back(weight_name(z));
  }
  if (inner) out.emplace_back(kNxt);
  return out;
}

std::string hol_name(const Scheme& nested) { return "hol" + nested.str(); }
std::string weight_name(const Scheme& nested) { return "w" + nested.str(); }

std::vector<std::string> flat_attrs(const Scheme& x) {
  std::vector<std::string> out;
  collect_flat(x, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Scheme> sub_schemes(const Scheme& x) {
  std::vector<Scheme> out;
  collect_sub(x, out);
  std::sort(out.begin(), out.end());
  return out;
}

ShreddedScheme shred_scheme(const Scheme& x, bool inner) {
  return ShreddedScheme{x.flat_members(), x.nested_members(), inner};
}

bool compatible(const Scheme& x, const DictScheme& d) {
  for (const auto& k : d.keys)
    if (!x.has_flat(k)) return false;
  auto fx = flat_attrs(x);
  for (const auto& a : flat_attrs(d.value))
    if (std::binary_search(fx.begin(), fx.end(), a)) return false;
  std::size_t empties = count_empty(x) + count_empty(d.value) + (d.value.empty() ? 1 : 0);
  return empties <= 1;
}

Scheme rename_scheme(const Scheme& x, const std::map<std::string, std::string>& renaming) {
  std::vector<std::string> flat;
  for (const auto& a : x.flat_members()) {
    auto it = renaming.find(a);
    flat.push_back(it == renaming.end() ? a : it->second);
  }
  std::vector<Scheme> nested;
  for (const auto& z : x.nested_members()) nested.push_back(rename_scheme(z, renaming));
  return Scheme(std::move(flat), std::move(nested));
}

}  // namespace shredjoin
