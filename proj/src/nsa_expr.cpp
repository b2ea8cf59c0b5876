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

#include "shredjoin/nsa_expr.hpp"

#include <algorithm>
#include <set>

#include "shredjoin/errors.hpp"

namespace shredjoin {

namespace nsa {

namespace {
NsaExpr make(NsaNode n) { return std::make_shared<const NsaNode>(std::move(n)); }
}  // namespace

NsaExpr input(Atom atom, std::size_t leaf) {
  NsaNode n;
  n.op = NsaOp::kInput;
  n.atom = std::move(atom);
  n.leaf = leaf;
  return make(std::move(n));
}

NsaExpr select(NsaExpr e, Predicate predicate) {
  NsaNode n;
  n.op = NsaOp::kSelect;
  n.predicate = std::move(predicate);
  n.children = {std::move(e)};
  return make(std::move(n));
}

NsaExpr project(NsaExpr e, Scheme keep) {
  NsaNode n;
  n.op = NsaOp::kProject;
  n.target = std::move(keep);
  n.children = {std::move(e)};
  return make(std::move(n));
}

NsaExpr rename(NsaExpr e, std::map<std::string, std::string> renaming) {
  NsaNode n;
  n.op = NsaOp::kRename;
  n.renaming = std::move(renaming);
  n.children = {std::move(e)};
  return make(std::move(n));
}

NsaExpr unite(NsaExpr a, NsaExpr b) {
  NsaNode n;
  n.op = NsaOp::kUnion;
  n.children = {std::move(a), std::move(b)};
  return make(std::move(n));
}

NsaExpr difference(NsaExpr a, NsaExpr b) {
  NsaNode n;
  n.op = NsaOp::kDifference;
  n.children = {std::move(a), std::move(b)};
  return make(std::move(n));
}

NsaExpr groupby(NsaExpr e, std::vector<std::string> keys) {
  NsaNode n;
  n.op = NsaOp::kGroupBy;
  std::sort(keys.begin(), keys.end());
  n.keys = std::move(keys);
  n.children = {std::move(e)};
  return make(std::move(n));
}

NsaExpr nsemijoin(NsaExpr relation, NsaExpr dictionary) {
  NsaNode n;
  n.op = NsaOp::kNSemijoin;
  n.children = {std::move(relation), std::move(dictionary)};
  return make(std::move(n));
}

NsaExpr unnest(NsaExpr e, Scheme nested) {
  NsaNode n;
  n.op = NsaOp::kUnnest;
  n.target = std::move(nested);
  n.children = {std::move(e)};
  return make(std::move(n));
}

NsaExpr flatten(NsaExpr e) {
  NsaNode n;
  n.op = NsaOp::kFlatten;
  n.children = {std::move(e)};
  return make(std::move(n));
}

}  // namespace nsa

std::string to_string(NsaOp op) {
  switch (op) {
    case NsaOp::kInput: return "input";
    case NsaOp::kSelect: return "select";
    case NsaOp::kProject: return "project";
    case NsaOp::kRename: return "rename";
    case NsaOp::kUnion: return "union";
    case NsaOp::kDifference: return "minus";
    case NsaOp::kGroupBy: return "groupby";
    case NsaOp::kNSemijoin: return "semijoin";
    case NsaOp::kUnnest: return "unnest";
    case NsaOp::kFlatten: return "flatten";
  }
  return "?";
}

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ",";
    out += names[i];
  }
  return out;
}

std::string renaming_str(const std::map<std::string, std::string>& m) {
  std::string out;
  bool first = true;
  for (const auto& [from, to] : m) {
    if (!first) out += ",";
    out += from + "->" + to;
    first = false;
  }
  return out;
}

// Operator label without children, e.g. `groupby[y]`.
std::string label(const NsaNode& n) {
  switch (n.op) {
    case NsaOp::kInput: return n.atom.str();
    case NsaOp::kSelect: return "select[" + n.predicate.str() + "]";
    case NsaOp::kProject: return "project[" + n.target.str() + "]";
    case NsaOp::kRename: return "rename[" + renaming_str(n.renaming) + "]";
    case NsaOp::kGroupBy: return "groupby[" + join_names(n.keys) + "]";
    case NsaOp::kUnnest: return "unnest[" + n.target.str() + "]";
    default: return to_string(n.op);
  }
}

Scheme expect_relation(const SchemeOrDict& s, const std::string& rule, const NsaExpr& e) {
  if (const auto* x = std::get_if<Scheme>(&s)) return *x;
  throw TypeError(rule, to_string(e), "expected a relation, got dictionary " + to_string(s));
}

SchemeOrDict infer(const NsaExpr& e) {
  const NsaNode& n = *e;
  auto fail = [&](const std::string& rule, const std::string& detail) -> TypeError {
    return TypeError(rule, to_string(e), detail);
  };
  switch (n.op) {
    case NsaOp::kInput: {
      try {
        return Scheme::of_flat(n.atom.attrs);
      } catch (const SchemeError& err) {
        throw fail("input", err.what());
      }
    }
    case NsaOp::kSelect: {
      const Scheme& x = expect_relation(infer(n.children[0]), "select", e);
      for (const auto& a : n.predicate.attributes())
        if (!x.has_flat(a)) throw fail("select", "'" + a + "' is not a flat attribute of " + x.str());
      return x;
    }
    case NsaOp::kProject: {
      const Scheme& x = expect_relation(infer(n.children[0]), "project", e);
      for (const auto& a : n.target.flat_members())
        if (!x.has_flat(a)) throw fail("project", "'" + a + "' is not in " + x.str());
      for (const auto& z : n.target.nested_members())
        if (!x.has_nested(z)) throw fail("project", z.str() + " is not in " + x.str());
      return n.target;
    }
    case NsaOp::kRename: {
      const Scheme& x = expect_relation(infer(n.children[0]), "rename", e);
      auto all = flat_attrs(x);
      for (const auto& [from, to] : n.renaming) {
        if (!std::binary_search(all.begin(), all.end(), from))
          throw fail("rename", "'" + from + "' does not occur in " + x.str());
        if (!is_identifier(to)) throw fail("rename", "invalid target name '" + to + "'");
      }
      try {
        return rename_scheme(x, n.renaming);
      } catch (const SchemeError& err) {
        throw fail("rename", err.what());
      }
    }
    case NsaOp::kUnion:
    case NsaOp::kDifference: {
      const char* rule = n.op == NsaOp::kUnion ? "union" : "difference";
      Scheme a = expect_relation(infer(n.children[0]), rule, e);
      Scheme b = expect_relation(infer(n.children[1]), rule, e);
      if (a != b) throw fail(rule, "schemes differ: " + a.str() + " vs " + b.str());
      if (n.op == NsaOp::kDifference && !a.is_flat())
        throw fail(rule, "difference requires flat schemes, got " + a.str());
      return a;
    }
    case NsaOp::kGroupBy: {
      const Scheme& x = expect_relation(infer(n.children[0]), "groupby", e);
      std::vector<std::string> rest;
      for (const auto& k : n.keys)
        if (!x.has_flat(k)) throw fail("groupby", "key '" + k + "' is not a flat attribute of " + x.str());
      for (const auto& a : x.flat_members())
        if (!std::binary_search(n.keys.begin(), n.keys.end(), a)) rest.push_back(a);
      try {
        return DictScheme(n.keys, Scheme(rest, x.nested_members()));
      } catch (const SchemeError& err) {
        throw fail("groupby", err.what());
      }
    }
    case NsaOp::kNSemijoin: {
      const Scheme& x = expect_relation(infer(n.children[0]), "nsemijoin", e);
      SchemeOrDict ds = infer(n.children[1]);
      const auto* d = std::get_if<DictScheme>(&ds);
      if (d == nullptr) throw fail("nsemijoin", "right operand is not a dictionary");
      if (!compatible(x, *d))
        throw fail("nsemijoin", x.str() + " is not compatible with " + d->str());
      return x.with_nested(d->value);
    }
    case NsaOp::kUnnest: {
      const Scheme& x = expect_relation(infer(n.children[0]), "unnest", e);
      if (!x.has_nested(n.target))
        throw fail("unnest", n.target.str() + " is not a nested attribute of " + x.str());
      Scheme rest = x.without_nested(n.target);
      std::vector<std::string> flat = rest.flat_members();
      std::vector<Scheme> nested = rest.nested_members();
      flat.insert(flat.end(), n.target.flat_members().begin(), n.target.flat_members().end());
      nested.insert(nested.end(), n.target.nested_members().begin(),
                    n.target.nested_members().end());
      try {
        return Scheme(std::move(flat), std::move(nested));
      } catch (const SchemeError& err) {
        throw fail("unnest", err.what());
      }
    }
    case NsaOp::kFlatten: {
      const Scheme& x = expect_relation(infer(n.children[0]), "flatten", e);
      return Scheme::of_flat(flat_attrs(x));
    }
  }
  throw fail("unknown", "unknown operator");
}

void annotate_into(const NsaExpr& e, int depth, std::string& out) {
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
  out += label(*e) + " : " + to_string(infer(e)) + "\n";
  for (const auto& c : e->children) annotate_into(c, depth + 1, out);
}

}  // namespace

std::string to_string(const NsaExpr& e) {
  const NsaNode& n = *e;
  if (n.op == NsaOp::kInput) return label(n);
  std::string out = label(n) + "(";
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(n.children[i]);
  }
  return out + ")";
}

std::string to_string(const SchemeOrDict& s) {
  return std::visit([](const auto& v) { return v.str(); }, s);
}

SchemeOrDict infer_scheme(const NsaExpr& e) { return infer(e); }

Scheme infer_relation_scheme(const NsaExpr& e) {
  return expect_relation(infer(e), "relation", e);
}

std::string annotate(const NsaExpr& e) {
  std::string out;
  annotate_into(e, 0, out);
  return out;
}

}  // namespace shredjoin
