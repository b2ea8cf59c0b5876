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

// Schema files, CSV ingestion and output, and flat-bag conversions.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "shredjoin/engine.hpp"
#include "shredjoin/errors.hpp"

namespace shredjoin {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

ValueKind parse_kind(const std::string& t, std::size_t line) {
  if (t == "int" || t == "integer" || t == "int64") return ValueKind::kInt;
  if (t == "string" || t == "str" || t == "text") return ValueKind::kString;
  throw ParseError("unknown column type '" + t + "'", line);
}

// Splits CSV text into records; quoted fields may contain commas, quotes
// ("") and line breaks. Each record remembers its starting line.
std::vector<std::pair<std::size_t, std::vector<std::string>>> csv_records(const std::string& text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  auto end_record = [&]() {
    if (any || !field.empty() || !record.empty()) {
      record.push_back(std::move(field));
      out.emplace_back(record_line, std::move(record));
    }
    record.clear();
    field.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", record_line);
  end_record();
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && !s.empty()) return s;
  if (s.empty()) return "\"\"";
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<RelationDecl> parse_schema(const std::string& text) {
  std::vector<RelationDecl> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto open = line.find('(');
    auto close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw ParseError("expected Name(col:type,...)", line_no);
    RelationDecl d;
    d.name = trim(line.substr(0, open));
    if (!is_identifier(d.name)) throw ParseError("invalid relation name '" + d.name + "'", line_no);
    std::string body = line.substr(open + 1, close - open - 1);
    std::stringstream cols(body);
    std::string col;
    while (std::getline(cols, col, ',')) {
      col = trim(col);
      if (col.empty()) throw ParseError("empty column declaration", line_no);
      auto colon = col.find(':');
      std::string name = trim(col.substr(0, colon));
      ValueKind kind = colon == std::string::npos ? ValueKind::kInt
                                                  : parse_kind(trim(col.substr(colon + 1)), line_no);
      if (!is_identifier(name)) throw ParseError("invalid column name '" + name + "'", line_no);
      for (const auto& [n, k] : d.columns)
        if (n == name) throw ParseError("duplicate column '" + name + "'", line_no);
      d.columns.emplace_back(name, kind);
    }
    if (d.columns.empty()) throw ParseError("relation " + d.name + " has no columns", line_no);
    for (const auto& other : out)
      if (other.name == d.name) throw ParseError("relation " + d.name + " declared twice", line_no);
    out.push_back(std::move(d));
  }
  return out;
}

std::string to_string(const RelationDecl& decl) {
  std::string out = decl.name + "(";
  for (std::size_t i = 0; i < decl.columns.size(); ++i) {
    if (i > 0) out += ",";
    out += decl.columns[i].first + ":" + to_string(decl.columns[i].second);
  }
  return out + ")";
}

PhysicalRelation parse_csv(const std::string& text, const RelationDecl& decl) {
  auto records = csv_records(text);
  std::size_t first = 0;
  if (!records.empty()) {
    const auto& head = records.front().second;
    bool is_header = head.size() == decl.columns.size();
    for (std::size_t j = 0; is_header && j < head.size(); ++j)
      is_header = trim(head[j]) == decl.columns[j].first;
    if (is_header) first = 1;
  }
  const std::size_t width = decl.columns.size();
  std::vector<std::vector<std::int64_t>> ints(width);
  std::vector<std::vector<std::string>> strs(width);
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& [line, fields] = records[r];
    if (fields.size() != width)
      throw ParseError(decl.name + ": expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line, std::min(fields.size(), width) + 1);
    for (std::size_t j = 0; j < width; ++j) {
      if (decl.columns[j].second == ValueKind::kString) {
        strs[j].push_back(fields[j]);
        continue;
      }
      std::string f = trim(fields[j]);
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError(decl.name + ": '" + fields[j] + "' is not an integer", line, j + 1);
      ints[j].push_back(v);
    }
  }
  PhysicalRelation rel(records.size() - first);
  for (std::size_t j = 0; j < width; ++j) {
    const auto& [name, kind] = decl.columns[j];
    if (kind == ValueKind::kInt) {
      rel.add_column(Column(name, std::move(ints[j])));
    } else {
      rel.add_column(Column(name, std::move(strs[j])));
    }
  }
  return rel;
}

PhysicalRelation load_csv(const std::string& path, const RelationDecl& decl) {
  return parse_csv(read_file(path), decl);
}

std::string format_csv(const PhysicalRelation& rel) {
  std::string out;
  for (std::size_t j = 0; j < rel.columns().size(); ++j) {
    if (j > 0) out += ",";
    out += csv_field(rel.columns()[j].name());
  }
  out += "\n";
  FlatBag bag = to_bag(rel);
  std::sort(bag.rows.begin(), bag.rows.end());
  for (const auto& row : bag.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ",";
      out += kind_of(row[j]) == ValueKind::kInt ? to_string(row[j]) : csv_field(to_string(row[j]));
    }
    out += "\n";
  }
  return out;
}

Database load_database(const std::string& schema_path, const std::string& data_dir) {
  Database db;
  for (const auto& decl : parse_schema(read_file(schema_path))) {
    auto path = std::filesystem::path(data_dir) / (decl.name + ".csv");
    try {
      db.put(decl.name, load_csv(path.string(), decl));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return db;
}

FlatBag to_bag(const PhysicalRelation& rel) {
  FlatBag bag;
  for (const auto& c : rel.columns()) bag.attrs.push_back(c.name());
  bag.rows.reserve(rel.size());
  for (std::size_t i = 1; i <= rel.size(); ++i) {
    KeyTuple row;
    row.reserve(bag.attrs.size());
    for (const auto& c : rel.columns()) row.push_back(c.at(i));
    bag.rows.push_back(std::move(row));
  }
  return bag;
}

PhysicalRelation from_bag(const FlatBag& bag) {
  PhysicalRelation rel(bag.rows.size());
  for (std::size_t j = 0; j < bag.attrs.size(); ++j) {
    bool strings = std::any_of(bag.rows.begin(), bag.rows.end(),
                               [&](const KeyTuple& r) { return kind_of(r[j]) == ValueKind::kString; });
    if (strings) {
      std::vector<std::string> v;
      for (const auto& r : bag.rows) v.push_back(to_string(r[j]));
      rel.add_column(Column(bag.attrs[j], std::move(v)));
    } else {
      std::vector<std::int64_t> v;
      for (const auto& r : bag.rows) v.push_back(std::get<std::int64_t>(r[j]));
      rel.add_column(Column(bag.attrs[j], std::move(v)));
    }
  }
  return rel;
}

}  // namespace shredjoin
