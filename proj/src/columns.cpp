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

#include "shredjoin/columns.hpp"

#include <algorithm>

#include "shredjoin/counters.hpp"
#include "shredjoin/errors.hpp"

namespace shredjoin {

SelectionVector::SelectionVector(std::vector<std::size_t> rows) : rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i] == 0) throw OutOfRange("selection vector entry 0");
    if (i > 0 && rows_[i] <= rows_[i - 1])
      throw OutOfRange("selection vector not strictly increasing");
  }
}

SelectionVector SelectionVector::all(std::size_t len) {
  SelectionVector s;
  s.rows_.resize(len);
  for (std::size_t i = 0; i < len; ++i) s.rows_[i] = i + 1;
  return s;
}

Column::Column(std::string name, ColumnData data)
    : name_(std::move(name)), data_(std::make_shared<const ColumnData>(std::move(data))) {}

Column::Column(std::string name, std::vector<std::int64_t> data)
    : Column(std::move(name), ColumnData(std::move(data))) {}

Column::Column(std::string name, std::vector<std::string> data)
    : Column(std::move(name), ColumnData(std::move(data))) {}

std::size_t Column::size() const {
  if (!data_) return 0;
  return std::visit([](const auto& v) { return v.size(); }, *data_);
}

ValueKind Column::kind() const {
  if (!data_ || data_->index() == 0) return ValueKind::kInt;
  return ValueKind::kString;
}

Value Column::at(std::size_t pos) const {
  if (pos == 0 || pos > size())
    throw OutOfRange("position " + std::to_string(pos) + " in column " + name_ + " of length " +
                     std::to_string(size()));
  return std::visit([pos](const auto& v) { return Value(v[pos - 1]); }, *data_);
}

const std::vector<std::int64_t>& Column::ints() const {
  if (!data_ || data_->index() != 0) throw OutOfRange("column " + name_ + " is not an int column");
  return std::get<0>(*data_);
}

Column Column::renamed(std::string name) const {
  Column c = *this;
  c.name_ = std::move(name);
  return c;
}

PhysicalRelation::PhysicalRelation(std::vector<Column> columns) {
  size_ = columns.empty() ? 0 : columns.front().size();
  for (auto& c : columns) add_column(std::move(c));
}

bool PhysicalRelation::has_column(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name() == name; });
}

const Column& PhysicalRelation::column(const std::string& name) const {
  for (const auto& c : columns_)
    if (c.name() == name) return c;
  throw OutOfRange("no column named " + name);
}

void PhysicalRelation::add_column(Column column) {
  if (column.size() != size_)
    throw OutOfRange("column " + column.name() + " has length " + std::to_string(column.size()) +
                     ", relation has " + std::to_string(size_));
  if (has_column(column.name())) throw OutOfRange("duplicate column " + column.name());
  columns_.push_back(std::move(column));
}

void PhysicalRelation::remove_column(const std::string& name) {
  auto it = std::find_if(columns_.begin(), columns_.end(),
                         [&](const Column& c) { return c.name() == name; });
  if (it == columns_.end()) throw OutOfRange("no column named " + name);
  columns_.erase(it);
}

void PhysicalRelation::replace_column(Column column) {
  if (column.size() != size_) throw OutOfRange("replacement column has wrong length");
  for (auto& c : columns_) {
    if (c.name() == column.name()) {
      c = std::move(column);
      return;
    }
  }
  throw OutOfRange("no column named " + column.name());
}

KeyTuple PhysicalRelation::row(std::size_t pos, std::span<const std::string> names) const {
  KeyTuple out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(column(n).at(pos));
  return out;
}

namespace {

template <typename T>
std::vector<T> gather(const std::vector<T>& src, std::span<const std::size_t> pos,
                      const std::string& name) {
  std::vector<T> out;
  out.reserve(pos.size());
  for (std::size_t p : pos) {
    if (p == 0 || p > src.size())
      throw OutOfRange("take position " + std::to_string(p) + " in column " + name +
                       " of length " + std::to_string(src.size()));
    out.push_back(src[p - 1]);
  }
  return out;
}

}  // namespace

Column take(const Column& col, std::span<const std::size_t> pos, Counters* counters) {
  Column out = std::visit(
      [&](const auto& v) { return Column(col.name(), ColumnData(gather(v, pos, col.name()))); },
      col.data());
  if (counters != nullptr) counters->record_gen(pos.size());
  return out;
}

PhysicalRelation take_all(const PhysicalRelation& rel, std::span<const std::size_t> pos) {
  PhysicalRelation out(pos.size());
  for (const auto& c : rel.columns()) out.add_column(take(c, pos));
  return out;
}

SelectionVector allsel(const PhysicalRelation& rel) { return SelectionVector::all(rel.size()); }

}  // namespace shredjoin
