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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "shredjoin/value.hpp"

namespace shredjoin {

class Counters;

/// 1-based row positions. Entries may repeat and need not be ordered.
using PositionVector = std::vector<std::size_t>;

/// Strictly increasing 1-based row positions of a physical relation.
class SelectionVector {
 public:
  SelectionVector() = default;
  /// Throws OutOfRange unless `rows` is strictly increasing and non-zero.
  explicit SelectionVector(std::vector<std::size_t> rows);

  static SelectionVector all(std::size_t len);

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::size_t operator[](std::size_t i) const { return rows_[i]; }
  auto begin() const { return rows_.begin(); }
  auto end() const { return rows_.end(); }
  const std::vector<std::size_t>& rows() const { return rows_; }
  /// True iff this equals allsel for a relation of length `len`.
  bool is_all(std::size_t len) const { return rows_.size() == len; }

  friend bool operator==(const SelectionVector&, const SelectionVector&) = default;

 private:
  std::vector<std::size_t> rows_;
};

using ColumnData = std::variant<std::vector<std::int64_t>, std::vector<std::string>>;

/// An immutable, homogeneous, named column. Storage is shared between copies,
/// so aliasing a column into another relation is free.
class Column {
 public:
  Column() = default;
  Column(std::string name, ColumnData data);
  Column(std::string name, std::vector<std::int64_t> data);
  Column(std::string name, std::vector<std::string> data);

  const std::string& name() const { return name_; }
  std::size_t size() const;
  ValueKind kind() const;
  /// Value at 1-based position `pos`.
  Value at(std::size_t pos) const;
  const ColumnData& data() const { return *data_; }
  /// Raw integer storage (0-based); throws if the column holds strings.
  const std::vector<std::int64_t>& ints() const;

  Column renamed(std::string name) const;

 private:
  std::string name_;
  std::shared_ptr<const ColumnData> data_ = std::make_shared<const ColumnData>();
};

/// Named columns of identical length. Rows are addressed 1..size().
class PhysicalRelation {
 public:
  PhysicalRelation() = default;
  explicit PhysicalRelation(std::size_t size) : size_(size) {}
  explicit PhysicalRelation(std::vector<Column> columns);

  std::size_t size() const { return size_; }
  const std::vector<Column>& columns() const { return columns_; }

  bool has_column(const std::string& name) const;
  const Column& column(const std::string& name) const;
  /// Appends a column; its length must equal size() and its name must be new.
  void add_column(Column column);
  void remove_column(const std::string& name);
  void replace_column(Column column);

  /// Tuple of the named attributes at 1-based row `pos`.
  KeyTuple row(std::size_t pos, std::span<const std::string> names) const;

 private:
  std::size_t size_ = 0;
  std::vector<Column> columns_;
};

/// New column c with c[i] = col[pos[i]]. Records one gen event of
/// length pos.size() on `counters` when given.
Column take(const Column& col, std::span<const std::size_t> pos, Counters* counters = nullptr);

/// Applies take to every column of `rel`, uninstrumented.
PhysicalRelation take_all(const PhysicalRelation& rel, std::span<const std::size_t> pos);

SelectionVector allsel(const PhysicalRelation& rel);

}  // namespace shredjoin
