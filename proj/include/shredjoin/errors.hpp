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
#include <stdexcept>
#include <string>

namespace shredjoin {

// Base class for every error raised by the library. `user_error()` separates
// bad input (exit code 1 in the CLI) from broken internal invariants (2).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, bool user_error = true)
      : std::runtime_error(what), user_error_(user_error) {}
  bool user_error() const { return user_error_; }

 private:
  bool user_error_;
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& what) : Error("OutOfRange: " + what, false) {}
};

class SchemeError : public Error {
 public:
  explicit SchemeError(const std::string& what) : Error("SchemeError: " + what) {}
};

// Raised when an NSA expression or operator call violates a typing rule.
class TypeError : public Error {
 public:
  TypeError(std::string rule, std::string subexpr, const std::string& detail)
      : Error("TypeError [" + rule + "] in " + subexpr + ": " + detail),
        rule_(std::move(rule)),
        subexpr_(std::move(subexpr)) {}
  const std::string& rule() const { return rule_; }
  const std::string& subexpr() const { return subexpr_; }

 private:
  std::string rule_;
  std::string subexpr_;
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what)
      : Error("StructuralError: " + what, false) {}
};

class StoreClashError : public Error {
 public:
  explicit StoreClashError(const std::string& what)
      : Error("StoreClashError: " + what, false) {}
};

class NameClash : public Error {
 public:
  explicit NameClash(const std::string& what) : Error("NameClash: " + what) {}
};

class NotWellBehaved : public Error {
 public:
  explicit NotWellBehaved(const std::string& what) : Error("NotWellBehaved: " + what) {}
};

class AssumptionViolated : public Error {
 public:
  explicit AssumptionViolated(const std::string& what)
      : Error("AssumptionViolated: " + what) {}
};

class AcyclicityError : public Error {
 public:
  explicit AcyclicityError(const std::string& what) : Error("AcyclicityError: " + what) {}
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& what) : Error("CapExceeded: " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(format(what, row, column)), row_(row), column_(column) {}
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t row, std::size_t column) {
    std::string out = "ParseError: " + what;
    if (row != 0) {
      out += " (row " + std::to_string(row);
      if (column != 0) out += ", column " + std::to_string(column);
      out += ")";
    }
    return out;
  }
  std::size_t row_;
  std::size_t column_;
};

}  // namespace shredjoin
