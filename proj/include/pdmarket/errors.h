//
// Copyright 2026 The pdmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PDMARKET_ERRORS_H_
#define PDMARKET_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pdmarket {

// Error categories. Each maps to a distinct CLI process exit code.
enum class ErrorCode {
  kParse = 2,       // malformed query/flag/file syntax
  kSchema = 3,      // well-formed input that violates the data contract
  kBudget = 4,      // offered budget cannot cover the mandatory charges
  kArbitrage = 5,   // repeated (buyer, query) purchase attempt
  kInfeasible = 6,  // request has no valid outcome (e.g. empty dataset)
  kIo = 7,          // filesystem or stream failure
  kDomain = 8,      // argument outside a function's mathematical domain
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error(ErrorCode::kParse, m) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& m) : Error(ErrorCode::kSchema, m) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& m) : Error(ErrorCode::kBudget, m) {}
};

class ArbitrageError : public Error {
 public:
  explicit ArbitrageError(const std::string& m)
      : Error(ErrorCode::kArbitrage, m) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& m)
      : Error(ErrorCode::kInfeasible, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorCode::kDomain, m) {}
};

}  // namespace pdmarket

#endif  // PDMARKET_ERRORS_H_
