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

#ifndef PDMARKET_TYPES_H_
#define PDMARKET_TYPES_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pdmarket {

// Currency amounts are plain doubles; settlement identities are checked
// against this tolerance rather than exactly.
using Money = double;
inline constexpr double kMoneyTolerance = 1e-9;

// Compensation curve an owner signed up for. Type A rises steeply for
// small privacy losses (conservative owners), Type B pays little until the
// loss is substantial (liberal owners).
enum class Scheme { kTypeA, kTypeB };

// Wire tags are "A" and "B".
std::string_view ToString(Scheme scheme);
Scheme SchemeFromString(std::string_view tag);  // ParseError on anything else

// Attribute value: a categorical token or a number. Numbers render with
// shortest round-trip formatting so files reload bit-exactly.
class Value {
 public:
  static Value Categorical(std::string text);
  static Value Number(double number);

  bool is_number() const { return is_number_; }
  double number() const { return number_; }
  const std::string& text() const { return text_; }

  // Canonical rendering: the token itself, or the shortest decimal string
  // that parses back to the identical double.
  std::string ToText() const;

  bool operator==(const Value& other) const;
  bool operator!=(const Value& other) const { return !(*this == other); }

 private:
  Value() = default;

  bool is_number_ = false;
  double number_ = 0;
  std::string text_;
};

// Shortest round-trip rendering of a double.
std::string FormatDouble(double v);

struct DataOwner {
  int64_t id = 0;
  std::map<std::string, Value> attributes;
  double eps_max = 0;  // privacy tolerance, > 0
  Scheme scheme = Scheme::kTypeA;
};

// Immutable collection of owners with unique ids and a rectangular
// attribute schema.
class Dataset {
 public:
  // Validates: non-empty, unique ids, eps_max in (0, eps_cap], every owner
  // carries exactly the same attribute names. Throws SchemaError.
  Dataset(std::vector<DataOwner> owners, std::string provenance,
          double eps_cap = 1.0);

  const std::vector<DataOwner>& owners() const { return owners_; }
  int64_t size() const { return static_cast<int64_t>(owners_.size()); }

  const DataOwner& owner(int64_t id) const;  // SchemaError if absent
  int64_t IndexOf(int64_t id) const;         // SchemaError if absent

  const std::set<std::string>& attribute_names() const {
    return attribute_names_;
  }
  bool HasAttribute(const std::string& name) const {
    return attribute_names_.count(name) > 0;
  }

  const std::string& provenance() const { return provenance_; }
  double eps_cap() const { return eps_cap_; }

 private:
  std::vector<DataOwner> owners_;
  std::unordered_map<int64_t, int64_t> index_by_id_;
  std::set<std::string> attribute_names_;
  std::string provenance_;
  double eps_cap_;
};

}  // namespace pdmarket

#endif  // PDMARKET_TYPES_H_
