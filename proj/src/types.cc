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

#include "pdmarket/types.h"

#include <charconv>
#include <cmath>
#include <utility>

#include "pdmarket/errors.h"

namespace pdmarket {

std::string_view ToString(Scheme scheme) {
  return scheme == Scheme::kTypeA ? "A" : "B";
}

Scheme SchemeFromString(std::string_view tag) {
  if (tag == "A") return Scheme::kTypeA;
  if (tag == "B") return Scheme::kTypeB;
  throw ParseError("unknown compensation scheme tag: \"" + std::string(tag) +
                   "\" (expected \"A\" or \"B\")");
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Value Value::Categorical(std::string text) {
  Value v;
  v.is_number_ = false;
  v.text_ = std::move(text);
  return v;
}

Value Value::Number(double number) {
  Value v;
  v.is_number_ = true;
  v.number_ = number;
  return v;
}

std::string Value::ToText() const {
  return is_number_ ? FormatDouble(number_) : text_;
}

bool Value::operator==(const Value& other) const {
  if (is_number_ != other.is_number_) return false;
  return is_number_ ? number_ == other.number_ : text_ == other.text_;
}

Dataset::Dataset(std::vector<DataOwner> owners, std::string provenance,
                 double eps_cap)
    : owners_(std::move(owners)),
      provenance_(std::move(provenance)),
      eps_cap_(eps_cap) {
  if (owners_.empty()) throw SchemaError("dataset has no owners");
  if (!(eps_cap_ > 0)) throw SchemaError("eps cap must be positive");
  index_by_id_.reserve(owners_.size());
  for (const auto& [name, unused] : owners_[0].attributes) {
    attribute_names_.insert(name);
  }
  for (int64_t i = 0; i < static_cast<int64_t>(owners_.size()); ++i) {
    const DataOwner& o = owners_[i];
    if (!(o.eps_max > 0) || o.eps_max > eps_cap_ || !std::isfinite(o.eps_max)) {
      throw SchemaError("owner " + std::to_string(o.id) +
                        ": eps_max must lie in (0, " + FormatDouble(eps_cap_) +
                        "], got " + FormatDouble(o.eps_max));
    }
    if (!index_by_id_.emplace(o.id, i).second) {
      throw SchemaError("duplicate owner id: " + std::to_string(o.id));
    }
    if (o.attributes.size() != attribute_names_.size()) {
      throw SchemaError("owner " + std::to_string(o.id) +
                        ": ragged attribute row");
    }
    for (const auto& [name, unused] : o.attributes) {
      if (!attribute_names_.count(name)) {
        throw SchemaError("owner " + std::to_string(o.id) +
                          ": unexpected attribute \"" + name + "\"");
      }
    }
  }
}

const DataOwner& Dataset::owner(int64_t id) const {
  return owners_[IndexOf(id)];
}

int64_t Dataset::IndexOf(int64_t id) const {
  auto it = index_by_id_.find(id);
  if (it == index_by_id_.end()) {
    throw SchemaError("no owner with id " + std::to_string(id));
  }
  return it->second;
}

}  // namespace pdmarket
