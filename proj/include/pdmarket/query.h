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

#ifndef PDMARKET_QUERY_H_
#define PDMARKET_QUERY_H_

#include <string>
#include <string_view>
#include <vector>

#include "pdmarket/types.h"

namespace pdmarket {

// Counting queries are conjunctions of per-attribute clauses:
//
//   commute=car AND age!=30 AND region in {north, south}
//
// Clause separators: AND (any case) or &&. Operators: = (alias ==),
// !=, in. Values are bare tokens or double-quoted strings. The canonical
// form sorts clauses, deduplicates repeated clauses, and sorts/dedups
// in-lists, so semantically identical predicates share one key.
enum class ClauseOp { kEq, kNe, kIn };

struct Clause {
  std::string attribute;
  ClauseOp op = ClauseOp::kEq;
  std::vector<std::string> values;  // 1 entry for kEq/kNe; sorted set for kIn

  bool operator==(const Clause&) const = default;
};

class CountQuery {
 public:
  // Throws ParseError on grammar violations (empty query, bad operator,
  // unterminated quote, empty in-list, ...).
  static CountQuery Parse(std::string_view text);

  static CountQuery FromClauses(std::vector<Clause> clauses);

  const std::vector<Clause>& clauses() const { return clauses_; }

  // Canonical text: sorted clauses joined by " AND ", normalized spacing,
  // values quoted only when they contain delimiter characters.
  std::string canonical_text() const;

 private:
  CountQuery() = default;
  std::vector<Clause> clauses_;  // canonicalized
};

// Ledger key for arbitrage checks. Clause order, duplicate clauses,
// in-list order, and whitespace never change the key.
using QueryKey = std::string;
QueryKey CanonicalQueryKey(const CountQuery& query);

// True when the owner satisfies every clause. Owners missing the clause
// attribute match nothing (eq, ne, and in are all false for them).
bool Matches(const CountQuery& query, const DataOwner& owner);

// Exact count over the whole dataset. Throws SchemaError when a clause
// names an attribute the dataset does not carry.
double EvaluateQuery(const CountQuery& query, const Dataset& dataset);

// Validates clause attributes against the dataset schema.
void CheckQuerySchema(const CountQuery& query, const Dataset& dataset);

}  // namespace pdmarket

#endif  // PDMARKET_QUERY_H_
