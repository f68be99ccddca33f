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

#ifndef PDMARKET_INGEST_H_
#define PDMARKET_INGEST_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pdmarket/types.h"

namespace pdmarket {

// Stated privacy-concern level of a survey respondent, mapped to the
// privacy tolerance and compensation scheme they are modeled with. High
// concern means a low tolerance and the conservative curve.
struct LevelMapping {
  double eps_max = 0;
  Scheme scheme = Scheme::kTypeA;
};

// Accepts "very_high", "high", "low", "very_low" (case-insensitive;
// spaces and hyphens count as underscores). Throws SchemaError otherwise.
LevelMapping MappingForLevel(std::string_view level);

// Population proportions per concern level. Must be non-negative and sum
// to 1 within 1e-9.
struct MixSpec {
  double very_high = 0.25;
  double high = 0.25;
  double low = 0.25;
  double very_low = 0.25;

  void Validate() const;
};

// Categorical attribute generator for synthetic owners.
struct CategoricalAttribute {
  std::string name;
  std::vector<std::string> categories;
  std::vector<double> weights;  // same length, non-negative, positive sum
};
using AttributeModel = std::vector<CategoricalAttribute>;

AttributeModel DefaultAttributeModel();

// Reads a TSV survey export: a header row, one row per respondent. The
// `level_column` holds the concern level; every other column becomes an
// attribute (numeric when every value in the column parses as a number).
// Owner ids are assigned by row order starting at 0.
Dataset LoadSurvey(const std::string& path, const std::string& level_column,
                   double eps_cap = 1.0);

// Concatenates `copies` shifted copies of the dataset (ids offset by a
// fixed stride per copy). copies >= 1.
Dataset Replicate(const Dataset& dataset, int64_t copies);

// Synthetic population of n owners: concern level drawn from the mix,
// attributes drawn from the model, deterministic in the seed.
Dataset SynthDataset(int64_t n, const MixSpec& mix,
                     const AttributeModel& model, uint64_t seed);

// Dataset persistence: TSV of owners plus a JSON sidecar (same path with
// ".meta.json" appended) carrying provenance, the eps cap, and column
// types. Save writes both atomically; Load requires the sidecar. Numbers
// render in shortest round-trip form, so save/load is bit-exact.
void SaveDataset(const Dataset& dataset, const std::string& path);
Dataset LoadDataset(const std::string& path);

}  // namespace pdmarket

#endif  // PDMARKET_INGEST_H_
