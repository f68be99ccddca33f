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

#include "pdmarket/ingest.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pdmarket/errors.h"
#include "pdmarket/rng.h"

namespace pdmarket {
namespace {

using nlohmann::json;

constexpr uint64_t kLevelTag = 0x6c6576656c000001ULL;
constexpr uint64_t kAttributeTag = 0x6174747200000001ULL;

std::string NormalizeLevel(std::string_view level) {
  std::string out;
  out.reserve(level.size());
  for (char c : level) {
    if (c == ' ' || c == '-') {
      out += '_';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

bool ParseFullDouble(std::string_view text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r') {
    cells.back().pop_back();
  }
  return cells;
}

std::vector<std::vector<std::string>> ReadTsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    rows.push_back(SplitTabs(line));
  }
  if (in.bad()) throw IoError("read failure on " + path);
  if (rows.empty()) throw SchemaError(path + " is empty");
  return rows;
}

void AtomicWrite(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failure on " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " into place: " + ec.message());
}

std::string SidecarPath(const std::string& path) {
  return path + ".meta.json";
}

void CheckCellText(const std::string& text) {
  if (text.find('\t') != std::string::npos ||
      text.find('\n') != std::string::npos ||
      text.find('\r') != std::string::npos) {
    throw SchemaError("attribute values may not contain tabs or newlines");
  }
}

}  // namespace

LevelMapping MappingForLevel(std::string_view level) {
  std::string key = NormalizeLevel(level);
  if (key == "very_high") return {0.1, Scheme::kTypeA};
  if (key == "high") return {0.3, Scheme::kTypeA};
  if (key == "low") return {0.7, Scheme::kTypeB};
  if (key == "very_low") return {0.9, Scheme::kTypeB};
  throw SchemaError("unknown privacy concern level: \"" + std::string(level) +
                    "\"");
}

void MixSpec::Validate() const {
  for (double v : {very_high, high, low, very_low}) {
    if (!(v >= 0) || !std::isfinite(v)) {
      throw SchemaError("mix proportions must be non-negative");
    }
  }
  double sum = very_high + high + low + very_low;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw SchemaError("mix proportions must sum to 1, got " +
                      FormatDouble(sum));
  }
}

AttributeModel DefaultAttributeModel() {
  return {
      {"commute",
       {"car", "bus", "train", "walk", "bike"},
       {0.3, 0.25, 0.2, 0.15, 0.1}},
      {"region", {"north", "south", "east", "west"}, {0.3, 0.3, 0.2, 0.2}},
  };
}

Dataset LoadSurvey(const std::string& path, const std::string& level_column,
                   double eps_cap) {
  auto rows = ReadTsv(path);
  const std::vector<std::string>& header = rows[0];
  auto level_it = std::find(header.begin(), header.end(), level_column);
  if (level_it == header.end()) {
    throw SchemaError(path + " has no column named \"" + level_column + "\"");
  }
  size_t level_index = static_cast<size_t>(level_it - header.begin());
  if (rows.size() < 2) throw SchemaError(path + " has no data rows");

  size_t width = header.size();
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw SchemaError(path + ": row " + std::to_string(r + 1) + " has " +
                        std::to_string(rows[r].size()) + " cells, expected " +
                        std::to_string(width));
    }
  }

  // A column is numeric when every data cell parses as a number.
  std::vector<bool> numeric(width, true);
  for (size_t col = 0; col < width; ++col) {
    for (size_t r = 1; r < rows.size() && numeric[col]; ++r) {
      double unused;
      if (!ParseFullDouble(rows[r][col], unused)) numeric[col] = false;
    }
  }

  std::vector<DataOwner> owners;
  owners.reserve(rows.size() - 1);
  for (size_t r = 1; r < rows.size(); ++r) {
    DataOwner o;
    o.id = static_cast<int64_t>(r - 1);
    LevelMapping mapping = MappingForLevel(rows[r][level_index]);
    o.eps_max = mapping.eps_max;
    o.scheme = mapping.scheme;
    for (size_t col = 0; col < width; ++col) {
      if (col == level_index) continue;
      if (numeric[col]) {
        double v;
        ParseFullDouble(rows[r][col], v);
        o.attributes.emplace(header[col], Value::Number(v));
      } else {
        o.attributes.emplace(header[col], Value::Categorical(rows[r][col]));
      }
    }
    owners.push_back(std::move(o));
  }
  return Dataset(std::move(owners), "survey:" + path, eps_cap);
}

Dataset Replicate(const Dataset& dataset, int64_t copies) {
  if (copies < 1) throw DomainError("replication count must be >= 1");
  int64_t stride = 0;
  for (const DataOwner& o : dataset.owners()) stride = std::max(stride, o.id);
  stride += 1;
  std::vector<DataOwner> owners;
  owners.reserve(static_cast<size_t>(dataset.size() * copies));
  for (int64_t copy = 0; copy < copies; ++copy) {
    for (const DataOwner& o : dataset.owners()) {
      DataOwner replica = o;
      replica.id = o.id + copy * stride;
      owners.push_back(std::move(replica));
    }
  }
  return Dataset(std::move(owners),
                 dataset.provenance() + " x" + std::to_string(copies),
                 dataset.eps_cap());
}

Dataset SynthDataset(int64_t n, const MixSpec& mix,
                     const AttributeModel& model, uint64_t seed) {
  if (n < 1) throw DomainError("synthetic population must be positive");
  mix.Validate();
  for (const CategoricalAttribute& attr : model) {
    if (attr.name.empty() || attr.categories.empty() ||
        attr.categories.size() != attr.weights.size()) {
      throw SchemaError("malformed attribute model");
    }
    double sum = 0;
    for (double w : attr.weights) {
      if (!(w >= 0)) throw SchemaError("attribute weights must be >= 0");
      sum += w;
    }
    if (!(sum > 0)) throw SchemaError("attribute weights must not all be 0");
  }

  const LevelMapping levels[] = {
      MappingForLevel("very_high"),
      MappingForLevel("high"),
      MappingForLevel("low"),
      MappingForLevel("very_low"),
  };
  const double shares[] = {mix.very_high, mix.high, mix.low, mix.very_low};

  Rng level_rng(ChainSeed({seed, kLevelTag}));
  Rng attr_rng(ChainSeed({seed, kAttributeTag}));
  std::vector<DataOwner> owners;
  owners.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    DataOwner o;
    o.id = i;
    double u = level_rng.Uniform01();
    double acc = 0;
    size_t pick = 3;
    for (size_t level = 0; level < 4; ++level) {
      acc += shares[level];
      if (u < acc) {
        pick = level;
        break;
      }
    }
    o.eps_max = levels[pick].eps_max;
    o.scheme = levels[pick].scheme;
    for (const CategoricalAttribute& attr : model) {
      double total = 0;
      for (double w : attr.weights) total += w;
      double draw = attr_rng.Uniform01() * total;
      double cum = 0;
      size_t chosen = attr.categories.size() - 1;
      for (size_t k = 0; k < attr.weights.size(); ++k) {
        cum += attr.weights[k];
        if (draw < cum) {
          chosen = k;
          break;
        }
      }
      o.attributes.emplace(attr.name,
                           Value::Categorical(attr.categories[chosen]));
    }
    owners.push_back(std::move(o));
  }
  std::ostringstream provenance;
  provenance << "synthetic(n=" << n << ",seed=" << seed << ")";
  return Dataset(std::move(owners), provenance.str());
}

void SaveDataset(const Dataset& dataset, const std::string& path) {
  const auto& names = dataset.attribute_names();

  // Column types must be homogeneous to round-trip.
  std::map<std::string, bool> numeric;
  for (const std::string& name : names) {
    bool is_number = dataset.owners()[0].attributes.at(name).is_number();
    numeric[name] = is_number;
    for (const DataOwner& o : dataset.owners()) {
      if (o.attributes.at(name).is_number() != is_number) {
        throw SchemaError("attribute \"" + name +
                          "\" mixes numeric and categorical values");
      }
    }
  }

  std::ostringstream tsv;
  tsv << "id\teps_max\tscheme";
  for (const std::string& name : names) {
    CheckCellText(name);
    tsv << '\t' << name;
  }
  tsv << '\n';
  for (const DataOwner& o : dataset.owners()) {
    tsv << o.id << '\t' << FormatDouble(o.eps_max) << '\t'
        << ToString(o.scheme);
    for (const std::string& name : names) {
      const Value& v = o.attributes.at(name);
      std::string text = v.ToText();
      CheckCellText(text);
      tsv << '\t' << text;
    }
    tsv << '\n';
  }

  json meta;
  meta["format"] = "pdmarket-dataset";
  meta["version"] = 1;
  meta["provenance"] = dataset.provenance();
  meta["eps_cap"] = dataset.eps_cap();
  meta["attributes"] = json::array();
  for (const std::string& name : names) {
    meta["attributes"].push_back(
        {{"name", name}, {"kind", numeric[name] ? "number" : "categorical"}});
  }

  AtomicWrite(path, tsv.str());
  AtomicWrite(SidecarPath(path), meta.dump(2) + "\n");
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream meta_in(SidecarPath(path));
  if (!meta_in) throw IoError("cannot open " + SidecarPath(path));
  json meta;
  try {
    meta_in >> meta;
  } catch (const json::exception& e) {
    throw ParseError("bad sidecar " + SidecarPath(path) + ": " + e.what());
  }
  if (!meta.is_object() || meta.value("format", "") != "pdmarket-dataset" ||
      meta.value("version", 0) != 1) {
    throw SchemaError(SidecarPath(path) +
                      " is not a version-1 dataset sidecar");
  }
  std::map<std::string, bool> numeric;
  for (const json& attr : meta.at("attributes")) {
    numeric[attr.at("name").get<std::string>()] =
        attr.at("kind").get<std::string>() == "number";
  }
  double eps_cap = meta.value("eps_cap", 1.0);
  std::string provenance = meta.value("provenance", "");

  auto rows = ReadTsv(path);
  const auto& header = rows[0];
  if (header.size() < 3 || header[0] != "id" || header[1] != "eps_max" ||
      header[2] != "scheme") {
    throw SchemaError(path + ": header must start with id, eps_max, scheme");
  }
  if (header.size() - 3 != numeric.size()) {
    throw SchemaError(path + ": column count disagrees with sidecar");
  }
  for (size_t col = 3; col < header.size(); ++col) {
    if (!numeric.count(header[col])) {
      throw SchemaError(path + ": column \"" + header[col] +
                        "\" missing from sidecar");
    }
  }

  std::vector<DataOwner> owners;
  owners.reserve(rows.size() - 1);
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != header.size()) {
      throw SchemaError(path + ": row " + std::to_string(r + 1) +
                        " has the wrong cell count");
    }
    DataOwner o;
    double id_value;
    if (!ParseFullDouble(cells[0], id_value) ||
        id_value != std::floor(id_value)) {
      throw ParseError(path + ": bad owner id \"" + cells[0] + "\"");
    }
    o.id = static_cast<int64_t>(id_value);
    if (!ParseFullDouble(cells[1], o.eps_max)) {
      throw ParseError(path + ": bad eps_max \"" + cells[1] + "\"");
    }
    o.scheme = SchemeFromString(cells[2]);
    for (size_t col = 3; col < header.size(); ++col) {
      if (numeric.at(header[col])) {
        double v;
        if (!ParseFullDouble(cells[col], v)) {
          throw ParseError(path + ": bad number \"" + cells[col] +
                           "\" in column " + header[col]);
        }
        o.attributes.emplace(header[col], Value::Number(v));
      } else {
        o.attributes.emplace(header[col], Value::Categorical(cells[col]));
      }
    }
    owners.push_back(std::move(o));
  }
  return Dataset(std::move(owners), provenance, eps_cap);
}

}  // namespace pdmarket
