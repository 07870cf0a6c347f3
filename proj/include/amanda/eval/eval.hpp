// Copyright 2026 The Amanda Authors. All Rights Reserved.
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

#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace amanda::eval {

enum class Condition { Exact, Similar, Unseen };
enum class Measure { Naturalness, Accent, Quality };

inline constexpr std::array<Condition, 3> kConditions{Condition::Exact, Condition::Similar, Condition::Unseen};
inline constexpr std::array<Measure, 3> kMeasures{Measure::Naturalness, Measure::Accent, Measure::Quality};

std::string_view condition_name(Condition c);
std::string_view measure_name(Measure m);
Condition parse_condition(std::string_view s);  // case-insensitive
Measure parse_measure(std::string_view s);

struct MosResponse {
  std::string judge_id;
  std::string sample_id;
  Condition condition = Condition::Exact;
  Measure measure = Measure::Naturalness;
  int score = 3;
};

struct SusResponse {
  std::string participant_id;
  std::vector<int> items;
};

struct CellStats {
  std::size_t n = 0;
  double mean = 0;
  double stddev = 0;  // sample (n - 1); 0 when n == 1
  bool single = false;
};

struct MosTable {
  std::map<std::pair<Measure, Condition>, CellStats> cells;  // absent cells are missing
  std::map<Measure, double> overall;  // unweighted mean of the present condition means

  const CellStats* cell(Measure m, Condition c) const;
};

MosTable mos_aggregate(std::span<const MosResponse> responses);
double overall_from_means(std::span<const double> condition_means);

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

struct MosComparison {
  Measure measure;
  double computed = 0;
  double reported = 0;
  bool matches = false;  // equal at 2 decimal places
};

std::vector<MosComparison> compare_reported(const MosTable& table, const std::map<Measure, double>& reported);

double sus_score(const SusResponse& r);

struct SusSummary {
  std::size_t n = 0;
  double mean = 0;
  std::vector<std::pair<std::string, double>> scores;
  std::array<int, 10> histogram{};  // [0,10) ... [80,90), [90,100]
  double fraction_at_least_80 = 0;
};

SusSummary sus_summary(std::span<const SusResponse> responses);

struct RowError {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct Ingested {
  std::vector<T> rows;
  std::vector<RowError> errors;
};

Ingested<MosResponse> parse_mos_csv(std::string_view text);
Ingested<SusResponse> parse_sus_csv(std::string_view text);
Ingested<MosResponse> ingest_mos_csv(const std::filesystem::path& path);
Ingested<SusResponse> ingest_sus_csv(const std::filesystem::path& path);

std::string export_mos_csv(std::span<const MosResponse> responses);
std::string export_sus_csv(std::span<const SusResponse> responses);

std::string format_mos_report(const MosTable& table, const std::vector<MosComparison>& comparisons = {});
nlohmann::json mos_report_json(const MosTable& table, const std::vector<MosComparison>& comparisons = {});
std::string format_sus_report(const SusSummary& summary);
nlohmann::json sus_report_json(const SusSummary& summary);

// "naturalness=4.07,accent=3.98" -> map
std::map<Measure, double> parse_reported(std::string_view spec);

}  // namespace amanda::eval
