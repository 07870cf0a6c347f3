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

#include "amanda/eval/eval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "amanda/error.hpp"

namespace amanda::eval {
namespace {

constexpr std::string_view kMosHeader = "judge_id,sample_id,condition,measure,score";
constexpr std::string_view kSusHeader = "participant_id,q1,q2,q3,q4,q5,q6,q7,q8,q9,q10";

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(" \t\r") - b + 1));
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

int parse_score(const std::string& s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError(what + " '" + s + "' is not an integer");
  if (v < 1 || v > 5) throw ValidationError(what + " " + s + " outside 1..5");
  return v;
}

// Calls row(fields, line) for each data line; collects errors with 1-based line numbers.
template <typename T, typename F>
Ingested<T> parse_csv(std::string_view text, std::string_view header, std::size_t columns, F row) {
  Ingested<T> out;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::size_t line_no = 0, pos = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!saw_header) {
      if (line != header) {
        out.errors.push_back({line_no, "expected header '" + std::string(header) + "'"});
        return out;
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != columns) {
      out.errors.push_back({line_no, "expected " + std::to_string(columns) + " fields, got " +
                                         std::to_string(fields.size())});
      continue;
    }
    try {
      out.rows.push_back(row(fields));
    } catch (const Error& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  if (!saw_header) out.errors.push_back({1, "empty file"});
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::Exact: return "Exact";
    case Condition::Similar: return "Similar";
    case Condition::Unseen: return "Unseen";
  }
  return "";
}

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::Naturalness: return "Naturalness";
    case Measure::Accent: return "Accent";
    case Measure::Quality: return "Quality";
  }
  return "";
}

Condition parse_condition(std::string_view s) {
  for (Condition c : kConditions)
    if (lower(condition_name(c)) == lower(s)) return c;
  throw ValidationError("unknown condition '" + std::string(s) + "'");
}

Measure parse_measure(std::string_view s) {
  for (Measure m : kMeasures)
    if (lower(measure_name(m)) == lower(s)) return m;
  throw ValidationError("unknown measure '" + std::string(s) + "'");
}

const CellStats* MosTable::cell(Measure m, Condition c) const {
  auto it = cells.find({m, c});
  return it == cells.end() ? nullptr : &it->second;
}

MosTable mos_aggregate(std::span<const MosResponse> responses) {
  // Integer sums keep every output independent of response order.
  std::map<std::pair<Measure, Condition>, std::array<std::int64_t, 3>> acc;  // n, sum, sum of squares
  for (const auto& r : responses) {
    if (r.score < 1 || r.score > 5)
      throw ValidationError("judge " + r.judge_id + " sample " + r.sample_id + ": score outside 1..5");
    auto& a = acc[{r.measure, r.condition}];
    a[0] += 1;
    a[1] += r.score;
    a[2] += std::int64_t{r.score} * r.score;
  }
  MosTable t;
  for (const auto& [key, a] : acc) {
    CellStats s;
    s.n = static_cast<std::size_t>(a[0]);
    s.mean = static_cast<double>(a[1]) / static_cast<double>(a[0]);
    s.single = a[0] == 1;
    if (!s.single)
      s.stddev = std::sqrt(static_cast<double>(a[0] * a[2] - a[1] * a[1]) / static_cast<double>(a[0] * (a[0] - 1)));
    t.cells[key] = s;
  }
  for (Measure m : kMeasures) {
    std::vector<double> means;
    for (Condition c : kConditions)
      if (const auto* s = t.cell(m, c)) means.push_back(s->mean);
    if (!means.empty()) t.overall[m] = overall_from_means(means);
  }
  return t;
}

double overall_from_means(std::span<const double> condition_means) {
  if (condition_means.empty()) throw ValidationError("overall of no condition means");
  double sum = 0;
  for (double v : condition_means) sum += v;
  return sum / static_cast<double>(condition_means.size());
}

std::vector<MosComparison> compare_reported(const MosTable& table, const std::map<Measure, double>& reported) {
  std::vector<MosComparison> out;
  for (const auto& [m, value] : reported) {
    auto it = table.overall.find(m);
    if (it == table.overall.end()) continue;
    out.push_back({m, it->second, value, std::abs(round2(it->second) - round2(value)) < 1e-9});
  }
  return out;
}

double sus_score(const SusResponse& r) {
  if (r.items.size() != 10)
    throw ValidationError("participant " + r.participant_id + ": expected 10 items, got " +
                          std::to_string(r.items.size()));
  int total = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const int v = r.items[i];
    if (v < 1 || v > 5)
      throw ValidationError("participant " + r.participant_id + ": item q" + std::to_string(i + 1) + " = " +
                            std::to_string(v) + " outside 1..5");
    total += i % 2 == 0 ? v - 1 : 5 - v;  // q1, q3, ... are positively worded
  }
  return 2.5 * total;
}

SusSummary sus_summary(std::span<const SusResponse> responses) {
  SusSummary s;
  s.n = responses.size();
  if (responses.empty()) return s;
  double total = 0;  // multiples of 2.5 sum exactly
  std::size_t high = 0;
  for (const auto& r : responses) {
    const double score = sus_score(r);
    s.scores.emplace_back(r.participant_id, score);
    total += score;
    s.histogram[std::min<std::size_t>(9, static_cast<std::size_t>(score / 10.0))] += 1;
    high += score >= 80.0;
  }
  s.mean = total / static_cast<double>(s.n);
  s.fraction_at_least_80 = static_cast<double>(high) / static_cast<double>(s.n);
  return s;
}

Ingested<MosResponse> parse_mos_csv(std::string_view text) {
  return parse_csv<MosResponse>(text, kMosHeader, 5, [](const std::vector<std::string>& f) {
    if (f[0].empty() || f[1].empty()) throw ValidationError("judge_id and sample_id must be non-empty");
    return MosResponse{f[0], f[1], parse_condition(f[2]), parse_measure(f[3]), parse_score(f[4], "score")};
  });
}

Ingested<SusResponse> parse_sus_csv(std::string_view text) {
  return parse_csv<SusResponse>(text, kSusHeader, 11, [](const std::vector<std::string>& f) {
    if (f[0].empty()) throw ValidationError("participant_id must be non-empty");
    SusResponse r{f[0], {}};
    for (std::size_t i = 1; i < 11; ++i)
      r.items.push_back(parse_score(f[i], "participant " + f[0] + " q" + std::to_string(i)));
    return r;
  });
}

Ingested<MosResponse> ingest_mos_csv(const std::filesystem::path& path) { return parse_mos_csv(read_file(path)); }
Ingested<SusResponse> ingest_sus_csv(const std::filesystem::path& path) { return parse_sus_csv(read_file(path)); }

std::string export_mos_csv(std::span<const MosResponse> responses) {
  std::string out(kMosHeader);
  out += '\n';
  for (const auto& r : responses)
    out += r.judge_id + ',' + r.sample_id + ',' + std::string(condition_name(r.condition)) + ',' +
           std::string(measure_name(r.measure)) + ',' + std::to_string(r.score) + '\n';
  return out;
}

std::string export_sus_csv(std::span<const SusResponse> responses) {
  std::string out(kSusHeader);
  out += '\n';
  for (const auto& r : responses) {
    out += r.participant_id;
    for (int v : r.items) out += ',' + std::to_string(v);
    out += '\n';
  }
  return out;
}

std::string format_mos_report(const MosTable& table, const std::vector<MosComparison>& comparisons) {
  std::ostringstream os;
  os << std::left << std::setw(13) << "Measure";
  for (Condition c : kConditions) os << std::setw(18) << condition_name(c);
  os << "Overall\n";
  for (Measure m : kMeasures) {
    os << std::setw(13) << measure_name(m);
    for (Condition c : kConditions) {
      const auto* s = table.cell(m, c);
      std::string text = !s ? "absent" : fixed(s->mean) + " +- " + fixed(s->stddev) + (s->single ? " (n=1)" : "");
      os << std::setw(18) << text;
    }
    auto it = table.overall.find(m);
    os << (it == table.overall.end() ? "absent" : fixed(it->second)) << '\n';
  }
  for (const auto& c : comparisons) {
    os << measure_name(c.measure) << ": computed " << fixed(c.computed) << ", reported " << fixed(c.reported);
    os << (c.matches ? " (matches)" : " MISMATCH: reported value does not follow from the cell means") << '\n';
  }
  return os.str();
}

nlohmann::json mos_report_json(const MosTable& table, const std::vector<MosComparison>& comparisons) {
  nlohmann::json j;
  j["cells"] = nlohmann::json::array();
  for (const auto& [key, s] : table.cells)
    j["cells"].push_back({{"measure", measure_name(key.first)},
                          {"condition", condition_name(key.second)},
                          {"n", s.n},
                          {"mean", s.mean},
                          {"std", s.stddev},
                          {"single", s.single}});
  j["overall"] = nlohmann::json::object();
  for (const auto& [m, v] : table.overall) j["overall"][std::string(measure_name(m))] = v;
  j["comparisons"] = nlohmann::json::array();
  for (const auto& c : comparisons)
    j["comparisons"].push_back({{"measure", measure_name(c.measure)},
                                {"computed", c.computed},
                                {"reported", c.reported},
                                {"matches", c.matches}});
  return j;
}

std::string format_sus_report(const SusSummary& s) {
  std::ostringstream os;
  os << "participants " << s.n << "\nmean " << fixed(s.mean) << "\nscore >= 80: " << fixed(100.0 * s.fraction_at_least_80, 1)
     << "%\n";
  for (std::size_t b = 0; b < 10; ++b) {
    const std::string label = "[" + std::to_string(10 * b) + "," + std::to_string(10 * b + 10) + (b == 9 ? "]" : ")");
    os << std::left << std::setw(10) << label << std::string(static_cast<std::size_t>(s.histogram[b]), '#') << ' '
       << s.histogram[b] << '\n';
  }
  return os.str();
}

nlohmann::json sus_report_json(const SusSummary& s) {
  nlohmann::json j{{"n", s.n}, {"mean", s.mean}, {"fraction_at_least_80", s.fraction_at_least_80},
                   {"histogram", s.histogram}};
  j["scores"] = nlohmann::json::array();
  for (const auto& [id, score] : s.scores) j["scores"].push_back({{"participant_id", id}, {"score", score}});
  return j;
}

std::map<Measure, double> parse_reported(std::string_view spec) {
  std::map<Measure, double> out;
  for (const auto& item : split(spec)) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("expected measure=value, got '" + item + "'");
    const std::string value = trim(item.substr(eq + 1));
    double v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw ValidationError("bad reported value '" + value + "'");
    out[parse_measure(trim(item.substr(0, eq)))] = v;
  }
  return out;
}

}  // namespace amanda::eval
