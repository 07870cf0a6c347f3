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

#include <algorithm>
#include <filesystem>
#include <random>

#include "amanda/error.hpp"
#include "amanda/eval/eval.hpp"
#include "gtest/gtest.h"

namespace amanda::eval {
namespace {

const std::filesystem::path kRoot = AMANDA_SOURCE_DIR;

const std::map<Measure, double> kReported{
    {Measure::Naturalness, 4.07}, {Measure::Accent, 3.98}, {Measure::Quality, 3.88}};

TEST(Mos, ReportedCellMeansGiveOverall) {
  const double nat[] = {4.45, 4.3, 3.45};
  const double qual[] = {4.3, 4.15, 3.2};
  const double acc[] = {4.05, 3.9, 3.65};
  EXPECT_DOUBLE_EQ(round2(overall_from_means(nat)), 4.07);
  EXPECT_DOUBLE_EQ(round2(overall_from_means(qual)), 3.88);
  EXPECT_DOUBLE_EQ(round2(overall_from_means(acc)), 3.87);
}

TEST(Mos, Table3FixtureFlagsAccent) {
  auto in = ingest_mos_csv(kRoot / "tests/fixtures/mos_table3.csv");
  ASSERT_TRUE(in.errors.empty());
  ASSERT_EQ(in.rows.size(), 180u);
  auto t = mos_aggregate(in.rows);
  EXPECT_NEAR(t.cell(Measure::Naturalness, Condition::Exact)->mean, 4.45, 1e-12);
  EXPECT_NEAR(t.cell(Measure::Accent, Condition::Unseen)->mean, 3.65, 1e-12);
  EXPECT_NEAR(t.cell(Measure::Quality, Condition::Unseen)->mean, 3.2, 1e-12);
  auto cmp = compare_reported(t, kReported);
  ASSERT_EQ(cmp.size(), 3u);
  for (const auto& c : cmp) {
    switch (c.measure) {
      case Measure::Naturalness:
        EXPECT_DOUBLE_EQ(round2(c.computed), 4.07);
        EXPECT_TRUE(c.matches);
        break;
      case Measure::Quality:
        EXPECT_DOUBLE_EQ(round2(c.computed), 3.88);
        EXPECT_TRUE(c.matches);
        break;
      case Measure::Accent:
        EXPECT_DOUBLE_EQ(round2(c.computed), 3.87);
        EXPECT_FALSE(c.matches);
        break;
    }
  }
  const auto text = format_mos_report(t, cmp);
  EXPECT_NE(text.find("Accent: computed 3.87, reported 3.98 MISMATCH"), std::string::npos) << text;
  EXPECT_EQ(mos_report_json(t, cmp)["comparisons"].size(), 3u);
}

TEST(Mos, SingleResponseCell) {
  std::vector<MosResponse> r{{"j", "s", Condition::Similar, Measure::Quality, 5}};
  auto t = mos_aggregate(r);
  const auto* s = t.cell(Measure::Quality, Condition::Similar);
  ASSERT_NE(s, nullptr);
  EXPECT_EQ(s->mean, 5.0);
  EXPECT_EQ(s->stddev, 0.0);
  EXPECT_TRUE(s->single);
  EXPECT_EQ(t.cell(Measure::Quality, Condition::Exact), nullptr);
  EXPECT_EQ(t.overall.count(Measure::Accent), 0u);
  EXPECT_NE(format_mos_report(t).find("absent"), std::string::npos);
}

TEST(Mos, SampleStd) {
  std::vector<MosResponse> r;
  for (int v : {2, 4, 4, 4, 5, 5, 5, 1}) r.push_back({"j", "s", Condition::Exact, Measure::Accent, v});
  // mean 3.75; squared deviations 3.0625 + 3 * 0.0625 + 3 * 1.5625 + 7.5625 = 15.5
  auto s = *mos_aggregate(r).cell(Measure::Accent, Condition::Exact);
  EXPECT_DOUBLE_EQ(s.mean, 3.75);
  EXPECT_NEAR(s.stddev, std::sqrt(15.5 / 7.0), 1e-15);
}

std::vector<MosResponse> random_mos(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(1, 120), score(1, 5), pick(0, 2);
  std::vector<MosResponse> out;
  const int count = n(rng);
  for (int i = 0; i < count; ++i)
    out.push_back({"j" + std::to_string(i), "s", kConditions[pick(rng)], kMeasures[pick(rng)], score(rng)});
  return out;
}

TEST(Mos, MatchesBruteForceOracleAndIsOrderFree) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto r = random_mos(rng);
    auto t = mos_aggregate(r);
    for (Measure m : kMeasures) {
      std::vector<long double> means;
      for (Condition c : kConditions) {
        std::vector<int> xs;
        for (const auto& x : r)
          if (x.measure == m && x.condition == c) xs.push_back(x.score);
        const auto* s = t.cell(m, c);
        if (xs.empty()) {
          EXPECT_EQ(s, nullptr);
          continue;
        }
        ASSERT_NE(s, nullptr);
        long double mean = 0;
        for (int x : xs) mean += x;
        mean /= xs.size();
        long double ss = 0;
        for (int x : xs) ss += (x - mean) * (x - mean);
        const long double sd = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1)) : 0.0L;
        EXPECT_EQ(s->n, xs.size());
        EXPECT_NEAR(s->mean, static_cast<double>(mean), 1e-12);
        EXPECT_NEAR(s->stddev, static_cast<double>(sd), 1e-12);
        EXPECT_GE(s->mean, 1.0);
        EXPECT_LE(s->mean, 5.0);
        means.push_back(mean);
      }
      if (!means.empty()) {
        long double o = 0;
        for (auto v : means) o += v;
        EXPECT_NEAR(t.overall.at(m), static_cast<double>(o / means.size()), 1e-12);
      }
    }
    auto shuffled = r;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto u = mos_aggregate(shuffled);
    for (const auto& [key, s] : t.cells) {
      EXPECT_EQ(u.cells.at(key).mean, s.mean);
      EXPECT_EQ(u.cells.at(key).stddev, s.stddev);
    }
    EXPECT_EQ(u.overall, t.overall);
  }
}

TEST(Sus, KnownScores) {
  EXPECT_EQ(sus_score({"a", std::vector<int>(10, 3)}), 50.0);
  EXPECT_EQ(sus_score({"b", {5, 1, 5, 1, 5, 1, 5, 1, 5, 1}}), 100.0);
  EXPECT_EQ(sus_score({"c", {1, 5, 1, 5, 1, 5, 1, 5, 1, 5}}), 0.0);
  EXPECT_EQ(sus_score({"d", {4, 2, 4, 2, 4, 2, 4, 2, 4, 2}}), 75.0);
}

TEST(Sus, ValidationNamesParticipant) {
  try {
    sus_score({"p7", {3, 3, 3}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("p7"), std::string::npos);
  }
  try {
    sus_score({"p8", {3, 3, 3, 3, 3, 6, 3, 3, 3, 3}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("p8"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("q6"), std::string::npos);
  }
}

TEST(Sus, Monotone) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    SusResponse r{"p", {}};
    for (int i = 0; i < 10; ++i) r.items.push_back(d(rng));
    const double base = sus_score(r);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 100.0);
    for (std::size_t i = 0; i < 10; ++i) {
      if (r.items[i] == 5) continue;
      auto up = r;
      up.items[i] += 1;
      if (i % 2 == 0)
        EXPECT_GE(sus_score(up), base);
      else
        EXPECT_LE(sus_score(up), base);
    }
  }
}

TEST(Sus, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(1, 5), n(1, 40);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SusResponse> rs;
    const int count = n(rng);
    for (int p = 0; p < count; ++p) {
      SusResponse r{"p" + std::to_string(p), {}};
      for (int i = 0; i < 10; ++i) r.items.push_back(d(rng));
      rs.push_back(r);
    }
    // oracle: Brooke's rule written out per item, integers until the end
    int grand = 0, high = 0;
    std::array<int, 10> hist{};
    for (const auto& r : rs) {
      int odd = 0, even = 0;
      for (int q = 1; q <= 10; ++q) (q % 2 ? odd : even) += q % 2 ? r.items[q - 1] - 1 : 5 - r.items[q - 1];
      const int quarter_points = 10 * (odd + even);  // score * 4
      grand += quarter_points;
      high += quarter_points >= 320;
      int bin = quarter_points / 40;
      hist[std::min(bin, 9)] += 1;
    }
    auto s = sus_summary(rs);
    EXPECT_EQ(s.mean, grand / 4.0 / count);
    EXPECT_EQ(s.fraction_at_least_80, static_cast<double>(high) / count);
    EXPECT_EQ(s.histogram, hist);
    EXPECT_EQ(s.n, rs.size());
  }
}

TEST(Sus, SummaryReportsFractionAbove80) {
  std::vector<SusResponse> rs;
  for (int i = 0; i < 7; ++i) rs.push_back({"hi" + std::to_string(i), {5, 1, 5, 1, 5, 1, 5, 1, 4, 2}});  // 95
  for (int i = 0; i < 3; ++i) rs.push_back({"lo" + std::to_string(i), std::vector<int>(10, 3)});
  auto s = sus_summary(rs);
  EXPECT_DOUBLE_EQ(s.fraction_at_least_80, 0.7);
  EXPECT_EQ(s.histogram[9], 7);
  EXPECT_EQ(s.histogram[5], 3);
  EXPECT_NE(format_sus_report(s).find("score >= 80: 70.0%"), std::string::npos);
  EXPECT_DOUBLE_EQ(sus_report_json(s)["fraction_at_least_80"].get<double>(), 0.7);
}

TEST(Csv, SusFixture) {
  auto in = ingest_sus_csv(kRoot / "tests/fixtures/sus_all3.csv");
  ASSERT_TRUE(in.errors.empty());
  EXPECT_EQ(in.rows.size(), 5u);
  EXPECT_EQ(sus_summary(in.rows).mean, 50.0);
}

TEST(Csv, RowErrorsCarryLineNumbers) {
  auto in = parse_mos_csv(
      "judge_id,sample_id,condition,measure,score\n"
      "a,s1,Exact,Naturalness,4\n"
      "a,s2,Exact,Naturalness,6\n"
      "a,s3,Sideways,Quality,3\n"
      "a,s4,Unseen,Quality\n"
      "a,s5,unseen,quality,2\n");
  EXPECT_EQ(in.rows.size(), 2u);
  ASSERT_EQ(in.errors.size(), 3u);
  EXPECT_EQ(in.errors[0].line, 3u);
  EXPECT_EQ(in.errors[1].line, 4u);
  EXPECT_EQ(in.errors[2].line, 5u);
  auto bad = parse_sus_csv("id,q1\n");
  ASSERT_EQ(bad.errors.size(), 1u);
  EXPECT_EQ(bad.errors[0].line, 1u);
  EXPECT_FALSE(parse_sus_csv("").errors.empty());
}

TEST(Csv, RoundTrip) {
  std::mt19937_64 rng(3);
  auto mos = random_mos(rng);
  auto back = parse_mos_csv(export_mos_csv(mos));
  ASSERT_TRUE(back.errors.empty());
  ASSERT_EQ(back.rows.size(), mos.size());
  for (std::size_t i = 0; i < mos.size(); ++i) {
    EXPECT_EQ(back.rows[i].judge_id, mos[i].judge_id);
    EXPECT_EQ(back.rows[i].condition, mos[i].condition);
    EXPECT_EQ(back.rows[i].measure, mos[i].measure);
    EXPECT_EQ(back.rows[i].score, mos[i].score);
  }
  std::vector<SusResponse> sus{{"x", {1, 2, 3, 4, 5, 1, 2, 3, 4, 5}}};
  auto s = parse_sus_csv(export_sus_csv(sus));
  ASSERT_EQ(s.rows.size(), 1u);
  EXPECT_EQ(s.rows[0].items, sus[0].items);
}

TEST(Reported, Parses) {
  auto r = parse_reported("naturalness=4.07, Accent=3.98,quality=3.88");
  EXPECT_EQ(r, kReported);
  EXPECT_THROW(parse_reported("loudness=3"), ValidationError);
  EXPECT_THROW(parse_reported("accent"), ValidationError);
}

}  // namespace
}  // namespace amanda::eval
