#include <doctest.h>

#include <set>

#include "coloc/features.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace coloc;

namespace {

std::vector<Obs> obs(std::initializer_list<int> v) {
  std::vector<Obs> out;
  for (int x : v) out.push_back(static_cast<Obs>(x));
  return out;
}

std::size_t stat(std::string_view name) {
  for (std::size_t i = 0; i < kBinaryStatCount; ++i) {
    if (kBinaryStatNames[i] == name) return i;
  }
  FAIL("unknown statistic");
  return 0;
}

}  // namespace

TEST_CASE("column counts") {
  CHECK(FeatureSchema{}.column_count() == 2513);
  CHECK(FeatureSchema::standard(true).column_names().size() == 2513);
  CHECK(FeatureSchema::standard(false).column_count() == 2163);
  const auto names = FeatureSchema{}.column_names();
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
  CHECK(FeatureSchema::from_json(FeatureSchema{}.to_json()).hash() == FeatureSchema{}.hash());
  CHECK(FeatureSchema::standard(false).hash() != FeatureSchema{}.hash());
}

TEST_CASE("constant 100 m distance") {
  std::vector<double> d(50, 100.0);
  const auto s = continuous_stats(d);
  CHECK(s[0] == 100.0);
  CHECK(s[1] == 100.0);
  CHECK(s[2] == 0.0);
  CHECK(s[3] == doctest::Approx(std::log(100.0)));
  CHECK(s[6] == doctest::Approx(1e-4));
}

TEST_CASE("zero and sub-metre distances hit the cap and the log floor") {
  std::vector<double> d = {0.0, 0.5, kMissing};
  const auto s = continuous_stats(d);
  CHECK(s[3] == 0.0);
  CHECK(s[6] == doctest::Approx((200.0 + 4.0) / 2));
  std::vector<double> zero = {0.0, 0.0};
  CHECK(continuous_stats(zero)[7] == 200.0);
  std::vector<double> none = {kMissing, kMissing};
  for (double v : continuous_stats(none)) CHECK(is_missing(v));
}

TEST_CASE("1,1,0,1 runs") {
  const auto s = binary_stats(obs({1, 1, 0, 1}));
  CHECK(s[stat("ones")] == 3);
  CHECK(s[stat("span_count")] == 2);
  CHECK(s[stat("span_max")] == 2);
  CHECK(s[stat("span_min")] == 1);
  CHECK(s[stat("gap_count")] == 1);
  CHECK(s[stat("gap_sum")] == 1);
  CHECK(s[stat("transitions")] == 2);
}

TEST_CASE("all-true series: one span, gap statistics substituted by 0") {
  const auto raw = binary_stats_raw(std::vector<Obs>(12, Obs::kTrue));
  CHECK(raw[stat("gap_min")].state == CellState::kArtifact);
  const auto s = artifact_substitute(raw);
  CHECK(s[stat("span_count")] == 1);
  CHECK(s[stat("span_max")] == 12);
  CHECK(s[stat("span_sd")] == 0);
  CHECK(s[stat("gap_count")] == 0);
  for (std::size_t i = stat("gap_count"); i < kBinaryStatCount; ++i) CHECK(s[i] == 0.0);
}

TEST_CASE("all-false series: spans absent, one gap covering every defined bin") {
  const auto s = binary_stats(obs({0, 0, -1, 0, 0, 0}));
  CHECK(s[stat("span_count")] == 0);
  CHECK(s[stat("span_max")] == 0);
  CHECK(s[stat("gap_count")] == 2);
  CHECK(s[stat("gap_sum")] == 5);
  CHECK(s[stat("missing")] == 1);
}

TEST_CASE("all-missing series stays missing") {
  for (double v : binary_stats(std::vector<Obs>(9, Obs::kMissing))) CHECK(is_missing(v));
}

TEST_CASE("binary statistics agree with naive run counting") {
  Rng rng(5, "runs");
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<int> v(1 + rng.below(60));
    for (auto& x : v) x = static_cast<int>(rng.below(3)) - 1;
    std::vector<Obs> o;
    for (int x : v) o.push_back(static_cast<Obs>(x));
    const auto s = binary_stats(o);
    const auto spans = oracle::runs(v, 1), gaps = oracle::runs(v, 0);
    const auto defined = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](int x) { return x >= 0; }));
    if (defined == 0) {
      CHECK(is_missing(s[0]));
      continue;
    }
    CHECK(s[stat("span_count")] == spans.size());
    CHECK(s[stat("gap_count")] == gaps.size());
    CHECK(s[stat("span_sum")] == std::accumulate(spans.begin(), spans.end(), 0));
    CHECK(s[stat("gap_sum")] == std::accumulate(gaps.begin(), gaps.end(), 0));
    CHECK(s[stat("span_sum")] + s[stat("gap_sum")] == s[stat("defined")]);
    CHECK(s[stat("defined")] + s[stat("missing")] == v.size());
    if (!spans.empty()) CHECK(s[stat("span_max")] == *std::max_element(spans.begin(), spans.end()));
    for (double x : s) CHECK(std::isfinite(x));
  }
}

TEST_CASE("timeframes follow local time") {
  TimeframeClassifier utc("UTC");
  const TimestampMs mon8 = fixture::kMonday + 8 * kHourMs;
  CHECK(utc.contains(Timeframe::kAll, mon8));
  CHECK(utc.contains(Timeframe::kWeekday, mon8));
  CHECK(utc.contains(Timeframe::kMorning, mon8));
  CHECK_FALSE(utc.contains(Timeframe::kWeekend, mon8));
  CHECK(utc.contains(Timeframe::kWeekend, fixture::kMonday + 5 * kDayMs + 13 * kHourMs));
  CHECK(utc.contains(Timeframe::kAfternoon, fixture::kMonday + 13 * kHourMs));
  CHECK(utc.contains(Timeframe::kNight, fixture::kMonday + 2 * kHourMs));
  CHECK(utc.contains(Timeframe::kEvening, fixture::kMonday + 20 * kHourMs));
  TimeframeClassifier ny("America/New_York");
  CHECK(ny.contains(Timeframe::kEvening, fixture::kMonday + 2 * kHourMs));  // Sunday 21:00 local
  CHECK(ny.contains(Timeframe::kWeekend, fixture::kMonday + 2 * kHourMs));
  CHECK_THROWS(TimeframeClassifier("Not/AZone"));
}

TEST_CASE("extraction: all-missing dyad is a missing row, sensor gaps stay missing") {
  auto cfg = fixture::days_config(4);
  BinIndex bins(cfg);
  ExtractionPlan plan(bins, cfg, FeatureSchema{});
  DyadSeries s;
  s.dyad = Dyad::of("a", "b");
  s.distance.assign(bins.size(), kMissing);
  for (auto& b : s.binary) b.assign(bins.size(), Obs::kMissing);
  const auto rows = extract(s, plan);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.size() == 2513);
    for (double v : r) CHECK(is_missing(v));
  }
}

TEST_CASE("extraction: mornings never within threshold give zero spans and a full-morning gap") {
  auto cfg = fixture::days_config(4);
  BinIndex bins(cfg);
  FeatureSchema schema;
  ExtractionPlan plan(bins, cfg, schema);
  DyadSeries s;
  s.dyad = Dyad::of("a", "b");
  s.distance.assign(bins.size(), 3000.0);
  for (auto& b : s.binary) b.assign(bins.size(), Obs::kFalse);
  const auto rows = extract(s, plan);
  const auto names = schema.column_names();
  auto col = [&](const std::string& n) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), n) - names.begin());
  };
  const auto& p1 = rows[0];
  CHECK(p1[col("within_t1.span_count.morning")] == 0);
  CHECK(p1[col("within_t1.span_max.morning")] == 0);
  // Runs follow the morning-only bin sequence, so both mornings form one gap.
  CHECK(p1[col("within_t1.gap_count.morning")] == 1);
  CHECK(p1[col("within_t1.gap_sum.morning")] == 72);
  CHECK(p1[col("distance.invsq_mean.all")] == doctest::Approx(1.0 / 9e6));
}

TEST_CASE("feature matrix CSV round trip") {
  FeatureMatrix m({"x", "y"});
  std::vector<double> r1 = {1.5, kMissing}, r2 = {-0.25, 1e-300};
  m.append({Dyad::of("a", "b"), Period::kP1}, r1);
  m.append({Dyad::of("a", "b"), Period::kP2}, r2);
  const auto back = FeatureMatrix::from_csv(m.to_csv());
  CHECK(back.to_csv() == m.to_csv());
  CHECK(back.find(Dyad::of("b", "a"), Period::kP2) == 1);
  CHECK(is_missing(back.at(0, 1)));
  CHECK(back.at(1, 1) == 1e-300);
}
