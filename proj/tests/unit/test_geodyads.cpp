#include <doctest.h>

#include "coloc/geodyads.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace coloc;

namespace {

DyadContext context(const std::vector<double>& thresholds, std::vector<std::uint32_t> house = {}) {
  DyadContext ctx;
  ctx.thresholds = thresholds;
  ctx.campus = {39.99, 40.01, -75.01, -74.99};
  ctx.house = {40.0115, 40.0125, -75.0005, -74.9995};
  ctx.house_hotspots = std::move(house);
  return ctx;
}

}  // namespace

TEST_CASE("haversine identity and one degree of longitude on the equator") {
  CHECK(haversine_m({40.0, -75.0}, {40.0, -75.0}) == 0.0);
  const double d = haversine_m({0, 0}, {0, 1});
  CHECK(std::abs(d - 111195.0) <= 5.0);
  CHECK(d == doctest::Approx(2 * 3.14159265358979323846 * kEarthRadiusM / 360).epsilon(1e-12));
}

TEST_CASE("haversine agrees with the chord formula and is symmetric") {
  Rng rng(7, "haversine");
  for (int i = 0; i < 2000; ++i) {
    GeoPoint p{rng.uniform() * 170 - 85, rng.uniform() * 360 - 180};
    GeoPoint q{p.lat + rng.normal(0, 0.05), p.lon + rng.normal(0, 0.05)};
    if (i % 2) q = {rng.uniform() * 170 - 85, rng.uniform() * 360 - 180};
    const double d = haversine_m(p, q);
    CHECK(d == haversine_m(q, p));
    CHECK(std::abs(d - oracle::chord_distance_m(p.lat, p.lon, q.lat, q.lon)) <= 1e-6 * std::max(1.0, d));
  }
}

TEST_CASE("dyads are canonical and refuse self pairs") {
  CHECK(Dyad::of("b", "a") == Dyad::of("a", "b"));
  CHECK(Dyad::of("b", "a").a == "a");
  CHECK_THROWS_AS(Dyad::of("a", "a"), InputError);
}

TEST_CASE("500 m against the published breaks") {
  const double dlat = 500.0 / (kEarthRadiusM * 3.14159265358979323846 / 180.0);
  auto a = fixture::grid("a", {40.0}, {-75.0});
  auto b = fixture::grid("b", {40.0 + dlat}, {-75.0});
  const auto s = build_dyad_series(a, b, context(kPublishedBreaksM));
  CHECK(s.distance[0] == doctest::Approx(500.0).epsilon(1e-9));
  CHECK(s.series(within_threshold(0))[0] == Obs::kFalse);
  CHECK(s.series(within_threshold(1))[0] == Obs::kFalse);
  CHECK(s.series(within_threshold(2))[0] == Obs::kTrue);
}

TEST_CASE("same place all day: distance 0, every threshold true") {
  std::vector<double> lat(144, 40.0), lon(144, -75.0);
  const auto s = build_dyad_series(fixture::grid("a", lat, lon), fixture::grid("b", lat, lon), context(kPublishedBreaksM));
  for (std::size_t t = 0; t < 144; ++t) {
    CHECK(s.distance[t] == 0.0);
    for (std::size_t k = 0; k < kThresholdCount; ++k) CHECK(s.series(within_threshold(k))[t] == Obs::kTrue);
    CHECK(s.series(BinarySeries::kBothOnCampus)[t] == Obs::kTrue);
    CHECK(s.series(BinarySeries::kBothInHouse)[t] == Obs::kFalse);
  }
}

TEST_CASE("a silent device makes every series missing") {
  std::vector<double> lat(10, 40.0), lon(10, -75.0), none(10, kMissing);
  const auto s = build_dyad_series(fixture::grid("a", none, none), fixture::grid("b", lat, lon), context(kPublishedBreaksM));
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(is_missing(s.distance[t]));
    for (std::size_t k = 0; k < kBinarySeriesCount; ++k) CHECK(s.binary[k][t] == Obs::kMissing);
  }
}

TEST_CASE("misaligned grids are refused") {
  auto a = fixture::grid("a", {40.0, 40.0}, {-75.0, -75.0});
  auto b = fixture::grid("b", {40.0}, {-75.0});
  CHECK_THROWS(build_dyad_series(a, b, context(kPublishedBreaksM)));
}

TEST_CASE("random grids: threshold series nest and house wifi implies common wifi") {
  Rng rng(11, "series");
  const std::uint32_t house_ap = 0;
  const auto ctx = context(kPublishedBreaksM, {house_ap});
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 200;
    std::vector<double> la(n), lo(n), lb(n), lob(n);
    std::vector<std::vector<std::uint32_t>> wa(n), wb(n);
    for (std::size_t t = 0; t < n; ++t) {
      la[t] = rng.bernoulli(0.2) ? kMissing : 40.0 + rng.normal(0, 0.01);
      lo[t] = is_missing(la[t]) ? kMissing : -75.0 + rng.normal(0, 0.01);
      lb[t] = rng.bernoulli(0.2) ? kMissing : 40.0 + rng.normal(0, 0.01);
      lob[t] = is_missing(lb[t]) ? kMissing : -75.0 + rng.normal(0, 0.01);
      for (std::uint32_t ap = 0; ap < 4; ++ap) {
        if (rng.bernoulli(0.3)) wa[t].push_back(ap);
        if (rng.bernoulli(0.3)) wb[t].push_back(ap);
      }
    }
    const auto s = build_dyad_series(fixture::grid("a", la, lo, wa), fixture::grid("b", lb, lob, wb), ctx);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k + 1 < kThresholdCount; ++k) {
        if (s.series(within_threshold(k))[t] == Obs::kTrue) CHECK(s.series(within_threshold(k + 1))[t] == Obs::kTrue);
      }
      if (s.series(BinarySeries::kCommonHouseWifi)[t] == Obs::kTrue) {
        CHECK(s.series(BinarySeries::kCommonWifi)[t] == Obs::kTrue);
      }
      const bool both_located = !is_missing(la[t]) && !is_missing(lb[t]);
      CHECK(is_missing(s.distance[t]) == !both_located);
    }
  }
}

TEST_CASE("eligible dyads need simultaneous coverage") {
  GridSet set;
  std::vector<double> on(4, 40.0), lon(4, -75.0), off(4, kMissing);
  set.grids.push_back(fixture::grid("a", on, lon));
  set.grids.push_back(fixture::grid("b", on, lon));
  set.grids.push_back(fixture::grid("c", off, off));
  std::vector<std::string> nodes = {"a", "b", "c"};
  auto e = eligible_dyads(set, nodes);
  CHECK(e.dyads.size() == 1);
  CHECK(e.potential == 3);

  GridSet disjoint;
  disjoint.grids.push_back(fixture::grid("a", {40.0, kMissing}, {-75.0, kMissing}));
  disjoint.grids.push_back(fixture::grid("b", {kMissing, 40.0}, {kMissing, -75.0}));
  std::vector<std::string> two = {"a", "b"};
  CHECK(eligible_dyads(disjoint, two).dyads.empty());
}

TEST_CASE("48 fully covered nodes give 1128 dyads") {
  GridSet set;
  std::vector<std::string> nodes;
  for (int i = 0; i < 48; ++i) {
    nodes.push_back("n" + std::to_string(100 + i));
    set.grids.push_back(fixture::grid(nodes.back(), {40.0}, {-75.0}));
  }
  const auto e = eligible_dyads(set, nodes);
  CHECK(e.dyads.size() == 1128);
  CHECK(e.potential == 1128);
}
