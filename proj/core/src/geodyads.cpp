#include "coloc/geodyads.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace coloc {

double haversine_m(GeoPoint p, GeoPoint q) {
  // Fixed argument order makes the result bit-for-bit symmetric.
  if (std::pair(q.lat, q.lon) < std::pair(p.lat, p.lon)) std::swap(p, q);
  constexpr double kRad = std::numbers::pi / 180.0;
  const double phi1 = p.lat * kRad;
  const double phi2 = q.lat * kRad;
  const double dphi = (q.lat - p.lat) * kRad;
  const double dlambda = (q.lon - p.lon) * kRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

Dyad Dyad::of(std::string_view x, std::string_view y) {
  if (x == y) throw InputError("dyad needs two distinct nodes, got '" + std::string(x) + "' twice");
  if (y < x) std::swap(x, y);
  return Dyad{std::string(x), std::string(y)};
}

std::string series_name(BinarySeries s) {
  const auto i = static_cast<std::size_t>(s);
  if (i < kThresholdCount) return "within_t" + std::to_string(i + 1);
  switch (s) {
    case BinarySeries::kBothOnCampus: return "both_on_campus";
    case BinarySeries::kBothInHouse: return "both_in_house";
    case BinarySeries::kCommonWifi: return "common_wifi";
    case BinarySeries::kCommonHouseWifi: return "common_house_wifi";
    default: break;
  }
  throw InvariantError("unknown binary series");
}

bool is_wifi_series(BinarySeries s) {
  return s == BinarySeries::kCommonWifi || s == BinarySeries::kCommonHouseWifi;
}

std::vector<BinarySeries> all_binary_series(bool with_wifi) {
  std::vector<BinarySeries> out;
  for (std::size_t i = 0; i < kBinarySeriesCount; ++i) {
    const auto s = static_cast<BinarySeries>(i);
    if (with_wifi || !is_wifi_series(s)) out.push_back(s);
  }
  return out;
}

DyadContext DyadContext::make(const StudyConfig& config, std::span<const double> thresholds,
                              const HotspotDictionary& dict) {
  if (thresholds.size() != kThresholdCount) throw InputError("need exactly 10 distance thresholds");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) throw InputError("thresholds must be strictly increasing");
  }
  DyadContext ctx;
  ctx.thresholds.assign(thresholds.begin(), thresholds.end());
  ctx.campus = config.campus_geobox;
  ctx.house = config.house_geobox;
  for (const auto& h : config.house_hotspots) {
    if (auto id = dict.find(h)) ctx.house_hotspots.push_back(*id);
  }
  std::sort(ctx.house_hotspots.begin(), ctx.house_hotspots.end());
  return ctx;
}

namespace {

inline Obs obs(bool v) { return v ? Obs::kTrue : Obs::kFalse; }

// Sorted-range intersection tests.
bool intersects(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

bool intersects_within(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y,
                       std::span<const std::uint32_t> roster) {
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      if (std::binary_search(roster.begin(), roster.end(), *i)) return true;
      ++i;
      ++j;
    }
  }
  return false;
}

}  // namespace

void build_dyad_series(const TimelineGrid& a, const TimelineGrid& b, const DyadContext& ctx, DyadSeries& out) {
  if (a.size() != b.size() || a.hotspot_offsets.size() != b.hotspot_offsets.size()) {
    throw InputError("misaligned grids for " + a.device_id + " and " + b.device_id);
  }
  if (ctx.thresholds.size() != kThresholdCount) throw InputError("dyad context needs 10 thresholds");
  out.dyad = Dyad::of(a.device_id, b.device_id);
  const std::size_t n = a.size();
  out.distance.resize(n);
  for (auto& s : out.binary) s.resize(n);

  for (std::size_t t = 0; t < n; ++t) {
    if (a.has_location(t) && b.has_location(t)) {
      const GeoPoint pa{a.lat[t], a.lon[t]};
      const GeoPoint pb{b.lat[t], b.lon[t]};
      const double d = haversine_m(pa, pb);
      out.distance[t] = d;
      for (std::size_t k = 0; k < kThresholdCount; ++k) out.binary[k][t] = obs(d <= ctx.thresholds[k]);
      out.binary[10][t] = obs(ctx.campus.contains(pa) && ctx.campus.contains(pb));
      out.binary[11][t] = obs(ctx.house.contains(pa) && ctx.house.contains(pb));
    } else {
      out.distance[t] = kMissing;
      for (std::size_t k = 0; k < 12; ++k) out.binary[k][t] = Obs::kMissing;
    }
    if (a.has_wifi(t) && b.has_wifi(t)) {
      const auto ha = a.hotspots(t);
      const auto hb = b.hotspots(t);
      out.binary[12][t] = obs(intersects(ha, hb));
      out.binary[13][t] = obs(intersects_within(ha, hb, ctx.house_hotspots));
    } else {
      out.binary[12][t] = Obs::kMissing;
      out.binary[13][t] = Obs::kMissing;
    }
  }
}

DyadSeries build_dyad_series(const TimelineGrid& a, const TimelineGrid& b, const DyadContext& ctx) {
  DyadSeries out;
  build_dyad_series(a, b, ctx, out);
  return out;
}

EligibleDyads eligible_dyads(const GridSet& set, std::span<const std::string> survey_nodes) {
  EligibleDyads result;
  const std::set<std::string> nodes(survey_nodes.begin(), survey_nodes.end());
  result.surveyed_nodes = nodes.size();
  result.potential = nodes.size() * (nodes.size() > 0 ? nodes.size() - 1 : 0) / 2;
  std::vector<const TimelineGrid*> grids;
  for (const auto& id : nodes) {
    if (const auto* g = set.find(id)) grids.push_back(g);
  }
  for (std::size_t i = 0; i < grids.size(); ++i) {
    for (std::size_t j = i + 1; j < grids.size(); ++j) {
      const TimelineGrid& x = *grids[i];
      const TimelineGrid& y = *grids[j];
      bool overlap = false;
      for (std::size_t t = 0; t < x.size() && !overlap; ++t) {
        overlap = (x.has_location(t) && y.has_location(t)) || (x.has_wifi(t) && y.has_wifi(t));
      }
      if (overlap) result.dyads.push_back(Dyad::of(x.device_id, y.device_id));
    }
  }
  return result;
}

std::string dyad_series_to_csv(const DyadSeries& s, const BinIndex& bins) {
  std::string out = "bin_start_ms,distance_m";
  for (std::size_t k = 0; k < kBinarySeriesCount; ++k) out += "," + series_name(static_cast<BinarySeries>(k));
  out += '\n';
  for (std::size_t t = 0; t < s.size(); ++t) {
    out += std::to_string(bins.start(t));
    out += ',';
    out += format_double(s.distance[t]);
    for (const auto& series : s.binary) {
      out += ',';
      if (series[t] != Obs::kMissing) out += series[t] == Obs::kTrue ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

}  // namespace coloc
