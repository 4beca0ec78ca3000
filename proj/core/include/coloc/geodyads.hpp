#ifndef COLOC_GEODYADS_HPP
#define COLOC_GEODYADS_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coloc/config.hpp"
#include "coloc/ingest.hpp"

namespace coloc {

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance in meters. Exactly symmetric in its arguments.
double haversine_m(GeoPoint p, GeoPoint q);

/// Unordered pair of participants, stored with a < b.
struct Dyad {
  std::string a;
  std::string b;

  /// Canonicalizes the order; throws InputError when x == y.
  static Dyad of(std::string_view x, std::string_view y);
  friend bool operator==(const Dyad&, const Dyad&) = default;
  friend auto operator<=>(const Dyad&, const Dyad&) = default;
};

/// Tri-state observation of a binary co-location series.
enum class Obs : std::int8_t { kMissing = -1, kFalse = 0, kTrue = 1 };

inline constexpr std::size_t kThresholdCount = 10;
inline constexpr std::size_t kBinarySeriesCount = 14;

/// Binary series roster. Indices 0..9 are the distance thresholds.
enum class BinarySeries : std::uint8_t {
  kWithinT1 = 0,
  kBothOnCampus = 10,
  kBothInHouse = 11,
  kCommonWifi = 12,
  kCommonHouseWifi = 13,
};

inline BinarySeries within_threshold(std::size_t k) { return static_cast<BinarySeries>(k); }
std::string series_name(BinarySeries s);
bool is_wifi_series(BinarySeries s);
std::vector<BinarySeries> all_binary_series(bool with_wifi = true);

/// Geometry shared by every dyad of a run.
struct DyadContext {
  std::vector<double> thresholds;             // 10 strictly increasing meters
  GeoBox campus;
  GeoBox house;
  std::vector<std::uint32_t> house_hotspots;  // sorted dictionary ids

  static DyadContext make(const StudyConfig& config, std::span<const double> thresholds,
                          const HotspotDictionary& dict);
};

struct DyadSeries {
  Dyad dyad;
  std::vector<double> distance;  // NaN where either location is missing
  std::array<std::vector<Obs>, kBinarySeriesCount> binary;

  const std::vector<Obs>& series(BinarySeries s) const { return binary[static_cast<std::size_t>(s)]; }
  std::size_t size() const { return distance.size(); }
};

/// Builds the continuous and 14 binary series for one pair of grids. Grids
/// must come from the same GridSet (or carry identical bin layouts).
DyadSeries build_dyad_series(const TimelineGrid& a, const TimelineGrid& b, const DyadContext& ctx);

/// Same as above, writing into `out` to reuse its buffers.
void build_dyad_series(const TimelineGrid& a, const TimelineGrid& b, const DyadContext& ctx, DyadSeries& out);

struct EligibleDyads {
  std::vector<Dyad> dyads;
  std::size_t surveyed_nodes = 0;
  std::size_t potential = 0;  // C(surveyed_nodes, 2)
};

/// Dyads among surveyed participants whose devices have at least one bin of
/// simultaneous coverage (both located, or both scanning WiFi).
EligibleDyads eligible_dyads(const GridSet& set, std::span<const std::string> survey_nodes);

/// CSV dump of one dyad: bin_start_ms,distance_m,<14 binary columns>.
std::string dyad_series_to_csv(const DyadSeries& s, const BinIndex& bins);

}  // namespace coloc

#endif  // COLOC_GEODYADS_HPP
