#ifndef COLOC_CONFIG_HPP
#define COLOC_CONFIG_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coloc/common.hpp"

namespace coloc {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Latitude/longitude rectangle, bounds inclusive.
struct GeoBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(GeoPoint p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
  friend bool operator==(const GeoBox&, const GeoBox&) = default;
};

/// Half-open [start, end) interval of epoch milliseconds.
struct TimeWindow {
  TimestampMs start = 0;
  TimestampMs end = 0;

  bool contains(TimestampMs t) const { return t >= start && t < end; }
  bool overlaps(TimestampMs s, TimestampMs e) const { return s < end && start < e; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

enum class ThresholdMode { kCluster, kStatic };

/// Break points published with the original study (meters); used verbatim in
/// static threshold mode.
inline const std::vector<double> kPublishedBreaksM = {207.0, 422.0, 626.0, 822.0, 1001.0,
                                                      1178.0, 1373.0, 1570.0, 1776.0, 2000.0};

struct StudyConfig {
  TimestampMs study_start = 0;
  TimestampMs study_end = 0;
  std::vector<TimeWindow> exclusion_windows;
  TimestampMs bin_width = 10 * kMinuteMs;
  std::string timezone = "UTC";
  GeoBox campus_geobox;
  GeoBox house_geobox;
  double distance_elbow_m = 2000.0;
  std::array<TimestampMs, 3> wave_times{};
  ThresholdMode threshold_mode = ThresholdMode::kCluster;
  std::vector<double> static_thresholds_m = kPublishedBreaksM;
  /// Hotspots visible from the shared house.
  std::vector<std::string> house_hotspots;
  /// Closed participant roster. Empty means "derive from the survey file".
  std::vector<std::string> nodes;
  std::optional<double> min_accuracy_m;
  /// Last-value-carried-forward horizon; 0 disables carrying.
  TimestampMs lvcf_max = 0;
  /// Distances are rounded to this resolution before threshold clustering.
  double cluster_resolution_m = 1.0;
  bool wifi_features = true;

  /// Throws InputError when an invariant does not hold.
  void validate() const;
  TimeWindow study_window() const { return {study_start, study_end}; }

  static StudyConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Hash of the canonical JSON form; stamped on artifacts to detect mixing.
  std::uint64_t hash() const;
};

StudyConfig load_study_config(const std::string& path);

}  // namespace coloc

#endif  // COLOC_CONFIG_HPP
