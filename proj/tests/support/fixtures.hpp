#ifndef COLOC_TEST_FIXTURES_HPP
#define COLOC_TEST_FIXTURES_HPP

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "coloc/config.hpp"
#include "coloc/ingest.hpp"

namespace fixture {

// Monday 2024-01-01 00:00 UTC.
inline constexpr coloc::TimestampMs kMonday = 1704067200000;

/// UTC study of `days` days split into two equal periods.
inline coloc::StudyConfig days_config(int days) {
  coloc::StudyConfig c;
  c.study_start = kMonday;
  c.study_end = kMonday + days * coloc::kDayMs;
  const coloc::TimestampMs half = (c.study_end - c.study_start) / 2;
  c.wave_times = {c.study_start, c.study_start + half, c.study_end};
  c.campus_geobox = {39.99, 40.01, -75.01, -74.99};
  c.house_geobox = {40.0115, 40.0125, -75.0005, -74.9995};
  c.house_hotspots = {"house_ap"};
  return c;
}

/// Grid for one device from per-bin positions (NaN = missing) and hotspot sets.
inline coloc::TimelineGrid grid(const std::string& id, const std::vector<double>& lat, const std::vector<double>& lon,
                                const std::vector<std::vector<std::uint32_t>>& wifi = {}) {
  coloc::TimelineGrid g;
  g.device_id = id;
  g.lat = lat;
  g.lon = lon;
  g.hotspot_offsets.push_back(0);
  for (std::size_t b = 0; b < lat.size(); ++b) {
    if (b < wifi.size()) {
      auto ids = wifi[b];
      std::sort(ids.begin(), ids.end());
      g.hotspot_ids.insert(g.hotspot_ids.end(), ids.begin(), ids.end());
    }
    g.hotspot_offsets.push_back(static_cast<std::uint32_t>(g.hotspot_ids.size()));
  }
  return g;
}

/// Fresh scratch directory under the build tree.
inline std::string scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("coloc_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace fixture

#endif  // COLOC_TEST_FIXTURES_HPP
