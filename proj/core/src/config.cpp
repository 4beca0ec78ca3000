#include "coloc/config.hpp"

#include <algorithm>

namespace coloc {

namespace {

using nlohmann::json;

GeoBox box_from_json(const json& j) {
  return GeoBox{j.at("lat_min").get<double>(), j.at("lat_max").get<double>(),
                j.at("lon_min").get<double>(), j.at("lon_max").get<double>()};
}

json box_to_json(const GeoBox& b) {
  return json{{"lat_min", b.lat_min}, {"lat_max", b.lat_max}, {"lon_min", b.lon_min}, {"lon_max", b.lon_max}};
}

}  // namespace

void StudyConfig::validate() const {
  if (study_end <= study_start) throw InputError("config: study_end must follow study_start");
  if (bin_width <= 0 || kDayMs % bin_width != 0) {
    throw InputError("config: bin_width must be positive and divide 24h");
  }
  for (std::size_t i = 0; i + 1 < wave_times.size(); ++i) {
    if (wave_times[i] >= wave_times[i + 1]) throw InputError("config: wave_times must be strictly increasing");
  }
  for (const auto& w : exclusion_windows) {
    if (w.end <= w.start) throw InputError("config: empty exclusion window");
    if (w.start < study_start || w.end > study_end) {
      throw InputError("config: exclusion window outside the study window");
    }
  }
  if (distance_elbow_m <= 0) throw InputError("config: distance_elbow_m must be positive");
  if (threshold_mode == ThresholdMode::kStatic) {
    if (static_thresholds_m.size() != 10) throw InputError("config: static_thresholds_m needs 10 values");
    for (std::size_t i = 0; i < static_thresholds_m.size(); ++i) {
      if (static_thresholds_m[i] <= 0 || (i > 0 && static_thresholds_m[i] <= static_thresholds_m[i - 1])) {
        throw InputError("config: static_thresholds_m must be positive and strictly increasing");
      }
    }
  }
  for (const auto& b : {campus_geobox, house_geobox}) {
    if (b.lat_min > b.lat_max || b.lon_min > b.lon_max) throw InputError("config: inverted geobox");
  }
  if (min_accuracy_m && *min_accuracy_m <= 0) throw InputError("config: min_accuracy_m must be positive");
  if (lvcf_max < 0) throw InputError("config: lvcf_max_ms must be non-negative");
  if (cluster_resolution_m < 0) throw InputError("config: cluster_resolution_m must be non-negative");
}

StudyConfig StudyConfig::from_json(const json& j) {
  StudyConfig c;
  try {
    c.study_start = j.at("study_start_ms").get<TimestampMs>();
    c.study_end = j.at("study_end_ms").get<TimestampMs>();
    if (j.contains("exclusion_windows_ms")) {
      for (const auto& w : j.at("exclusion_windows_ms")) {
        c.exclusion_windows.push_back({w.at(0).get<TimestampMs>(), w.at(1).get<TimestampMs>()});
      }
    }
    c.bin_width = j.value("bin_width_ms", c.bin_width);
    c.timezone = j.value("timezone", c.timezone);
    if (j.contains("campus_geobox")) c.campus_geobox = box_from_json(j.at("campus_geobox"));
    if (j.contains("house_geobox")) c.house_geobox = box_from_json(j.at("house_geobox"));
    c.distance_elbow_m = j.value("distance_elbow_m", c.distance_elbow_m);
    const auto& waves = j.at("wave_times_ms");
    if (waves.size() != 3) throw InputError("config: wave_times_ms needs 3 entries");
    for (std::size_t i = 0; i < 3; ++i) c.wave_times[i] = waves.at(i).get<TimestampMs>();
    const std::string mode = j.value("threshold_mode", std::string("cluster"));
    if (mode == "cluster") {
      c.threshold_mode = ThresholdMode::kCluster;
    } else if (mode == "static") {
      c.threshold_mode = ThresholdMode::kStatic;
    } else {
      throw InputError("config: threshold_mode must be cluster or static");
    }
    if (j.contains("static_thresholds_m")) c.static_thresholds_m = j.at("static_thresholds_m").get<std::vector<double>>();
    if (j.contains("house_hotspots")) c.house_hotspots = j.at("house_hotspots").get<std::vector<std::string>>();
    if (j.contains("nodes")) c.nodes = j.at("nodes").get<std::vector<std::string>>();
    if (j.contains("min_accuracy_m") && !j.at("min_accuracy_m").is_null()) {
      c.min_accuracy_m = j.at("min_accuracy_m").get<double>();
    }
    c.lvcf_max = j.value("lvcf_max_ms", c.lvcf_max);
    c.cluster_resolution_m = j.value("cluster_resolution_m", c.cluster_resolution_m);
    c.wifi_features = j.value("wifi_features", c.wifi_features);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  std::sort(c.house_hotspots.begin(), c.house_hotspots.end());
  c.validate();
  return c;
}

json StudyConfig::to_json() const {
  json windows = json::array();
  for (const auto& w : exclusion_windows) windows.push_back({w.start, w.end});
  json j{
      {"study_start_ms", study_start},
      {"study_end_ms", study_end},
      {"exclusion_windows_ms", windows},
      {"bin_width_ms", bin_width},
      {"timezone", timezone},
      {"campus_geobox", box_to_json(campus_geobox)},
      {"house_geobox", box_to_json(house_geobox)},
      {"distance_elbow_m", distance_elbow_m},
      {"wave_times_ms", wave_times},
      {"threshold_mode", threshold_mode == ThresholdMode::kCluster ? "cluster" : "static"},
      {"static_thresholds_m", static_thresholds_m},
      {"house_hotspots", house_hotspots},
      {"nodes", nodes},
      {"lvcf_max_ms", lvcf_max},
      {"cluster_resolution_m", cluster_resolution_m},
      {"wifi_features", wifi_features},
  };
  j["min_accuracy_m"] = min_accuracy_m ? json(*min_accuracy_m) : json(nullptr);
  return j;
}

std::uint64_t StudyConfig::hash() const { return fnv1a64(to_json().dump()); }

StudyConfig load_study_config(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError("config " + path + ": " + e.what());
  }
  return StudyConfig::from_json(j);
}

}  // namespace coloc
