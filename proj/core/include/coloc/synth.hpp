#ifndef COLOC_SYNTH_HPP
#define COLOC_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "coloc/config.hpp"
#include "coloc/features.hpp"
#include "coloc/ingest.hpp"
#include "coloc/networks.hpp"

namespace coloc {

/// Parameters of a synthetic cohort. Probabilities live in [0, 1].
struct SynthConfig {
  std::size_t n_nodes = 30;
  double base_tie_prob = 0.15;
  /// P(j->i | i->j) = p + boost * (1 - p).
  double reciprocity_boost = 0.6;
  double close_fraction = 0.4;
  /// Each directed entry flips independently between consecutive waves.
  double change_rate = 0.13;
  /// Hourly probability that a mutual tie meets (one-way ties at half, close ties x1.5).
  double co_location_lift = 0.35;
  double noise_m = 15.0;
  double missing_rate = 0.1;
  double mean_gap_bins = 6.0;
  double wifi_scan_prob = 0.7;
  double nonresponse_rate = 0.0;
  /// Members of the shared house.
  std::size_t residents = 10;
  std::size_t campus_spots = 8;
  std::size_t town_spots = 6;
  std::size_t period_days = 7;
  /// Local midnight starting wave 1 (defaults to Monday 2026-01-05, New York).
  TimestampMs start_ms = 1767589200000;
  std::string timezone = "America/New_York";
  GeoPoint campus_center{40.0, -75.0};
  TimestampMs bin_width = 10 * kMinuteMs;
  /// Whole days, counted from the start, removed as exclusion windows.
  std::vector<std::pair<std::size_t, std::size_t>> exclusion_days;
  std::uint64_t seed = 1;

  void validate() const;
  static SynthConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

std::string synth_node_id(std::size_t i);

/// Study configuration matching the generated world (geoboxes, waves,
/// house hotspots, roster).
StudyConfig synth_study_config(const SynthConfig& config);

/// Friend, close-friend, interact and both advice networks for three waves.
/// Non-responding egos are flagged per wave.
NetworkSet generate_networks(const SynthConfig& config);

/// Survey rows for every respondent ego, alter and tie type.
std::vector<SurveyTie> network_ties(const NetworkSet& networks);

struct Traces {
  std::vector<LocationSample> locations;
  std::vector<WifiObservation> wifi;
};

/// Mobility in [wave t, wave t+1) follows the wave t+1 friend and close networks.
Traces generate_traces(const NetworkSet& networks, const SynthConfig& config);

struct SynthCohort {
  SynthConfig synth;
  StudyConfig study;
  NetworkSet networks;
  std::vector<SurveyTie> ties;
  Traces traces;
  std::vector<std::string> residents;

  nlohmann::ordered_json ground_truth() const;
};

SynthCohort generate_cohort(const SynthConfig& config);

/// Writes locations.csv, wifi.csv, surveys.csv, study.json and ground_truth.json.
void write_cohort(const SynthCohort& cohort, const std::string& dir);

std::string locations_to_csv(const std::vector<LocationSample>& rows);
std::string wifi_to_csv(const std::vector<WifiObservation>& rows);

struct LeakageConfig {
  std::size_t n_nodes = 40;
  double tie_prob = 0.3;
  double change_rate = 0.13;
  /// Mean shift of the signal column between tie and non-tie rows, in SD units.
  double signal = 1.0;
  std::size_t fingerprint_dims = 4;
  std::uint64_t seed = 1;
};

/// Every tie mutual; each (dyad, period) has one feature row shared by both
/// directions, and per-dyad fingerprint columns constant across periods.
struct LeakageFixture {
  FeatureMatrix features;
  NetworkSet networks;
  LabelTable labels;
};

LeakageFixture leakage_fixture(const LeakageConfig& config);

}  // namespace coloc

#endif  // COLOC_SYNTH_HPP
