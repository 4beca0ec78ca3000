#ifndef COLOC_INGEST_HPP
#define COLOC_INGEST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coloc/common.hpp"
#include "coloc/config.hpp"

namespace coloc {

struct LocationSample {
  std::string device_id;
  TimestampMs timestamp = 0;
  double latitude = 0.0;
  double longitude = 0.0;
  std::optional<double> accuracy_m;
};

struct WifiObservation {
  std::string device_id;
  TimestampMs timestamp = 0;
  std::string hotspot_id;
};

enum class TieType { kInteract, kFriend, kCloseFriend, kAdvicePersonal, kAdviceProfessional };

inline constexpr std::array<TieType, 5> kAllTieTypes = {TieType::kInteract, TieType::kFriend,
                                                        TieType::kCloseFriend, TieType::kAdvicePersonal,
                                                        TieType::kAdviceProfessional};

std::string_view to_string(TieType t);
std::optional<TieType> parse_tie_type(std::string_view s);

struct SurveyTie {
  int wave = 1;
  std::string ego;
  std::string alter;
  TieType tie_type = TieType::kFriend;
  int value = 0;
};

struct RejectedRow {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

/// Row-level bookkeeping for one ingest run. Nothing is dropped silently.
struct IngestReport {
  std::size_t location_rows = 0;
  std::size_t wifi_rows = 0;
  std::size_t survey_rows = 0;
  std::vector<RejectedRow> rejected;
  std::vector<std::string> warnings;

  std::size_t rejected_in(std::string_view file) const;
  nlohmann::json to_json() const;
};

struct ParsedInputs {
  std::vector<LocationSample> locations;
  std::vector<WifiObservation> wifi;
  std::vector<SurveyTie> ties;
  IngestReport report;
};

// Text-level parsers. `label` names the source in the report. A header that
// does not match the contract throws InputError; bad rows are recorded.
std::vector<LocationSample> parse_locations(std::string_view text, std::string_view label, IngestReport& report);
std::vector<WifiObservation> parse_wifi(std::string_view text, std::string_view label, IngestReport& report);
/// `roster` empty disables the roster check.
std::vector<SurveyTie> parse_surveys(std::string_view text, std::string_view label,
                                     std::span<const std::string> roster, IngestReport& report);

ParsedInputs parse_inputs(const std::string& location_file, const std::string& wifi_file,
                          const std::string& survey_file, const StudyConfig& config);

/// Shared bin layout: every bin of the study window that does not overlap an
/// exclusion window. All device grids of a run share one BinIndex.
class BinIndex {
 public:
  explicit BinIndex(const StudyConfig& config);

  std::size_t size() const { return starts_.size(); }
  TimestampMs width() const { return width_; }
  TimestampMs start(std::size_t bin) const { return starts_[bin]; }
  const std::vector<TimestampMs>& starts() const { return starts_; }
  /// Bin containing t, or nullopt if t is outside the window or excluded.
  std::optional<std::size_t> locate(TimestampMs t) const;

  friend bool operator==(const BinIndex& a, const BinIndex& b) {
    return a.width_ == b.width_ && a.starts_ == b.starts_;
  }

 private:
  TimestampMs origin_ = 0;
  TimestampMs width_ = 0;
  std::vector<std::int32_t> slot_to_bin_;
  std::vector<TimestampMs> starts_;
};

/// Interned hotspot identifiers.
class HotspotDictionary {
 public:
  std::uint32_t intern(std::string_view id);
  std::optional<std::uint32_t> find(std::string_view id) const;
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
};

/// One device's observations on the shared bin layout. Missing locations are
/// NaN; hotspot sets are stored compressed (offsets into a flat id array) and
/// an empty set means no WiFi scan in that bin.
struct TimelineGrid {
  std::string device_id;
  std::vector<double> lat;
  std::vector<double> lon;
  std::vector<std::uint32_t> hotspot_offsets;  // size bins + 1
  std::vector<std::uint32_t> hotspot_ids;      // sorted within each bin
  bool no_samples = false;

  std::size_t size() const { return lat.size(); }
  bool has_location(std::size_t bin) const { return !is_missing(lat[bin]); }
  bool has_wifi(std::size_t bin) const { return hotspot_offsets[bin + 1] > hotspot_offsets[bin]; }
  std::span<const std::uint32_t> hotspots(std::size_t bin) const {
    return {hotspot_ids.data() + hotspot_offsets[bin], hotspot_offsets[bin + 1] - hotspot_offsets[bin]};
  }
  std::size_t missing_locations() const;
};

struct GridSet {
  std::shared_ptr<const BinIndex> bins;
  std::shared_ptr<HotspotDictionary> hotspots;
  std::vector<TimelineGrid> grids;  // sorted by device_id

  const TimelineGrid* find(std::string_view device_id) const;
};

struct GridStats {
  std::size_t readings_outside_window = 0;
  std::size_t readings_excluded = 0;
  std::size_t readings_below_accuracy = 0;
  std::size_t carried_forward_bins = 0;
};

/// Snap readings onto the bin layout. Each bin keeps the location reading
/// closest to its start; hotspots are the union of detections in the bin.
/// `extra_devices` get a grid even without readings (flagged no_samples).
GridSet build_grids(std::span<const LocationSample> samples, std::span<const WifiObservation> wifi,
                    const StudyConfig& config, std::span<const std::string> extra_devices = {},
                    GridStats* stats = nullptr);

/// Canonical per-device export: bin_start_ms,lat,lon,hotspot_ids.
std::string grid_to_csv(const TimelineGrid& grid, const GridSet& set);
TimelineGrid grid_from_csv(std::string_view text, std::string device_id, GridSet& set);

void write_grids(const std::string& dir, const GridSet& set);
GridSet read_grids(const std::string& dir, const StudyConfig& config);

struct SurvivalPoint {
  TimestampMs gap = 0;
  double fraction = 0.0;
};

/// Fraction of device-time lying in location gaps longer than each length.
/// A gap is a maximal run of missing bins; its length is run * bin_width.
std::vector<SurvivalPoint> coverage_survival(const GridSet& set);

std::string survey_to_csv(std::span<const SurveyTie> ties);

}  // namespace coloc

#endif  // COLOC_INGEST_HPP
