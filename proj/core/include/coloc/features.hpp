#ifndef COLOC_FEATURES_HPP
#define COLOC_FEATURES_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coloc/config.hpp"
#include "coloc/geodyads.hpp"
#include "coloc/ingest.hpp"
#include "coloc/thresholds.hpp"

namespace coloc {

enum class Timeframe : std::uint8_t { kAll, kWeekday, kWeekend, kNight, kMorning, kAfternoon, kEvening };

inline constexpr std::array<Timeframe, 7> kAllTimeframes = {
    Timeframe::kAll,   Timeframe::kWeekday,   Timeframe::kWeekend, Timeframe::kNight,
    Timeframe::kMorning, Timeframe::kAfternoon, Timeframe::kEvening};

std::string_view to_string(Timeframe tf);
std::optional<Timeframe> parse_timeframe(std::string_view s);

/// Maps a bin start to the set of timeframes it belongs to, in local time.
class TimeframeClassifier {
 public:
  explicit TimeframeClassifier(const std::string& timezone);
  ~TimeframeClassifier();
  TimeframeClassifier(TimeframeClassifier&&) noexcept;
  TimeframeClassifier& operator=(TimeframeClassifier&&) noexcept;

  /// Bit i set when the bin belongs to kAllTimeframes[i].
  std::uint8_t mask(TimestampMs t) const;
  bool contains(Timeframe tf, TimestampMs t) const {
    return (mask(t) >> static_cast<unsigned>(tf)) & 1u;
  }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Period : std::uint8_t { kP1 = 0, kP2 = 1 };
std::string_view to_string(Period p);
std::optional<Period> parse_period(std::string_view s);

struct PeriodSpec {
  Period period = Period::kP1;
  TimeWindow window;  // [wave_t, wave_t+1); excluded bins are absent from the grid
};
std::array<PeriodSpec, 2> study_periods(const StudyConfig& config);

inline constexpr std::size_t kContinuousStatCount = 9;
inline constexpr std::size_t kBinaryStatCount = 25;
extern const std::array<std::string_view, kContinuousStatCount> kContinuousStatNames;
extern const std::array<std::string_view, kBinaryStatCount> kBinaryStatNames;

/// Cap applied to 1/d^2 (and used for d == 0).
inline constexpr double kInverseSquareCap = 200.0;

/// mean/median/SD of the raw, log and capped inverse-squared distances over
/// the defined bins; all missing when no bin is defined. log(d) for d < 1 is 0.
std::array<double, kContinuousStatCount> continuous_stats(std::span<const double> distances);

enum class CellState : std::uint8_t { kValue, kArtifact, kMissing };

/// Statistic before the missing-value policy has been applied. kArtifact
/// marks a statistic that is undefined although sensor data exists (e.g. the
/// minimum span length when no span occurred).
struct StatCell {
  double value = 0.0;
  CellState state = CellState::kValue;
};

/// Substitute values for artifact-undefined statistics.
struct SubstitutionPolicy {
  double empty_runs = 0.0;   // span or gap statistics with no run at all
  double single_run_sd = 0.0;  // SD over exactly one run
};

std::array<StatCell, kBinaryStatCount> binary_stats_raw(std::span<const Obs> series);
std::array<double, kBinaryStatCount> artifact_substitute(const std::array<StatCell, kBinaryStatCount>& raw,
                                                         const SubstitutionPolicy& policy = {});
/// Five base statistics, ten over runs of 1s (spans), ten over runs of 0s
/// (gaps); run lengths in bins, missing bins break runs.
std::array<double, kBinaryStatCount> binary_stats(std::span<const Obs> series);

/// Which series and timeframes are crossed into columns.
struct FeatureSchema {
  bool distance = true;
  std::vector<BinarySeries> binary_series = all_binary_series(true);
  std::vector<Timeframe> timeframes{kAllTimeframes.begin(), kAllTimeframes.end()};

  static FeatureSchema standard(bool with_wifi = true);
  std::size_t column_count() const;
  /// Names `series.stat.timeframe`, ordered series, timeframe, statistic.
  std::vector<std::string> column_names() const;
  std::uint64_t hash() const;
  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& j);
};

struct RowKey {
  Dyad dyad;
  Period period = Period::kP1;
  friend bool operator==(const RowKey&, const RowKey&) = default;
};

/// Dense (dyad, period) x feature matrix; NaN cells are missing.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::vector<std::string> columns);

  std::size_t rows() const { return keys_.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<RowKey>& keys() const { return keys_; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  std::uint64_t schema_hash() const;

  void append(RowKey key, std::span<const double> values);
  /// Row index for a key, or npos.
  std::size_t find(const Dyad& dyad, Period period) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::string to_csv() const;
  static FeatureMatrix from_csv(std::string_view text);

 private:
  std::vector<std::string> columns_;
  std::vector<RowKey> keys_;
  std::vector<double> values_;
  std::map<std::pair<Dyad, Period>, std::size_t> lookup_;
};

/// Per-run precomputation: bin lists for every (period, timeframe).
class ExtractionPlan {
 public:
  ExtractionPlan(const BinIndex& bins, const StudyConfig& config, FeatureSchema schema);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<std::uint32_t>& bins(Period p, std::size_t timeframe_slot) const {
    return bins_[static_cast<std::size_t>(p)][timeframe_slot];
  }
  std::size_t bin_count() const { return n_bins_; }

 private:
  FeatureSchema schema_;
  std::size_t n_bins_ = 0;
  std::array<std::vector<std::vector<std::uint32_t>>, 2> bins_;
};

/// Feature vector of one dyad for one period, in schema column order.
void extract_row(const DyadSeries& series, const ExtractionPlan& plan, Period period, std::span<double> out);

/// One row per period for the dyad.
std::vector<std::vector<double>> extract(const DyadSeries& series, const ExtractionPlan& plan);

/// Full extraction over the given dyads; row order is dyad order x (P1, P2).
FeatureMatrix extract_all(const GridSet& grids, std::span<const Dyad> dyads, const DyadContext& ctx,
                          const ExtractionPlan& plan, unsigned jobs = 1);

}  // namespace coloc

#endif  // COLOC_FEATURES_HPP
