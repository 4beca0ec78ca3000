#include "coloc/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/time/time.h"

namespace coloc {

std::string_view to_string(Timeframe tf) {
  switch (tf) {
    case Timeframe::kAll: return "all";
    case Timeframe::kWeekday: return "weekday";
    case Timeframe::kWeekend: return "weekend";
    case Timeframe::kNight: return "night";
    case Timeframe::kMorning: return "morning";
    case Timeframe::kAfternoon: return "afternoon";
    case Timeframe::kEvening: return "evening";
  }
  return "unknown";
}

std::optional<Timeframe> parse_timeframe(std::string_view s) {
  for (Timeframe tf : kAllTimeframes) {
    if (to_string(tf) == s) return tf;
  }
  return std::nullopt;
}

struct TimeframeClassifier::Impl {
  absl::TimeZone zone;
};

TimeframeClassifier::TimeframeClassifier(const std::string& timezone) : impl_(std::make_unique<Impl>()) {
  if (!absl::LoadTimeZone(timezone, &impl_->zone)) throw InputError("unknown timezone '" + timezone + "'");
}
TimeframeClassifier::~TimeframeClassifier() = default;
TimeframeClassifier::TimeframeClassifier(TimeframeClassifier&&) noexcept = default;
TimeframeClassifier& TimeframeClassifier::operator=(TimeframeClassifier&&) noexcept = default;

std::uint8_t TimeframeClassifier::mask(TimestampMs t) const {
  const absl::CivilSecond cs = impl_->zone.At(absl::FromUnixMillis(t)).cs;
  const absl::Weekday wd = absl::GetWeekday(cs);
  const bool weekend = wd == absl::Weekday::saturday || wd == absl::Weekday::sunday;
  const int hour = cs.hour();
  Timeframe part = Timeframe::kEvening;
  if (hour < 6) {
    part = Timeframe::kNight;
  } else if (hour < 12) {
    part = Timeframe::kMorning;
  } else if (hour < 18) {
    part = Timeframe::kAfternoon;
  }
  auto bit = [](Timeframe tf) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(tf)); };
  return bit(Timeframe::kAll) | bit(weekend ? Timeframe::kWeekend : Timeframe::kWeekday) | bit(part);
}

std::string_view to_string(Period p) { return p == Period::kP1 ? "P1" : "P2"; }

std::optional<Period> parse_period(std::string_view s) {
  if (s == "P1") return Period::kP1;
  if (s == "P2") return Period::kP2;
  return std::nullopt;
}

std::array<PeriodSpec, 2> study_periods(const StudyConfig& config) {
  return {PeriodSpec{Period::kP1, {config.wave_times[0], config.wave_times[1]}},
          PeriodSpec{Period::kP2, {config.wave_times[1], config.wave_times[2]}}};
}

const std::array<std::string_view, kContinuousStatCount> kContinuousStatNames = {
    "mean", "median", "sd", "log_mean", "log_median", "log_sd", "invsq_mean", "invsq_median", "invsq_sd"};

const std::array<std::string_view, kBinaryStatCount> kBinaryStatNames = {
    "ones",           "proportion",    "defined",         "missing",       "transitions",
    "span_count",     "span_min",      "span_max",        "span_mean",     "span_median",
    "span_sd",        "span_sum",      "span_log_mean",   "span_log_median", "span_log_sd",
    "gap_count",      "gap_min",       "gap_max",         "gap_mean",      "gap_median",
    "gap_sd",         "gap_sum",       "gap_log_mean",    "gap_log_median", "gap_log_sd"};

namespace {

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // sample SD; 0 for a single value
};

// Reorders `v`.
Summary summarize(std::vector<double>& v) {
  Summary s;
  const std::size_t n = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  s.median = *mid;
  if (n % 2 == 0) s.median = 0.5 * (s.median + *std::max_element(v.begin(), mid));
  return s;
}

inline double clamped_log(double x) { return x < 1.0 ? 0.0 : std::log(x); }

inline double capped_inverse_square(double d) {
  if (d == 0.0) return kInverseSquareCap;
  return std::min(1.0 / (d * d), kInverseSquareCap);
}

}  // namespace

std::array<double, kContinuousStatCount> continuous_stats(std::span<const double> distances) {
  std::array<double, kContinuousStatCount> out;
  thread_local std::vector<double> raw, logs, inv;
  raw.clear();
  for (double d : distances) {
    if (!is_missing(d)) raw.push_back(d);
  }
  if (raw.empty()) {
    out.fill(kMissing);
    return out;
  }
  logs.resize(raw.size());
  inv.resize(raw.size());
  std::transform(raw.begin(), raw.end(), logs.begin(), clamped_log);
  std::transform(raw.begin(), raw.end(), inv.begin(), capped_inverse_square);
  std::size_t i = 0;
  for (auto* v : {&raw, &logs, &inv}) {
    const Summary s = summarize(*v);
    out[i++] = s.mean;
    out[i++] = s.median;
    out[i++] = s.sd;
  }
  return out;
}

namespace {

// Ten run statistics starting at out[offset].
void run_stats(std::vector<double>& lengths, std::array<StatCell, kBinaryStatCount>& out, std::size_t offset) {
  const std::size_t n = lengths.size();
  out[offset + 0] = {static_cast<double>(n), CellState::kValue};
  out[offset + 6] = {std::accumulate(lengths.begin(), lengths.end(), 0.0), CellState::kValue};
  if (n == 0) {
    for (std::size_t i : {1, 2, 3, 4, 5, 7, 8, 9}) out[offset + i] = {0.0, CellState::kArtifact};
    return;
  }
  const auto [mn, mx] = std::minmax_element(lengths.begin(), lengths.end());
  out[offset + 1] = {*mn, CellState::kValue};
  out[offset + 2] = {*mx, CellState::kValue};
  std::vector<double> logs(n);
  std::transform(lengths.begin(), lengths.end(), logs.begin(), [](double x) { return std::log(x); });
  const Summary s = summarize(lengths);
  const Summary l = summarize(logs);
  const CellState sd_state = n > 1 ? CellState::kValue : CellState::kArtifact;
  out[offset + 3] = {s.mean, CellState::kValue};
  out[offset + 4] = {s.median, CellState::kValue};
  out[offset + 5] = {s.sd, sd_state};
  out[offset + 7] = {l.mean, CellState::kValue};
  out[offset + 8] = {l.median, CellState::kValue};
  out[offset + 9] = {l.sd, sd_state};
}

}  // namespace

std::array<StatCell, kBinaryStatCount> binary_stats_raw(std::span<const Obs> series) {
  std::array<StatCell, kBinaryStatCount> out{};
  std::size_t ones = 0, defined = 0, missing = 0, transitions = 0;
  thread_local std::vector<double> spans, gaps;
  spans.clear();
  gaps.clear();
  Obs prev = Obs::kMissing;
  std::size_t run = 0;
  auto close_run = [&] {
    if (run > 0) (prev == Obs::kTrue ? spans : gaps).push_back(static_cast<double>(run));
    run = 0;
  };
  for (Obs o : series) {
    if (o == Obs::kMissing) {
      ++missing;
      close_run();
      prev = Obs::kMissing;
      continue;
    }
    ++defined;
    if (o == Obs::kTrue) ++ones;
    if (prev != Obs::kMissing && prev != o) {
      ++transitions;
      close_run();
    }
    prev = o;
    ++run;
  }
  close_run();

  if (defined == 0) {
    for (auto& c : out) c = {0.0, CellState::kMissing};
    return out;
  }
  out[0] = {static_cast<double>(ones), CellState::kValue};
  out[1] = {static_cast<double>(ones) / static_cast<double>(defined), CellState::kValue};
  out[2] = {static_cast<double>(defined), CellState::kValue};
  out[3] = {static_cast<double>(missing), CellState::kValue};
  out[4] = {static_cast<double>(transitions), CellState::kValue};
  run_stats(spans, out, 5);
  run_stats(gaps, out, 15);
  return out;
}

std::array<double, kBinaryStatCount> artifact_substitute(const std::array<StatCell, kBinaryStatCount>& raw,
                                                         const SubstitutionPolicy& policy) {
  std::array<double, kBinaryStatCount> out;
  for (std::size_t i = 0; i < kBinaryStatCount; ++i) {
    switch (raw[i].state) {
      case CellState::kValue:
        out[i] = raw[i].value;
        break;
      case CellState::kMissing:
        out[i] = kMissing;
        break;
      case CellState::kArtifact: {
        const std::size_t block = i < 15 ? 5 : 15;  // span or gap block
        const bool no_runs = raw[block].value == 0.0;
        out[i] = no_runs ? policy.empty_runs : policy.single_run_sd;
        break;
      }
    }
  }
  return out;
}

std::array<double, kBinaryStatCount> binary_stats(std::span<const Obs> series) {
  return artifact_substitute(binary_stats_raw(series));
}

// ---------------------------------------------------------------------------

FeatureSchema FeatureSchema::standard(bool with_wifi) {
  FeatureSchema s;
  s.binary_series = all_binary_series(with_wifi);
  return s;
}

std::size_t FeatureSchema::column_count() const {
  return timeframes.size() * ((distance ? kContinuousStatCount : 0) + binary_series.size() * kBinaryStatCount);
}

std::vector<std::string> FeatureSchema::column_names() const {
  std::vector<std::string> names;
  names.reserve(column_count());
  if (distance) {
    for (Timeframe tf : timeframes) {
      for (auto stat : kContinuousStatNames) {
        names.push_back("distance." + std::string(stat) + "." + std::string(to_string(tf)));
      }
    }
  }
  for (BinarySeries s : binary_series) {
    const std::string series = series_name(s);
    for (Timeframe tf : timeframes) {
      for (auto stat : kBinaryStatNames) {
        names.push_back(series + "." + std::string(stat) + "." + std::string(to_string(tf)));
      }
    }
  }
  return names;
}

namespace {
std::uint64_t hash_columns(const std::vector<std::string>& cols) {
  std::uint64_t h = fnv1a64("");
  for (const auto& c : cols) {
    h = fnv1a64(c, h);
    h = fnv1a64("\n", h);
  }
  return h;
}
}  // namespace

std::uint64_t FeatureSchema::hash() const { return hash_columns(column_names()); }

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json series = nlohmann::json::array();
  if (distance) series.push_back("distance");
  for (auto s : binary_series) series.push_back(series_name(s));
  nlohmann::json tfs = nlohmann::json::array();
  for (auto tf : timeframes) tfs.push_back(to_string(tf));
  return {{"series", series},
          {"timeframes", tfs},
          {"continuous_stats", kContinuousStatNames},
          {"binary_stats", kBinaryStatNames},
          {"column_count", column_count()},
          {"schema_hash", hex64(hash())}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
  FeatureSchema s;
  s.distance = false;
  s.binary_series.clear();
  s.timeframes.clear();
  try {
    for (const auto& name : j.at("series")) {
      const auto n = name.get<std::string>();
      if (n == "distance") {
        s.distance = true;
        continue;
      }
      bool found = false;
      for (std::size_t i = 0; i < kBinarySeriesCount && !found; ++i) {
        if (series_name(static_cast<BinarySeries>(i)) == n) {
          s.binary_series.push_back(static_cast<BinarySeries>(i));
          found = true;
        }
      }
      if (!found) throw InputError("schema: unknown series '" + n + "'");
    }
    for (const auto& name : j.at("timeframes")) {
      const auto tf = parse_timeframe(name.get<std::string>());
      if (!tf) throw InputError("schema: unknown timeframe");
      s.timeframes.push_back(*tf);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("schema: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------

FeatureMatrix::FeatureMatrix(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::uint64_t FeatureMatrix::schema_hash() const { return hash_columns(columns_); }

void FeatureMatrix::append(RowKey key, std::span<const double> values) {
  if (values.size() != cols()) throw InvariantError("feature row width does not match the schema");
  if (!lookup_.emplace(std::pair(key.dyad, key.period), keys_.size()).second) {
    throw InputError("duplicate feature row for " + key.dyad.a + "," + key.dyad.b);
  }
  keys_.push_back(std::move(key));
  values_.insert(values_.end(), values.begin(), values.end());
}

std::size_t FeatureMatrix::find(const Dyad& dyad, Period period) const {
  auto it = lookup_.find(std::pair(dyad, period));
  return it == lookup_.end() ? npos : it->second;
}

std::string FeatureMatrix::to_csv() const {
  std::string out = "dyad_a,dyad_b,period";
  for (const auto& c : columns_) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    out += keys_[r].dyad.a;
    out += ',';
    out += keys_[r].dyad.b;
    out += ',';
    out += to_string(keys_[r].period);
    for (double v : row(r)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix FeatureMatrix::from_csv(std::string_view text) {
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      line = text.substr(pos, end - pos);
      pos = end + 1;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  std::string_view line;
  if (!next_line(line)) throw InputError("feature matrix: empty file");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "dyad_a" || header[1] != "dyad_b" || header[2] != "period") {
    throw InputError("feature matrix: header must start with dyad_a,dyad_b,period");
  }
  FeatureMatrix m(std::vector<std::string>(header.begin() + 3, header.end()));
  std::vector<double> values(m.cols());
  std::size_t row = 1;
  while (next_line(line)) {
    ++row;
    const auto f = split_csv(line);
    if (f.size() != header.size()) throw InputError("feature matrix: row " + std::to_string(row) + " width mismatch");
    const auto period = parse_period(f[2]);
    if (!period) throw InputError("feature matrix: bad period on row " + std::to_string(row));
    for (std::size_t c = 0; c < m.cols(); ++c) values[c] = parse_double(f[c + 3]);
    m.append(RowKey{Dyad::of(f[0], f[1]), *period}, values);
  }
  return m;
}

// ---------------------------------------------------------------------------

ExtractionPlan::ExtractionPlan(const BinIndex& bins, const StudyConfig& config, FeatureSchema schema)
    : schema_(std::move(schema)), n_bins_(bins.size()) {
  const TimeframeClassifier classifier(config.timezone);
  const auto periods = study_periods(config);
  for (auto& per_period : bins_) per_period.assign(schema_.timeframes.size(), {});
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const TimestampMs t = bins.start(b);
    const std::uint8_t mask = classifier.mask(t);
    for (const auto& p : periods) {
      if (!p.window.contains(t)) continue;
      for (std::size_t slot = 0; slot < schema_.timeframes.size(); ++slot) {
        if ((mask >> static_cast<unsigned>(schema_.timeframes[slot])) & 1u) {
          bins_[static_cast<std::size_t>(p.period)][slot].push_back(static_cast<std::uint32_t>(b));
        }
      }
    }
  }
}

void extract_row(const DyadSeries& series, const ExtractionPlan& plan, Period period, std::span<double> out) {
  const FeatureSchema& schema = plan.schema();
  if (out.size() != schema.column_count()) throw InvariantError("output span does not match the schema");
  if (series.size() != plan.bin_count()) throw InputError("dyad series does not match the bin layout");
  std::size_t col = 0;
  thread_local std::vector<double> dist;
  thread_local std::vector<Obs> bits;
  if (schema.distance) {
    for (std::size_t slot = 0; slot < schema.timeframes.size(); ++slot) {
      const auto& idx = plan.bins(period, slot);
      dist.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) dist[i] = series.distance[idx[i]];
      const auto stats = continuous_stats(dist);
      std::copy(stats.begin(), stats.end(), out.begin() + static_cast<std::ptrdiff_t>(col));
      col += stats.size();
    }
  }
  for (BinarySeries s : schema.binary_series) {
    const auto& src = series.series(s);
    for (std::size_t slot = 0; slot < schema.timeframes.size(); ++slot) {
      const auto& idx = plan.bins(period, slot);
      bits.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) bits[i] = src[idx[i]];
      const auto stats = binary_stats(bits);
      std::copy(stats.begin(), stats.end(), out.begin() + static_cast<std::ptrdiff_t>(col));
      col += stats.size();
    }
  }
}

std::vector<std::vector<double>> extract(const DyadSeries& series, const ExtractionPlan& plan) {
  std::vector<std::vector<double>> rows;
  for (Period p : {Period::kP1, Period::kP2}) {
    rows.emplace_back(plan.schema().column_count());
    extract_row(series, plan, p, rows.back());
  }
  return rows;
}

FeatureMatrix extract_all(const GridSet& grids, std::span<const Dyad> dyads, const DyadContext& ctx,
                          const ExtractionPlan& plan, unsigned jobs) {
  const std::size_t width = plan.schema().column_count();
  std::vector<double> values(dyads.size() * 2 * width);
  parallel_for(dyads.size(), jobs, [&](std::size_t i) {
    const TimelineGrid* a = grids.find(dyads[i].a);
    const TimelineGrid* b = grids.find(dyads[i].b);
    if (!a || !b) throw InputError("no grid for dyad " + dyads[i].a + "," + dyads[i].b);
    thread_local DyadSeries series;
    build_dyad_series(*a, *b, ctx, series);
    for (Period p : {Period::kP1, Period::kP2}) {
      const std::size_t row = 2 * i + static_cast<std::size_t>(p);
      extract_row(series, plan, p, std::span(values).subspan(row * width, width));
    }
  });
  FeatureMatrix m(plan.schema().column_names());
  for (std::size_t i = 0; i < dyads.size(); ++i) {
    for (Period p : {Period::kP1, Period::kP2}) {
      const std::size_t row = 2 * i + static_cast<std::size_t>(p);
      m.append(RowKey{dyads[i], p}, std::span(values).subspan(row * width, width));
    }
  }
  return m;
}

}  // namespace coloc
