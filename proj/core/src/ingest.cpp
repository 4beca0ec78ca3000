#include "coloc/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <tuple>

namespace coloc {

namespace fs = std::filesystem;

std::string_view to_string(TieType t) {
  switch (t) {
    case TieType::kInteract: return "interact";
    case TieType::kFriend: return "friend";
    case TieType::kCloseFriend: return "close_friend";
    case TieType::kAdvicePersonal: return "advice_personal";
    case TieType::kAdviceProfessional: return "advice_professional";
  }
  return "unknown";
}

std::optional<TieType> parse_tie_type(std::string_view s) {
  for (TieType t : kAllTieTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::size_t IngestReport::rejected_in(std::string_view file) const {
  return static_cast<std::size_t>(
      std::count_if(rejected.begin(), rejected.end(), [&](const RejectedRow& r) { return r.file == file; }));
}

nlohmann::json IngestReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rejected) rows.push_back({{"file", r.file}, {"line", r.line}, {"reason", r.reason}});
  return {{"location_rows", location_rows},
          {"wifi_rows", wifi_rows},
          {"survey_rows", survey_rows},
          {"rejected", rows},
          {"warnings", warnings}};
}

namespace {

// Walks the lines of a CSV text, checking the header once.
class CsvReader {
 public:
  CsvReader(std::string_view text, std::string_view label, std::string_view expected_header)
      : text_(text), label_(label) {
    std::string_view header;
    if (!next_raw(header)) throw InputError(std::string(label_) + ": missing header");
    if (trim(header) != expected_header) {
      throw InputError(std::string(label_) + ": unexpected header '" + std::string(trim(header)) +
                       "', expected '" + std::string(expected_header) + "'");
    }
  }

  /// Next non-blank record; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    std::string_view line;
    while (next_raw(line)) {
      if (trim(line).empty()) continue;
      fields = split_csv(line);
      return true;
    }
    return false;
  }

  std::size_t line_number() const { return line_; }

 private:
  bool next_raw(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t nl = text_.find('\n', pos_);
    const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
    line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_;
    return true;
  }

  std::string_view text_;
  std::string_view label_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

void reject(IngestReport& report, std::string_view label, std::size_t line, std::string reason) {
  report.rejected.push_back({std::string(label), line, std::move(reason)});
}

}  // namespace

std::vector<LocationSample> parse_locations(std::string_view text, std::string_view label, IngestReport& report) {
  CsvReader reader(text, label, "device_id,timestamp_ms,lat,lon,accuracy_m");
  std::vector<LocationSample> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    ++report.location_rows;
    const std::size_t line = reader.line_number();
    if (f.size() != 5 && f.size() != 4) {
      reject(report, label, line, "expected 5 fields, got " + std::to_string(f.size()));
      continue;
    }
    try {
      LocationSample s;
      s.device_id = std::string(f[0]);
      if (s.device_id.empty()) throw InputError("empty device_id");
      s.timestamp = parse_int(f[1]);
      s.latitude = parse_double(f[2]);
      s.longitude = parse_double(f[3]);
      if (is_missing(s.latitude) || is_missing(s.longitude)) throw InputError("blank coordinate");
      if (s.latitude < -90.0 || s.latitude > 90.0) throw InputError("latitude out of range");
      if (s.longitude < -180.0 || s.longitude > 180.0) throw InputError("longitude out of range");
      if (f.size() == 5) {
        const double acc = parse_double(f[4]);
        if (!is_missing(acc)) {
          if (acc < 0) throw InputError("negative accuracy");
          s.accuracy_m = acc;
        }
      }
      out.push_back(std::move(s));
    } catch (const InputError& e) {
      reject(report, label, line, e.what());
    }
  }
  if (out.empty()) report.warnings.push_back(std::string(label) + ": no location samples");
  return out;
}

std::vector<WifiObservation> parse_wifi(std::string_view text, std::string_view label, IngestReport& report) {
  CsvReader reader(text, label, "device_id,timestamp_ms,hotspot_id");
  std::vector<WifiObservation> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    ++report.wifi_rows;
    const std::size_t line = reader.line_number();
    if (f.size() != 3) {
      reject(report, label, line, "expected 3 fields, got " + std::to_string(f.size()));
      continue;
    }
    try {
      WifiObservation w;
      w.device_id = std::string(f[0]);
      if (w.device_id.empty()) throw InputError("empty device_id");
      w.timestamp = parse_int(f[1]);
      w.hotspot_id = std::string(f[2]);
      if (w.hotspot_id.empty()) throw InputError("empty hotspot_id");
      out.push_back(std::move(w));
    } catch (const InputError& e) {
      reject(report, label, line, e.what());
    }
  }
  if (out.empty()) report.warnings.push_back(std::string(label) + ": no wifi observations");
  return out;
}

std::vector<SurveyTie> parse_surveys(std::string_view text, std::string_view label,
                                     std::span<const std::string> roster, IngestReport& report) {
  CsvReader reader(text, label, "wave,ego,alter,tie_type,value");
  const std::set<std::string, std::less<>> known(roster.begin(), roster.end());
  std::set<std::tuple<int, std::string, std::string, TieType>> seen;
  std::vector<SurveyTie> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    ++report.survey_rows;
    const std::size_t line = reader.line_number();
    if (f.size() != 5) {
      reject(report, label, line, "expected 5 fields, got " + std::to_string(f.size()));
      continue;
    }
    try {
      SurveyTie t;
      const auto wave = parse_int(f[0]);
      if (wave < 1 || wave > 3) throw InputError("wave must be 1, 2 or 3");
      t.wave = static_cast<int>(wave);
      t.ego = std::string(f[1]);
      t.alter = std::string(f[2]);
      if (t.ego.empty() || t.alter.empty()) throw InputError("empty node id");
      if (t.ego == t.alter) throw InputError("ego equals alter");
      const auto type = parse_tie_type(f[3]);
      if (!type) throw InputError("unknown tie_type '" + std::string(f[3]) + "'");
      t.tie_type = *type;
      const auto value = parse_int(f[4]);
      if (value != 0 && value != 1) throw InputError("value must be 0 or 1");
      t.value = static_cast<int>(value);
      if (!known.empty() && (!known.contains(t.ego) || !known.contains(t.alter))) {
        throw InputError("node not in roster");
      }
      if (!seen.emplace(t.wave, t.ego, t.alter, t.tie_type).second) throw InputError("duplicate survey row");
      out.push_back(std::move(t));
    } catch (const InputError& e) {
      reject(report, label, line, e.what());
    }
  }
  if (out.empty()) report.warnings.push_back(std::string(label) + ": no survey ties");
  return out;
}

ParsedInputs parse_inputs(const std::string& location_file, const std::string& wifi_file,
                          const std::string& survey_file, const StudyConfig& config) {
  ParsedInputs in;
  in.locations = parse_locations(read_file(location_file), location_file, in.report);
  in.wifi = parse_wifi(read_file(wifi_file), wifi_file, in.report);
  in.ties = parse_surveys(read_file(survey_file), survey_file, config.nodes, in.report);
  return in;
}

// ---------------------------------------------------------------------------

BinIndex::BinIndex(const StudyConfig& config) : origin_(config.study_start), width_(config.bin_width) {
  const TimestampMs slots = (config.study_end - config.study_start) / width_;
  slot_to_bin_.assign(static_cast<std::size_t>(slots), -1);
  for (TimestampMs k = 0; k < slots; ++k) {
    const TimestampMs s = origin_ + k * width_;
    const bool excluded = std::any_of(config.exclusion_windows.begin(), config.exclusion_windows.end(),
                                      [&](const TimeWindow& w) { return w.overlaps(s, s + width_); });
    if (excluded) continue;
    slot_to_bin_[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(starts_.size());
    starts_.push_back(s);
  }
}

std::optional<std::size_t> BinIndex::locate(TimestampMs t) const {
  if (t < origin_) return std::nullopt;
  const auto slot = static_cast<std::size_t>((t - origin_) / width_);
  if (slot >= slot_to_bin_.size() || slot_to_bin_[slot] < 0) return std::nullopt;
  return static_cast<std::size_t>(slot_to_bin_[slot]);
}

std::uint32_t HotspotDictionary::intern(std::string_view id) {
  auto it = ids_.find(std::string(id));
  if (it != ids_.end()) return it->second;
  const auto next = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(id);
  ids_.emplace(std::string(id), next);
  return next;
}

std::optional<std::uint32_t> HotspotDictionary::find(std::string_view id) const {
  auto it = ids_.find(std::string(id));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t TimelineGrid::missing_locations() const {
  return static_cast<std::size_t>(std::count_if(lat.begin(), lat.end(), [](double v) { return is_missing(v); }));
}

const TimelineGrid* GridSet::find(std::string_view device_id) const {
  auto it = std::lower_bound(grids.begin(), grids.end(), device_id,
                             [](const TimelineGrid& g, std::string_view id) { return g.device_id < id; });
  if (it == grids.end() || it->device_id != device_id) return nullptr;
  return &*it;
}

namespace {

void build_csr(TimelineGrid& g, std::vector<std::pair<std::uint32_t, std::uint32_t>>& bin_hotspot, std::size_t bins) {
  std::sort(bin_hotspot.begin(), bin_hotspot.end());
  bin_hotspot.erase(std::unique(bin_hotspot.begin(), bin_hotspot.end()), bin_hotspot.end());
  g.hotspot_offsets.assign(bins + 1, 0);
  g.hotspot_ids.clear();
  g.hotspot_ids.reserve(bin_hotspot.size());
  for (const auto& [bin, id] : bin_hotspot) {
    ++g.hotspot_offsets[bin + 1];
    g.hotspot_ids.push_back(id);
  }
  for (std::size_t b = 0; b < bins; ++b) g.hotspot_offsets[b + 1] += g.hotspot_offsets[b];
}

}  // namespace

GridSet build_grids(std::span<const LocationSample> samples, std::span<const WifiObservation> wifi,
                    const StudyConfig& config, std::span<const std::string> extra_devices, GridStats* stats) {
  GridStats local;
  GridStats& st = stats ? *stats : local;
  GridSet set;
  set.bins = std::make_shared<BinIndex>(config);
  set.hotspots = std::make_shared<HotspotDictionary>();
  const BinIndex& bins = *set.bins;
  const std::size_t n_bins = bins.size();

  std::set<std::string, std::less<>> device_names(extra_devices.begin(), extra_devices.end());
  for (const auto& s : samples) device_names.insert(s.device_id);
  for (const auto& w : wifi) device_names.insert(w.device_id);
  std::map<std::string, std::size_t, std::less<>> device_index;
  for (const auto& d : device_names) {
    device_index.emplace(d, set.grids.size());
    TimelineGrid g;
    g.device_id = d;
    g.lat.assign(n_bins, kMissing);
    g.lon.assign(n_bins, kMissing);
    set.grids.push_back(std::move(g));
  }

  // Interning in sorted order makes hotspot ids independent of row order.
  std::set<std::string_view> hotspot_names;
  for (const auto& w : wifi) hotspot_names.insert(w.hotspot_id);
  for (auto name : hotspot_names) set.hotspots->intern(name);

  constexpr TimestampMs kNone = std::numeric_limits<TimestampMs>::max();
  std::vector<std::vector<TimestampMs>> best_offset(set.grids.size());
  std::vector<std::size_t> sample_count(set.grids.size(), 0);
  const TimeWindow window = config.study_window();
  for (const auto& s : samples) {
    if (config.min_accuracy_m && s.accuracy_m && *s.accuracy_m > *config.min_accuracy_m) {
      ++st.readings_below_accuracy;
      continue;
    }
    if (!window.contains(s.timestamp)) {
      ++st.readings_outside_window;
      continue;
    }
    const auto bin = bins.locate(s.timestamp);
    if (!bin) {
      ++st.readings_excluded;
      continue;
    }
    const std::size_t d = device_index.find(s.device_id)->second;
    auto& best = best_offset[d];
    if (best.empty()) best.assign(n_bins, kNone);
    ++sample_count[d];
    TimelineGrid& g = set.grids[d];
    const TimestampMs offset = s.timestamp - bins.start(*bin);
    const bool better =
        offset < best[*bin] ||
        (offset == best[*bin] && std::pair(s.latitude, s.longitude) < std::pair(g.lat[*bin], g.lon[*bin]));
    if (better) {
      best[*bin] = offset;
      g.lat[*bin] = s.latitude;
      g.lon[*bin] = s.longitude;
    }
  }

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> detections(set.grids.size());
  for (const auto& w : wifi) {
    if (!window.contains(w.timestamp)) continue;
    const auto bin = bins.locate(w.timestamp);
    if (!bin) continue;
    const std::size_t d = device_index.find(w.device_id)->second;
    detections[d].emplace_back(static_cast<std::uint32_t>(*bin), *set.hotspots->find(w.hotspot_id));
  }

  for (std::size_t d = 0; d < set.grids.size(); ++d) {
    TimelineGrid& g = set.grids[d];
    build_csr(g, detections[d], n_bins);
    g.no_samples = sample_count[d] == 0;
    if (config.lvcf_max > 0) {
      // Carry only from genuine readings, never from a carried bin.
      const auto& best = best_offset[d];
      std::optional<std::size_t> last;
      for (std::size_t b = 0; b < n_bins && !best.empty(); ++b) {
        if (best[b] != kNone) {
          last = b;
          continue;
        }
        if (last && bins.start(b) - bins.start(*last) <= config.lvcf_max) {
          g.lat[b] = g.lat[*last];
          g.lon[b] = g.lon[*last];
          ++st.carried_forward_bins;
        }
      }
    }
  }
  return set;
}

std::string grid_to_csv(const TimelineGrid& grid, const GridSet& set) {
  std::string out = "bin_start_ms,lat,lon,hotspot_ids\n";
  std::vector<std::string_view> names;
  for (std::size_t b = 0; b < grid.size(); ++b) {
    out += std::to_string(set.bins->start(b));
    out += ',';
    out += format_double(grid.lat[b]);
    out += ',';
    out += format_double(grid.lon[b]);
    out += ',';
    names.clear();
    for (auto id : grid.hotspots(b)) names.push_back(set.hotspots->name(id));
    std::sort(names.begin(), names.end());
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += ';';
      out += names[i];
    }
    out += '\n';
  }
  return out;
}

TimelineGrid grid_from_csv(std::string_view text, std::string device_id, GridSet& set) {
  CsvReader reader(text, device_id, "bin_start_ms,lat,lon,hotspot_ids");
  const BinIndex& bins = *set.bins;
  TimelineGrid g;
  g.device_id = std::move(device_id);
  g.lat.reserve(bins.size());
  g.lon.reserve(bins.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> detections;
  std::vector<std::string_view> f;
  std::size_t b = 0;
  while (reader.next(f)) {
    if (f.size() != 4) throw InputError(g.device_id + ": malformed grid row");
    if (b >= bins.size() || parse_int(f[0]) != bins.start(b)) {
      throw InputError(g.device_id + ": grid bins do not match the configured layout");
    }
    const double lat = parse_double(f[1]);
    const double lon = parse_double(f[2]);
    if (is_missing(lat) != is_missing(lon)) throw InputError(g.device_id + ": half-missing location");
    g.lat.push_back(lat);
    g.lon.push_back(lon);
    std::string_view rest = f[3];
    while (!rest.empty()) {
      const std::size_t semi = rest.find(';');
      const std::string_view name = rest.substr(0, semi);
      if (!name.empty()) detections.emplace_back(static_cast<std::uint32_t>(b), set.hotspots->intern(name));
      if (semi == std::string_view::npos) break;
      rest.remove_prefix(semi + 1);
    }
    ++b;
  }
  if (b != bins.size()) throw InputError(g.device_id + ": grid has " + std::to_string(b) + " bins, expected " +
                                         std::to_string(bins.size()));
  build_csr(g, detections, bins.size());
  return g;
}

void write_grids(const std::string& dir, const GridSet& set) {
  fs::create_directories(dir);
  std::string index = "file,device_id,no_samples\n";
  for (std::size_t i = 0; i < set.grids.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "device_%05zu.csv", i);
    write_file((fs::path(dir) / name).string(), grid_to_csv(set.grids[i], set));
    index += std::string(name) + "," + set.grids[i].device_id + "," + (set.grids[i].no_samples ? "1" : "0") + "\n";
  }
  write_file((fs::path(dir) / "index.csv").string(), index);
}

GridSet read_grids(const std::string& dir, const StudyConfig& config) {
  const fs::path index_path = fs::path(dir) / "index.csv";
  if (!fs::exists(index_path)) throw MissingArtifactError("ingest", "missing grid index " + index_path.string());
  GridSet set;
  set.bins = std::make_shared<BinIndex>(config);
  set.hotspots = std::make_shared<HotspotDictionary>();
  const std::string index = read_file(index_path.string());
  CsvReader reader(index, index_path.string(), "file,device_id,no_samples");
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 3) throw InputError("malformed grid index");
    TimelineGrid g = grid_from_csv(read_file((fs::path(dir) / std::string(f[0])).string()), std::string(f[1]), set);
    g.no_samples = f[2] == "1";
    set.grids.push_back(std::move(g));
  }
  std::sort(set.grids.begin(), set.grids.end(),
            [](const TimelineGrid& a, const TimelineGrid& b) { return a.device_id < b.device_id; });
  return set;
}

std::vector<SurvivalPoint> coverage_survival(const GridSet& set) {
  const BinIndex& bins = *set.bins;
  const TimestampMs w = bins.width();
  std::map<std::size_t, std::size_t> run_counts;  // run length (bins) -> occurrences
  std::size_t total_bins = 0;
  for (const auto& g : set.grids) {
    if (g.no_samples) continue;
    total_bins += g.size();
    std::size_t run = 0;
    for (std::size_t b = 0; b < g.size(); ++b) {
      const bool contiguous = b == 0 || bins.start(b) - bins.start(b - 1) == w;
      if (!contiguous && run > 0) {
        ++run_counts[run];
        run = 0;
      }
      if (g.has_location(b)) {
        if (run > 0) ++run_counts[run];
        run = 0;
      } else {
        ++run;
      }
    }
    if (run > 0) ++run_counts[run];
  }
  std::vector<SurvivalPoint> curve;
  if (total_bins == 0) return {{0, 0.0}};
  // Missing bins in runs strictly longer than each length, accumulated from the top.
  std::size_t above = 0;
  std::vector<std::pair<std::size_t, std::size_t>> rev;
  for (auto it = run_counts.rbegin(); it != run_counts.rend(); ++it) {
    rev.emplace_back(it->first, above);
    above += it->first * it->second;
  }
  const double total = static_cast<double>(total_bins);
  curve.push_back({0, static_cast<double>(above) / total});
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    curve.push_back({static_cast<TimestampMs>(it->first) * w, static_cast<double>(it->second) / total});
  }
  return curve;
}

std::string survey_to_csv(std::span<const SurveyTie> ties) {
  std::string out = "wave,ego,alter,tie_type,value\n";
  for (const auto& t : ties) {
    out += std::to_string(t.wave) + "," + t.ego + "," + t.alter + "," + std::string(to_string(t.tie_type)) + "," +
           std::to_string(t.value) + "\n";
  }
  return out;
}

}  // namespace coloc
