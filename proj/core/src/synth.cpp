#include "coloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "coloc/geodyads.hpp"

namespace coloc {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError(std::string("synth: ") + name + " must be in [0, 1]");
}

constexpr double kMetersPerDegree = 111320.0;

GeoPoint offset_m(GeoPoint origin, double north_m, double east_m) {
  const double rad = origin.lat * 3.14159265358979323846 / 180.0;
  return {origin.lat + north_m / kMetersPerDegree, origin.lon + east_m / (kMetersPerDegree * std::cos(rad))};
}

GeoPoint ring_point(Rng& rng, GeoPoint center, double r_min, double r_max) {
  const double angle = rng.uniform() * 2.0 * 3.14159265358979323846;
  const double r = r_min + (r_max - r_min) * rng.uniform();
  return offset_m(center, r * std::cos(angle), r * std::sin(angle));
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

// Campus and house sizes, meters.
constexpr double kCampusHalfM = 750.0;
constexpr double kHouseNorthM = 1300.0;
constexpr double kHouseHalfM = 45.0;

struct Place {
  GeoPoint point;
  std::vector<std::string> hotspots;
};

enum class PlaceKind { kHouse, kCampus, kTown, kHome, kFar };

struct World {
  std::vector<Place> places;
  std::size_t house = 0;
  std::vector<std::size_t> campus, town, far;
  std::vector<std::size_t> home;  // per node
};

World build_world(const SynthConfig& cfg, const std::vector<bool>& resident) {
  Rng rng(cfg.seed, "world");
  World w;
  auto add = [&](GeoPoint p, const std::string& tag, std::size_t aps) {
    Place pl{p, {}};
    for (std::size_t i = 0; i < aps; ++i) pl.hotspots.push_back("ap_" + tag + "_" + std::to_string(i));
    w.places.push_back(std::move(pl));
    return w.places.size() - 1;
  };
  w.house = add(offset_m(cfg.campus_center, kHouseNorthM, 0.0), "house", 4);
  for (std::size_t k = 0; k < cfg.campus_spots; ++k) {
    const double n = (rng.uniform() * 2.0 - 1.0) * kCampusHalfM * 0.8;
    const double e = (rng.uniform() * 2.0 - 1.0) * kCampusHalfM * 0.8;
    w.campus.push_back(add(offset_m(cfg.campus_center, n, e), "campus" + std::to_string(k), 3));
  }
  for (std::size_t k = 0; k < cfg.town_spots; ++k) {
    GeoPoint p = ring_point(rng, cfg.campus_center, 1200.0, 2600.0);
    w.town.push_back(add(p, "town" + std::to_string(k), 3));
  }
  for (std::size_t k = 0; k < 4; ++k) {
    w.far.push_back(add(ring_point(rng, cfg.campus_center, 10000.0, 40000.0), "far" + std::to_string(k), 2));
  }
  const GeoPoint house_point = w.places[w.house].point;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
    if (resident[i]) {
      w.home.push_back(w.house);
      continue;
    }
    GeoPoint p;
    do {
      p = ring_point(rng, cfg.campus_center, 1100.0, 3200.0);
    } while (haversine_m(p, house_point) < 300.0);
    w.home.push_back(add(p, "home_" + synth_node_id(i), 2));
  }
  return w;
}

std::vector<bool> residents_of(const SynthConfig& cfg) {
  Rng rng(cfg.seed, "residents");
  std::vector<std::size_t> idx(cfg.n_nodes);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx.begin(), idx.end());
  std::vector<bool> out(cfg.n_nodes, false);
  for (std::size_t k = 0; k < std::min(cfg.residents, cfg.n_nodes); ++k) out[idx[k]] = true;
  return out;
}

}  // namespace

std::string synth_node_id(std::size_t i) {
  std::string digits = std::to_string(i + 1);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "n" + digits;
}

void SynthConfig::validate() const {
  if (n_nodes < 2) throw InputError("synth: n_nodes must be at least 2");
  check_probability(base_tie_prob, "base_tie_prob");
  check_probability(reciprocity_boost, "reciprocity_boost");
  check_probability(close_fraction, "close_fraction");
  check_probability(change_rate, "change_rate");
  check_probability(co_location_lift, "co_location_lift");
  check_probability(missing_rate, "missing_rate");
  check_probability(wifi_scan_prob, "wifi_scan_prob");
  check_probability(nonresponse_rate, "nonresponse_rate");
  if (missing_rate >= 1.0) throw InputError("synth: missing_rate must be below 1");
  if (!(noise_m >= 0.0)) throw InputError("synth: noise_m must be non-negative");
  if (!(mean_gap_bins >= 1.0)) throw InputError("synth: mean_gap_bins must be at least 1");
  if (period_days == 0) throw InputError("synth: period_days must be positive");
  if (campus_spots == 0 || town_spots == 0) throw InputError("synth: need at least one campus and town spot");
  if (bin_width <= 0 || kDayMs % bin_width != 0) throw InputError("synth: bin_width must divide 24h");
  for (auto [a, b] : exclusion_days) {
    if (a >= b || b > 2 * period_days) throw InputError("synth: exclusion day range outside the study");
  }
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig c;
  c.n_nodes = j.value("n_nodes", c.n_nodes);
  c.base_tie_prob = j.value("base_tie_prob", c.base_tie_prob);
  c.reciprocity_boost = j.value("reciprocity_boost", c.reciprocity_boost);
  c.close_fraction = j.value("close_fraction", c.close_fraction);
  c.change_rate = j.value("change_rate", c.change_rate);
  c.co_location_lift = j.value("co_location_lift", c.co_location_lift);
  c.noise_m = j.value("noise_m", c.noise_m);
  c.missing_rate = j.value("missing_rate", c.missing_rate);
  c.mean_gap_bins = j.value("mean_gap_bins", c.mean_gap_bins);
  c.wifi_scan_prob = j.value("wifi_scan_prob", c.wifi_scan_prob);
  c.nonresponse_rate = j.value("nonresponse_rate", c.nonresponse_rate);
  c.residents = j.value("residents", c.residents);
  c.campus_spots = j.value("campus_spots", c.campus_spots);
  c.town_spots = j.value("town_spots", c.town_spots);
  c.period_days = j.value("period_days", c.period_days);
  c.start_ms = j.value("start_ms", c.start_ms);
  c.timezone = j.value("timezone", c.timezone);
  if (j.contains("campus_center")) {
    c.campus_center = {j.at("campus_center").at("lat").get<double>(), j.at("campus_center").at("lon").get<double>()};
  }
  c.bin_width = j.value("bin_width_ms", c.bin_width);
  if (j.contains("exclusion_days")) {
    c.exclusion_days.clear();
    for (const auto& d : j.at("exclusion_days")) {
      c.exclusion_days.emplace_back(d.at(0).get<std::size_t>(), d.at(1).get<std::size_t>());
    }
  }
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

nlohmann::ordered_json SynthConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n_nodes"] = n_nodes;
  j["base_tie_prob"] = base_tie_prob;
  j["reciprocity_boost"] = reciprocity_boost;
  j["close_fraction"] = close_fraction;
  j["change_rate"] = change_rate;
  j["co_location_lift"] = co_location_lift;
  j["noise_m"] = noise_m;
  j["missing_rate"] = missing_rate;
  j["mean_gap_bins"] = mean_gap_bins;
  j["wifi_scan_prob"] = wifi_scan_prob;
  j["nonresponse_rate"] = nonresponse_rate;
  j["residents"] = residents;
  j["campus_spots"] = campus_spots;
  j["town_spots"] = town_spots;
  j["period_days"] = period_days;
  j["start_ms"] = start_ms;
  j["timezone"] = timezone;
  j["campus_center"] = {{"lat", campus_center.lat}, {"lon", campus_center.lon}};
  j["bin_width_ms"] = bin_width;
  nlohmann::ordered_json ex = nlohmann::ordered_json::array();
  for (auto [a, b] : exclusion_days) ex.push_back({a, b});
  j["exclusion_days"] = ex;
  j["seed"] = seed;
  return j;
}

StudyConfig synth_study_config(const SynthConfig& cfg) {
  cfg.validate();
  StudyConfig s;
  const TimestampMs period = static_cast<TimestampMs>(cfg.period_days) * kDayMs;
  s.study_start = cfg.start_ms;
  s.study_end = cfg.start_ms + 2 * period;
  s.wave_times = {cfg.start_ms, cfg.start_ms + period, cfg.start_ms + 2 * period};
  for (auto [a, b] : cfg.exclusion_days) {
    s.exclusion_windows.push_back({cfg.start_ms + static_cast<TimestampMs>(a) * kDayMs,
                                   cfg.start_ms + static_cast<TimestampMs>(b) * kDayMs});
  }
  s.bin_width = cfg.bin_width;
  s.timezone = cfg.timezone;
  const GeoPoint lo = offset_m(cfg.campus_center, -kCampusHalfM, -kCampusHalfM);
  const GeoPoint hi = offset_m(cfg.campus_center, kCampusHalfM, kCampusHalfM);
  s.campus_geobox = {lo.lat, hi.lat, lo.lon, hi.lon};
  const GeoPoint house = offset_m(cfg.campus_center, kHouseNorthM, 0.0);
  const GeoPoint hlo = offset_m(house, -kHouseHalfM, -kHouseHalfM);
  const GeoPoint hhi = offset_m(house, kHouseHalfM, kHouseHalfM);
  s.house_geobox = {hlo.lat, hhi.lat, hlo.lon, hhi.lon};
  for (int i = 0; i < 4; ++i) s.house_hotspots.push_back("ap_house_" + std::to_string(i));
  std::sort(s.house_hotspots.begin(), s.house_hotspots.end());
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) s.nodes.push_back(synth_node_id(i));
  s.validate();
  return s;
}

NetworkSet generate_networks(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) ids.push_back(synth_node_id(i));
  auto roster = std::make_shared<const Roster>(std::move(ids));
  NetworkSet set(roster);
  const std::size_t n = cfg.n_nodes;
  Rng ties(cfg.seed, "ties");
  Rng change(cfg.seed, "change");
  Rng closeness(cfg.seed, "close");
  Rng other(cfg.seed, "other_types");
  Rng response(cfg.seed, "response");

  std::vector<std::uint8_t> a(n * n, 0);
  const double p = cfg.base_tie_prob;
  const double p_back = p + cfg.reciprocity_boost * (1.0 - p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool forward = ties.bernoulli(p);
      const bool backward = ties.bernoulli(forward ? p_back : p);
      // Randomise which direction is drawn first.
      const bool swap = ties.bernoulli(0.5);
      a[i * n + j] = swap ? backward : forward;
      a[j * n + i] = swap ? forward : backward;
    }
  }
  std::vector<double> close_u(n * n);
  for (auto& u : close_u) u = closeness.uniform();

  for (int wave = 1; wave <= 3; ++wave) {
    if (wave > 1) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j && change.bernoulli(cfg.change_rate)) a[i * n + j] ^= 1;
        }
      }
    }
    std::vector<std::uint8_t> responds(n, 1);
    for (auto& r : responds) r = response.bernoulli(cfg.nonresponse_rate) ? 0 : 1;
    for (TieType type : kAllTieTypes) {
      TieNetwork& net = set.get(wave, type);
      for (std::size_t i = 0; i < n; ++i) net.respondent[i] = responds[i];
    }
    TieNetwork& friends = set.get(wave, TieType::kFriend);
    TieNetwork& close = set.get(wave, TieType::kCloseFriend);
    TieNetwork& interact = set.get(wave, TieType::kInteract);
    TieNetwork& personal = set.get(wave, TieType::kAdvicePersonal);
    TieNetwork& professional = set.get(wave, TieType::kAdviceProfessional);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const bool f = a[i * n + j] != 0;
        friends.set_tie(i, j, f);
        close.set_tie(i, j, f && close_u[i * n + j] < cfg.close_fraction);
        interact.set_tie(i, j, f || other.bernoulli(0.1));
        personal.set_tie(i, j, f && other.bernoulli(0.3));
        professional.set_tie(i, j, other.bernoulli(0.05));
      }
    }
  }
  return set;
}

std::vector<SurveyTie> network_ties(const NetworkSet& networks) {
  std::vector<SurveyTie> out;
  const Roster& roster = networks.roster();
  for (int wave = 1; wave <= 3; ++wave) {
    for (std::size_t i = 0; i < roster.size(); ++i) {
      for (std::size_t j = 0; j < roster.size(); ++j) {
        if (i == j) continue;
        for (TieType type : kAllTieTypes) {
          const TieNetwork* net = networks.find(wave, type);
          if (net == nullptr || !net->is_respondent(i)) continue;
          out.push_back(SurveyTie{wave, roster.id(i), roster.id(j), type, net->tie(i, j) ? 1 : 0});
        }
      }
    }
  }
  return out;
}

Traces generate_traces(const NetworkSet& networks, const SynthConfig& cfg) {
  cfg.validate();
  const StudyConfig study = synth_study_config(cfg);
  const std::size_t n = cfg.n_nodes;
  if (networks.roster().size() != n) throw InputError("synth: network roster does not match n_nodes");
  const auto resident = residents_of(cfg);
  const World world = build_world(cfg, resident);
  const TimeframeClassifier clock(cfg.timezone);

  struct Pair {
    std::size_t a, b;
    double strength;
  };
  std::array<std::vector<Pair>, 2> pairs;  // index 0: wave-2 network (P1), 1: wave-3 network (P2)
  for (int k = 0; k < 2; ++k) {
    const TieNetwork* f = networks.find(k + 2, TieType::kFriend);
    const TieNetwork* c = networks.find(k + 2, TieType::kCloseFriend);
    if (f == nullptr) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool fij = f->tie(i, j), fji = f->tie(j, i);
        if (!fij && !fji) continue;
        double s = (fij && fji) ? 1.0 : 0.5;
        if (c != nullptr && (c->tie(i, j) || c->tie(j, i))) s *= 1.5;
        pairs[static_cast<std::size_t>(k)].push_back({i, j, s});
      }
    }
  }

  const TimestampMs hour = kHourMs;
  const TimestampMs total = study.study_end - study.study_start;
  const auto slots = static_cast<std::size_t>((total + hour - 1) / hour);
  std::vector<std::uint32_t> place(slots * n);
  Rng mobility(cfg.seed, "mobility");
  std::vector<long> assigned(n);
  const auto night_bit = static_cast<unsigned>(Timeframe::kNight);
  const auto weekday_bit = static_cast<unsigned>(Timeframe::kWeekday);
  for (std::size_t s = 0; s < slots; ++s) {
    const TimestampMs t = study.study_start + static_cast<TimestampMs>(s) * hour;
    const std::uint8_t mask = clock.mask(t);
    const bool night = (mask >> night_bit) & 1u;
    const bool weekday = (mask >> weekday_bit) & 1u;
    std::fill(assigned.begin(), assigned.end(), -1);
    if (!night) {
      auto& list = pairs[t < study.wave_times[1] ? 0 : 1];
      mobility.shuffle(list.begin(), list.end());
      for (const auto& pr : list) {
        if (!mobility.bernoulli(std::min(1.0, cfg.co_location_lift * pr.strength))) continue;
        auto& pa = assigned[pr.a];
        auto& pb = assigned[pr.b];
        if (pa < 0 && pb < 0) {
          const bool on_campus = mobility.bernoulli(weekday ? 0.7 : 0.4);
          const auto& pool = on_campus ? world.campus : world.town;
          pa = pb = static_cast<long>(pool[mobility.below(pool.size())]);
        } else if (pa < 0) {
          pa = pb;
        } else if (pb < 0) {
          pb = pa;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t chosen;
      if (assigned[i] >= 0) {
        chosen = static_cast<std::size_t>(assigned[i]);
      } else if (night) {
        chosen = world.home[i];
      } else {
        const double u = mobility.uniform();
        const double campus = weekday ? 0.6 : 0.25, town = weekday ? 0.15 : 0.35, home = weekday ? 0.2 : 0.3;
        if (u < campus) {
          chosen = world.campus[mobility.below(world.campus.size())];
        } else if (u < campus + town) {
          chosen = world.town[mobility.below(world.town.size())];
        } else if (u < campus + town + home) {
          chosen = world.home[i];
        } else {
          chosen = world.far[mobility.below(world.far.size())];
        }
      }
      place[s * n + i] = static_cast<std::uint32_t>(chosen);
    }
  }

  Traces out;
  const double leave = cfg.missing_rate / (cfg.mean_gap_bins * (1.0 - cfg.missing_rate));
  const double recover = 1.0 / cfg.mean_gap_bins;
  const Rng sensing(cfg.seed, "sensing");
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = sensing.derive("device", i);
    const std::string id = synth_node_id(i);
    bool missing = rng.bernoulli(cfg.missing_rate);
    for (TimestampMs t = study.study_start; t < study.study_end; t += cfg.bin_width) {
      if (t != study.study_start) missing = missing ? !rng.bernoulli(recover) : rng.bernoulli(leave);
      const double noise_n = rng.normal(0.0, cfg.noise_m), noise_e = rng.normal(0.0, cfg.noise_m);
      const TimestampMs offset = static_cast<TimestampMs>(rng.below(static_cast<std::uint64_t>(cfg.bin_width / 1000))) * 1000;
      const bool scan = rng.bernoulli(cfg.wifi_scan_prob);
      bool excluded = false;
      for (const auto& w : study.exclusion_windows) excluded = excluded || w.overlaps(t, t + cfg.bin_width);
      if (missing || excluded) continue;
      const auto slot = static_cast<std::size_t>((t - study.study_start) / hour);
      const Place& pl = world.places[place[slot * n + i]];
      const GeoPoint p = offset_m(pl.point, noise_n, noise_e);
      out.locations.push_back(
          LocationSample{id, t + offset, round6(p.lat), round6(p.lon), std::round(cfg.noise_m) + 5.0});
      if (!scan) continue;
      std::vector<const std::string*> seen;
      for (const auto& h : pl.hotspots) {
        if (rng.bernoulli(0.7)) seen.push_back(&h);
      }
      if (seen.empty()) seen.push_back(&pl.hotspots[rng.below(pl.hotspots.size())]);
      for (const auto* h : seen) out.wifi.push_back(WifiObservation{id, t + offset, *h});
    }
  }
  return out;
}

nlohmann::ordered_json SynthCohort::ground_truth() const {
  nlohmann::ordered_json j;
  j["synth_config"] = synth.to_json();
  j["residents"] = residents;
  nlohmann::ordered_json nets = nlohmann::ordered_json::object();
  const Roster& roster = networks.roster();
  for (const TieNetwork* net : networks.all()) {
    if (net->tie_type != TieType::kFriend && net->tie_type != TieType::kCloseFriend) continue;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < roster.size(); ++i) {
      for (std::size_t k = 0; k < roster.size(); ++k) {
        if (i != k && net->tie(i, k)) edges.push_back({roster.id(i), roster.id(k)});
      }
    }
    nlohmann::ordered_json entry;
    entry["ties"] = edges;
    entry["density"] = density(*net);
    entry["reciprocity"] = reciprocity(*net);
    nets[std::string(to_string(net->tie_type)) + ".w" + std::to_string(net->wave)] = entry;
  }
  j["networks"] = nets;
  j["location_rows"] = traces.locations.size();
  j["wifi_rows"] = traces.wifi.size();
  return j;
}

SynthCohort generate_cohort(const SynthConfig& config) {
  config.validate();
  NetworkSet nets = generate_networks(config);
  SynthCohort c{config, synth_study_config(config), nets, network_ties(nets), {}, {}};
  c.traces = generate_traces(c.networks, config);
  const auto resident = residents_of(config);
  for (std::size_t i = 0; i < config.n_nodes; ++i) {
    if (resident[i]) c.residents.push_back(synth_node_id(i));
  }
  return c;
}

std::string locations_to_csv(const std::vector<LocationSample>& rows) {
  std::string out = "device_id,timestamp_ms,lat,lon,accuracy_m\n";
  for (const auto& r : rows) {
    out += r.device_id;
    out += ',';
    out += std::to_string(r.timestamp);
    out += ',';
    out += format_double(r.latitude);
    out += ',';
    out += format_double(r.longitude);
    out += ',';
    if (r.accuracy_m) out += format_double(*r.accuracy_m);
    out += '\n';
  }
  return out;
}

std::string wifi_to_csv(const std::vector<WifiObservation>& rows) {
  std::string out = "device_id,timestamp_ms,hotspot_id\n";
  for (const auto& r : rows) {
    out += r.device_id;
    out += ',';
    out += std::to_string(r.timestamp);
    out += ',';
    out += r.hotspot_id;
    out += '\n';
  }
  return out;
}

void write_cohort(const SynthCohort& cohort, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  write_file((d / "locations.csv").string(), locations_to_csv(cohort.traces.locations));
  write_file((d / "wifi.csv").string(), wifi_to_csv(cohort.traces.wifi));
  write_file((d / "surveys.csv").string(), survey_to_csv(cohort.ties));
  write_file((d / "study.json").string(), cohort.study.to_json().dump(2) + "\n");
  write_file((d / "ground_truth.json").string(), cohort.ground_truth().dump(2) + "\n");
}

LeakageFixture leakage_fixture(const LeakageConfig& cfg) {
  if (cfg.n_nodes < 2) throw InputError("leakage fixture needs at least 2 nodes");
  check_probability(cfg.tie_prob, "tie_prob");
  check_probability(cfg.change_rate, "change_rate");
  Rng rng(cfg.seed, "leakage");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) ids.push_back(synth_node_id(i));
  auto roster = std::make_shared<const Roster>(ids);

  std::vector<std::string> columns{"signal"};
  for (std::size_t k = 0; k < cfg.fingerprint_dims; ++k) columns.push_back("fingerprint" + std::to_string(k + 1));
  FeatureMatrix features(columns);
  std::vector<SurveyTie> ties;
  std::vector<double> values(columns.size());
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) {
    for (std::size_t j = i + 1; j < cfg.n_nodes; ++j) {
      std::array<int, 3> label{};
      label[0] = rng.bernoulli(cfg.tie_prob) ? 1 : 0;
      for (int w = 1; w < 3; ++w) label[w] = rng.bernoulli(cfg.change_rate) ? 1 - label[w - 1] : label[w - 1];
      std::vector<double> fingerprint(cfg.fingerprint_dims);
      for (auto& f : fingerprint) f = rng.normal();
      const Dyad dyad = Dyad::of(ids[i], ids[j]);
      for (int p = 0; p < 2; ++p) {
        values[0] = cfg.signal * label[p + 1] + rng.normal();
        for (std::size_t k = 0; k < fingerprint.size(); ++k) values[k + 1] = fingerprint[k];
        features.append(RowKey{dyad, p == 0 ? Period::kP1 : Period::kP2}, values);
      }
      for (int w = 0; w < 3; ++w) {
        ties.push_back(SurveyTie{w + 1, ids[i], ids[j], TieType::kFriend, label[w]});
        ties.push_back(SurveyTie{w + 1, ids[j], ids[i], TieType::kFriend, label[w]});
      }
    }
  }
  NetworkSet nets = build_networks(ties, roster);
  LabelTable labels = build_label_table(nets, features, Target::kFriend);
  return LeakageFixture{std::move(features), std::move(nets), std::move(labels)};
}

}  // namespace coloc
