#include "coloc/networks.hpp"

#include <algorithm>
#include <set>

namespace coloc {

Roster::Roster(std::vector<std::string> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

std::optional<std::size_t> Roster::index_of(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::shared_ptr<const Roster> make_roster(const StudyConfig& config, std::span<const SurveyTie> ties) {
  if (!config.nodes.empty()) return std::make_shared<Roster>(config.nodes);
  std::vector<std::string> ids;
  for (const auto& t : ties) {
    ids.push_back(t.ego);
    ids.push_back(t.alter);
  }
  return std::make_shared<Roster>(std::move(ids));
}

TieNetwork::TieNetwork(int w, TieType type, std::shared_ptr<const Roster> r)
    : wave(w), tie_type(type), roster(std::move(r)) {
  adjacency.assign(roster->size() * roster->size(), 0);
  respondent.assign(roster->size(), 0);
}

void TieNetwork::set_tie(std::size_t i, std::size_t j, bool v) {
  if (i == j) throw InputError("self tie");
  adjacency[i * size() + j] = v ? 1 : 0;
}

std::size_t TieNetwork::tie_count() const {
  return static_cast<std::size_t>(std::count(adjacency.begin(), adjacency.end(), std::uint8_t{1}));
}

const TieNetwork* NetworkSet::find(int wave, TieType type) const {
  auto it = networks_.find({type, wave});
  return it == networks_.end() ? nullptr : &it->second;
}

TieNetwork& NetworkSet::get(int wave, TieType type) {
  auto it = networks_.find({type, wave});
  if (it == networks_.end()) it = networks_.emplace(std::pair(type, wave), TieNetwork(wave, type, roster_)).first;
  return it->second;
}

std::vector<const TieNetwork*> NetworkSet::all() const {
  std::vector<const TieNetwork*> out;
  for (const auto& [key, net] : networks_) out.push_back(&net);
  return out;
}

NetworkSet build_networks(std::span<const SurveyTie> ties, std::shared_ptr<const Roster> roster) {
  NetworkSet set(roster);
  // A respondent of a wave answered the survey: any row with them as ego.
  for (const auto& t : ties) {
    const auto ego = roster->index_of(t.ego);
    const auto alter = roster->index_of(t.alter);
    if (!ego || !alter) continue;
    TieNetwork& net = set.get(t.wave, t.tie_type);
    net.respondent[*ego] = 1;
    net.set_tie(*ego, *alter, t.value == 1);
  }
  // Respondents of a wave answered every tie type; a type nobody named is
  // an explicit empty network rather than an absent one.
  for (int wave = 1; wave <= 3; ++wave) {
    std::vector<std::uint8_t> answered(roster->size(), 0);
    bool any = false;
    for (TieType type : kAllTieTypes) {
      if (const auto* net = set.find(wave, type)) {
        any = true;
        for (std::size_t i = 0; i < answered.size(); ++i) answered[i] |= net->respondent[i];
      }
    }
    if (!any) continue;
    for (TieType type : kAllTieTypes) set.get(wave, type).respondent = answered;
  }
  return set;
}

namespace {

std::vector<std::size_t> overlap(const TieNetwork& a, const TieNetwork& b) {
  if (a.roster != b.roster && a.roster->ids() != b.roster->ids()) {
    throw InputError("networks use different rosters");
  }
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.is_respondent(i) && b.is_respondent(i)) nodes.push_back(i);
  }
  return nodes;
}

}  // namespace

double network_similarity(const TieNetwork& a, const TieNetwork& b, SimilarityMode mode) {
  const auto nodes = overlap(a, b);
  if (nodes.size() < 2) throw InputError("fewer than two overlapping respondents");
  std::size_t both = 0, either = 0;
  for (std::size_t i : nodes) {
    for (std::size_t j : nodes) {
      if (i == j) continue;
      const bool x = a.tie(i, j);
      const bool y = b.tie(i, j);
      both += x && y;
      either += x || y;
    }
  }
  if (mode == SimilarityMode::kSharedPairs) {
    const double n = static_cast<double>(nodes.size());
    return static_cast<double>(both) / (n * (n - 1.0));
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

double reciprocity(const TieNetwork& a) {
  std::size_t ties = 0, mutual = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i != j && a.tie(i, j)) {
        ++ties;
        mutual += a.tie(j, i);
      }
    }
  }
  return ties == 0 ? 0.0 : static_cast<double>(mutual) / static_cast<double>(ties);
}

double density(const TieNetwork& a) {
  std::size_t r = 0, ties = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.is_respondent(i)) continue;
    ++r;
    for (std::size_t j = 0; j < a.size(); ++j) ties += (i != j && a.is_respondent(j) && a.tie(i, j));
  }
  if (r < 2) return 0.0;
  return static_cast<double>(ties) / (static_cast<double>(r) * static_cast<double>(r - 1));
}

std::string SimilarityGrid::to_csv() const {
  std::string out = "network";
  for (const auto& l : labels) out += "," + l;
  out += '\n';
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += labels[i];
    for (std::size_t j = 0; j < n; ++j) out += "," + format_double(values[i * n + j]);
    out += '\n';
  }
  return out;
}

SimilarityGrid similarity_grid(const NetworkSet& set, SimilarityMode mode) {
  SimilarityGrid grid;
  std::vector<const TieNetwork*> nets;
  for (TieType type : kAllTieTypes) {
    for (int wave = 1; wave <= 3; ++wave) {
      grid.labels.push_back(std::string(to_string(type)) + ".w" + std::to_string(wave));
      nets.push_back(set.find(wave, type));
    }
  }
  const std::size_t n = nets.size();
  grid.values.assign(n * n, kMissing);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!nets[i] || !nets[j]) continue;
      try {
        grid.values[i * n + j] = network_similarity(*nets[i], *nets[j], mode);
      } catch (const InputError&) {
        // too little respondent overlap; stays missing
      }
    }
  }
  return grid;
}

std::string_view to_string(TieClass c) {
  switch (c) {
    case TieClass::kMutual: return "mutual";
    case TieClass::kOneWay: return "one_way";
    case TieClass::kNone: return "none";
  }
  return "unknown";
}

std::optional<TieClass> classify_dyad(const TieNetwork& net, const Dyad& dyad) {
  const auto i = net.roster->index_of(dyad.a);
  const auto j = net.roster->index_of(dyad.b);
  if (!i || !j || !net.is_respondent(*i) || !net.is_respondent(*j)) return std::nullopt;
  const int ties = net.tie(*i, *j) + net.tie(*j, *i);
  return ties == 2 ? TieClass::kMutual : ties == 1 ? TieClass::kOneWay : TieClass::kNone;
}

TieDistanceProfile::TieDistanceProfile(std::shared_ptr<const BinIndex> bins, TimestampMs origin,
                                       BinarySeries region)
    : bins_(std::move(bins)), region_(region) {
  week_of_bin_.resize(bins_->size());
  for (std::size_t b = 0; b < bins_->size(); ++b) {
    week_of_bin_[b] = static_cast<std::size_t>((bins_->start(b) - origin) / kWeekMs);
    weeks_ = std::max(weeks_, week_of_bin_[b] + 1);
  }
  values_.resize(weeks_);
}

void TieDistanceProfile::add(const DyadSeries& series, TieClass cls, TimeWindow window) {
  if (series.size() != bins_->size()) throw InputError("dyad series does not match the bin layout");
  const auto& inside = series.series(region_);
  const auto c = static_cast<std::size_t>(cls);
  for (std::size_t b = 0; b < series.size(); ++b) {
    if (!window.contains(bins_->start(b))) continue;
    if (inside[b] == Obs::kTrue && !is_missing(series.distance[b])) {
      values_[week_of_bin_[b]][c].push_back(static_cast<float>(series.distance[b]));
    }
  }
}

std::vector<TieDistanceProfile::Row> TieDistanceProfile::rows() const {
  std::vector<bool> has_bins(weeks_, false);
  for (auto w : week_of_bin_) has_bins[w] = true;
  std::vector<Row> out;
  for (std::size_t w = 0; w < weeks_; ++w) {
    if (!has_bins[w]) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      Row r;
      r.week = w;
      r.cls = static_cast<TieClass>(c);
      std::vector<float> v = values_[w][c];
      r.bins = v.size();
      if (!v.empty()) {
        const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
        std::nth_element(v.begin(), mid, v.end());
        double m = *mid;
        if (v.size() % 2 == 0) m = 0.5 * (m + static_cast<double>(*std::max_element(v.begin(), mid)));
        r.median = m;
      }
      out.push_back(r);
    }
  }
  return out;
}

std::string TieDistanceProfile::to_csv() const {
  std::string out = "week,class,median_distance_m,bins\n";
  for (const auto& r : rows()) {
    out += std::to_string(r.week) + "," + std::string(to_string(r.cls)) + "," + format_double(r.median) + "," +
           std::to_string(r.bins) + "\n";
  }
  return out;
}

TieDistanceProfile tie_type_distance_profile(std::span<const DyadSeries> series, const TieNetwork& net,
                                             std::shared_ptr<const BinIndex> bins, TimestampMs origin) {
  TieDistanceProfile profile(std::move(bins), origin);
  for (const auto& s : series) {
    if (auto cls = classify_dyad(net, s.dyad)) profile.add(s, *cls);
  }
  return profile;
}

TieDistanceProfile tie_type_distance_profile(std::span<const DyadSeries> series, const NetworkSet& networks,
                                             const StudyConfig& config, std::shared_ptr<const BinIndex> bins) {
  TieDistanceProfile profile(std::move(bins), config.study_start);
  const auto periods = study_periods(config);
  for (std::size_t p = 0; p < periods.size(); ++p) {
    const TieNetwork* net = networks.find(static_cast<int>(p) + 2, TieType::kFriend);
    if (net == nullptr) continue;
    for (const auto& s : series) {
      if (auto cls = classify_dyad(*net, s.dyad)) profile.add(s, *cls, periods[p].window);
    }
  }
  return profile;
}

std::string_view to_string(Target t) {
  switch (t) {
    case Target::kFriend: return "friend";
    case Target::kCloseGivenFriend: return "close";
    case Target::kChange: return "change";
  }
  return "unknown";
}

std::optional<Target> parse_target(std::string_view s) {
  if (s == "friend") return Target::kFriend;
  if (s == "close" || s == "close_given_friend") return Target::kCloseGivenFriend;
  if (s == "change") return Target::kChange;
  return std::nullopt;
}

std::vector<int> LabelTable::labels() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

std::string LabelTable::to_csv() const {
  std::string out = "ego,alter,wave,period,feature_row,label\n";
  for (const auto& r : rows) {
    out += r.ego + "," + r.alter + "," + std::to_string(r.wave) + "," + std::string(to_string(r.period)) + "," +
           std::to_string(r.feature_row) + "," + std::to_string(r.label) + "\n";
  }
  return out;
}

LabelTable build_label_table(const NetworkSet& networks, const FeatureMatrix& features, Target target) {
  LabelTable table;
  table.target = target;
  const Roster& roster = networks.roster();
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const RowKey& key = features.keys()[r];
    const auto ia = roster.index_of(key.dyad.a);
    const auto ib = roster.index_of(key.dyad.b);
    if (!ia || !ib) continue;
    // X[t-1, t) pairs with wave t for friendship; X[t, t+1) with the t -> t+1 change.
    const int period_start_wave = key.period == Period::kP1 ? 1 : 2;
    for (const auto& [ego, alter] : {std::pair(*ia, *ib), std::pair(*ib, *ia)}) {
      LabelRow row{roster.id(ego), roster.id(alter), 0, key.period, r, 0};
      switch (target) {
        case Target::kFriend: {
          row.wave = period_start_wave + 1;
          const TieNetwork* f = networks.find(row.wave, TieType::kFriend);
          if (!f || !f->is_respondent(ego)) continue;
          row.label = f->tie(ego, alter);
          break;
        }
        case Target::kCloseGivenFriend: {
          row.wave = period_start_wave + 1;
          const TieNetwork* f = networks.find(row.wave, TieType::kFriend);
          const TieNetwork* c = networks.find(row.wave, TieType::kCloseFriend);
          if (!f || !c || !f->is_respondent(ego) || !c->is_respondent(ego)) continue;
          if (!f->tie(ego, alter)) continue;
          row.label = c->tie(ego, alter);
          break;
        }
        case Target::kChange: {
          row.wave = period_start_wave;
          const TieNetwork* before = networks.find(row.wave, TieType::kFriend);
          const TieNetwork* after = networks.find(row.wave + 1, TieType::kFriend);
          if (!before || !after || !before->is_respondent(ego) || !after->is_respondent(ego)) continue;
          row.label = before->tie(ego, alter) != after->tie(ego, alter);
          break;
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace coloc
