#ifndef COLOC_NETWORKS_HPP
#define COLOC_NETWORKS_HPP

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coloc/features.hpp"
#include "coloc/geodyads.hpp"
#include "coloc/ingest.hpp"

namespace coloc {

/// Closed, sorted participant roster.
class Roster {
 public:
  explicit Roster(std::vector<std::string> ids);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
};

/// Configured roster, or every node named in the survey when none is configured.
std::shared_ptr<const Roster> make_roster(const StudyConfig& config, std::span<const SurveyTie> ties);

/// Directed 0/1 adjacency for one (wave, tie type). Only respondents' rows
/// carry information; the diagonal is always zero.
struct TieNetwork {
  int wave = 1;
  TieType tie_type = TieType::kFriend;
  std::shared_ptr<const Roster> roster;
  std::vector<std::uint8_t> adjacency;  // row-major n x n
  std::vector<std::uint8_t> respondent;

  TieNetwork(int wave, TieType type, std::shared_ptr<const Roster> roster);

  std::size_t size() const { return respondent.size(); }
  bool tie(std::size_t i, std::size_t j) const { return adjacency[i * size() + j] != 0; }
  void set_tie(std::size_t i, std::size_t j, bool v);
  bool is_respondent(std::size_t i) const { return respondent[i] != 0; }
  std::size_t tie_count() const;
};

class NetworkSet {
 public:
  explicit NetworkSet(std::shared_ptr<const Roster> roster) : roster_(std::move(roster)) {}

  const Roster& roster() const { return *roster_; }
  std::shared_ptr<const Roster> roster_ptr() const { return roster_; }
  const TieNetwork* find(int wave, TieType type) const;
  TieNetwork& get(int wave, TieType type);
  /// Networks ordered by tie type, then wave.
  std::vector<const TieNetwork*> all() const;

 private:
  std::shared_ptr<const Roster> roster_;
  std::map<std::pair<TieType, int>, TieNetwork> networks_;
};

/// Ties whose ego or alter is missing from the roster are ignored.
NetworkSet build_networks(std::span<const SurveyTie> ties, std::shared_ptr<const Roster> roster);

enum class SimilarityMode { kSharedPairs, kStandard };

/// Network similarity over respondents present in both networks.
/// kSharedPairs: shared ties / (2 * C(n, 2)). kStandard: |A and B| / |A or B|
/// over directed ties (0 when neither has a tie). Throws InputError when
/// fewer than two respondents overlap.
double network_similarity(const TieNetwork& a, const TieNetwork& b, SimilarityMode mode);

/// Fraction of ties that are reciprocated; 0 without ties.
double reciprocity(const TieNetwork& a);
/// Ties among respondents over ordered respondent pairs.
double density(const TieNetwork& a);

struct SimilarityGrid {
  std::vector<std::string> labels;  // "<tie_type>.w<wave>"
  std::vector<double> values;       // row-major, NaN where undefined

  std::string to_csv() const;
};

/// 15 x 15 grid over five tie types and three waves.
SimilarityGrid similarity_grid(const NetworkSet& set, SimilarityMode mode);

enum class TieClass : std::uint8_t { kMutual, kOneWay, kNone };
std::string_view to_string(TieClass c);
/// nullopt unless both nodes responded.
std::optional<TieClass> classify_dyad(const TieNetwork& net, const Dyad& dyad);

/// Weekly median pairwise distance per tie class inside a region.
class TieDistanceProfile {
 public:
  TieDistanceProfile(std::shared_ptr<const BinIndex> bins, TimestampMs origin,
                     BinarySeries region = BinarySeries::kBothOnCampus);

  /// Adds the in-region bins whose start lies in `window`.
  void add(const DyadSeries& series, TieClass cls,
           TimeWindow window = {std::numeric_limits<TimestampMs>::min(), std::numeric_limits<TimestampMs>::max()});

  struct Row {
    std::size_t week = 0;
    TieClass cls = TieClass::kNone;
    double median = kMissing;
    std::size_t bins = 0;
  };
  /// Every week that has bins, crossed with the three classes.
  std::vector<Row> rows() const;
  std::string to_csv() const;

 private:
  std::shared_ptr<const BinIndex> bins_;
  BinarySeries region_;
  std::vector<std::size_t> week_of_bin_;
  std::size_t weeks_ = 0;
  std::vector<std::array<std::vector<float>, 3>> values_;  // [week][class]
};

TieDistanceProfile tie_type_distance_profile(std::span<const DyadSeries> series, const TieNetwork& net,
                                             std::shared_ptr<const BinIndex> bins, TimestampMs origin);
/// Classes follow the friend network closing each period: wave 2 over the
/// first period, wave 3 over the second. Weeks count from the study start.
TieDistanceProfile tie_type_distance_profile(std::span<const DyadSeries> series, const NetworkSet& networks,
                                             const StudyConfig& config, std::shared_ptr<const BinIndex> bins);

enum class Target { kFriend, kCloseGivenFriend, kChange };
std::string_view to_string(Target t);
/// Accepts friend, close, close_given_friend, change.
std::optional<Target> parse_target(std::string_view s);

struct LabelRow {
  std::string ego;
  std::string alter;
  int wave = 2;  // label wave; for change, the earlier wave
  Period period = Period::kP1;
  std::size_t feature_row = 0;
  int label = 0;
};

struct LabelTable {
  Target target = Target::kFriend;
  std::vector<LabelRow> rows;

  std::size_t size() const { return rows.size(); }
  Dyad dyad(std::size_t i) const { return Dyad::of(rows[i].ego, rows[i].alter); }
  std::vector<int> labels() const;
  std::string to_csv() const;
};

/// Joins directed survey labels to (dyad, period) feature rows:
///   friend: (A^(t), X[t-1,t)) for t in {2,3}
///   close_given_friend: same rows where A^(t) = 1, labelled by the close tie
///   change: (1[A^(t) != A^(t+1)], X[t,t+1)) for t in {1,2}
/// Rows whose ego did not respond to a needed wave are dropped.
LabelTable build_label_table(const NetworkSet& networks, const FeatureMatrix& features, Target target);

}  // namespace coloc

#endif  // COLOC_NETWORKS_HPP
