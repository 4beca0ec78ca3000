#include <doctest.h>

#include "coloc/networks.hpp"
#include "fixtures.hpp"

using namespace coloc;

namespace {

std::shared_ptr<const Roster> roster(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::string(1, static_cast<char>('a' + i)));
  return std::make_shared<const Roster>(ids);
}

TieNetwork net(std::shared_ptr<const Roster> r, std::initializer_list<std::pair<int, int>> ties) {
  TieNetwork n(2, TieType::kFriend, r);
  for (std::size_t i = 0; i < r->size(); ++i) n.respondent[i] = 1;
  for (auto [i, j] : ties) n.set_tie(static_cast<std::size_t>(i), static_cast<std::size_t>(j), true);
  return n;
}

SurveyTie tie(int wave, std::string ego, std::string alter, TieType type, int v = 1) {
  return {wave, std::move(ego), std::move(alter), type, v};
}

FeatureMatrix matrix_for(const std::vector<std::string>& ids) {
  FeatureMatrix m({"x"});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      for (Period p : {Period::kP1, Period::kP2}) {
        std::vector<double> v = {static_cast<double>(m.rows())};
        m.append({Dyad::of(ids[i], ids[j]), p}, v);
      }
    }
  }
  return m;
}

}  // namespace

TEST_CASE("shared-pair similarity of a 3-tie network with itself over 3 nodes") {
  auto r = roster(3);
  auto a = net(r, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(network_similarity(a, a, SimilarityMode::kSharedPairs) == doctest::Approx(0.5));
  CHECK(network_similarity(a, a, SimilarityMode::kStandard) == 1.0);
}

TEST_CASE("disjoint tie sets have similarity 0 in both modes") {
  auto r = roster(3);
  auto a = net(r, {{0, 1}}), b = net(r, {{1, 0}});
  CHECK(network_similarity(a, b, SimilarityMode::kSharedPairs) == 0.0);
  CHECK(network_similarity(a, b, SimilarityMode::kStandard) == 0.0);
}

TEST_CASE("similarity needs two overlapping respondents") {
  auto r = roster(3);
  auto a = net(r, {{0, 1}});
  auto b = net(r, {});
  b.respondent = {1, 0, 0};
  CHECK_THROWS_AS(network_similarity(a, b, SimilarityMode::kSharedPairs), InputError);
}

TEST_CASE("reciprocity examples") {
  auto r = roster(3);
  CHECK(reciprocity(net(r, {{0, 1}, {1, 0}, {1, 2}, {2, 1}})) == 1.0);
  CHECK(reciprocity(net(r, {{0, 1}})) == 0.0);
  CHECK(reciprocity(net(r, {{0, 1}, {1, 0}, {1, 2}})) == doctest::Approx(2.0 / 3.0));
  CHECK(density(net(r, {{0, 1}, {1, 0}, {1, 2}})) == doctest::Approx(0.5));
}

TEST_CASE("dyad classes") {
  auto r = roster(3);
  auto n = net(r, {{0, 1}, {1, 0}, {1, 2}});
  CHECK(classify_dyad(n, Dyad::of("a", "b")) == TieClass::kMutual);
  CHECK(classify_dyad(n, Dyad::of("b", "c")) == TieClass::kOneWay);
  CHECK(classify_dyad(n, Dyad::of("a", "c")) == TieClass::kNone);
  n.respondent[2] = 0;
  CHECK_FALSE(classify_dyad(n, Dyad::of("b", "c")).has_value());
}

TEST_CASE("similarity grid is 15 x 15 with a unit diagonal where defined") {
  auto r = roster(3);
  std::vector<SurveyTie> ties;
  for (int w = 1; w <= 3; ++w) {
    for (auto t : kAllTieTypes) {
      ties.push_back(tie(w, "a", "b", t));
      ties.push_back(tie(w, "b", "c", t, 0));
      ties.push_back(tie(w, "c", "a", t, 0));
    }
  }
  const auto set = build_networks(ties, r);
  const auto grid = similarity_grid(set, SimilarityMode::kStandard);
  CHECK(grid.labels.size() == 15);
  CHECK(grid.values.size() == 225);
  for (std::size_t i = 0; i < 15; ++i) CHECK(grid.values[i * 15 + i] == 1.0);
}

TEST_CASE("label tables") {
  const std::vector<std::string> ids = {"a", "b", "c"};
  auto r = std::make_shared<const Roster>(ids);
  std::vector<SurveyTie> ties;
  for (int w = 1; w <= 3; ++w) {
    for (const auto& e : ids) ties.push_back(tie(w, e, e == "a" ? "b" : "a", TieType::kFriend, 0));
  }
  ties.push_back(tie(1, "a", "c", TieType::kFriend, 0));
  ties.push_back(tie(2, "a", "c", TieType::kFriend, 1));
  ties.push_back(tie(3, "a", "c", TieType::kFriend, 1));
  ties.push_back(tie(2, "a", "c", TieType::kCloseFriend, 1));
  ties.push_back(tie(1, "b", "c", TieType::kFriend, 1));
  const auto set = build_networks(ties, r);
  const auto m = matrix_for(ids);

  const auto friends = build_label_table(set, m, Target::kFriend);
  CHECK(friends.size() == 12);  // 3 dyads x 2 directions x waves 2, 3
  for (const auto& row : friends.rows) {
    CHECK(row.wave >= 2);
    CHECK(m.keys()[row.feature_row].period == static_cast<Period>(row.wave - 2));
  }

  const auto close = build_label_table(set, m, Target::kCloseGivenFriend);
  CHECK(close.size() == 2);
  for (const auto& row : close.rows) CHECK((row.ego == "a" && row.alter == "c"));
  for (const auto& row : close.rows) CHECK(row.label == (row.wave == 2 ? 1 : 0));

  const auto change = build_label_table(set, m, Target::kChange);
  CHECK(change.size() == 12);
  int ac_w1 = -1, bc_w1 = -1;
  for (const auto& row : change.rows) {
    if (row.ego == "a" && row.alter == "c" && row.wave == 1) ac_w1 = row.label;
    if (row.ego == "b" && row.alter == "c" && row.wave == 1) bc_w1 = row.label;
    CHECK(m.keys()[row.feature_row].period == static_cast<Period>(row.wave - 1));
  }
  CHECK(ac_w1 == 1);
  CHECK(bc_w1 == 1);
}

TEST_CASE("non-respondents drop their rows") {
  const std::vector<std::string> ids = {"a", "b"};
  auto r = std::make_shared<const Roster>(ids);
  std::vector<SurveyTie> ties = {tie(2, "a", "b", TieType::kFriend, 1), tie(3, "a", "b", TieType::kFriend, 1),
                                 tie(3, "b", "a", TieType::kFriend, 1)};
  const auto set = build_networks(ties, r);
  const auto t = build_label_table(set, matrix_for(ids), Target::kFriend);
  CHECK(t.size() == 3);
}

TEST_CASE("tie distance profile with one dyad per class in one week") {
  auto cfg = fixture::days_config(2);
  auto bins = std::make_shared<const BinIndex>(cfg);
  TieDistanceProfile profile(bins, cfg.study_start);
  auto series = [&](const char* x, const char* y, double d) {
    DyadSeries s;
    s.dyad = Dyad::of(x, y);
    s.distance.assign(bins->size(), d);
    for (auto& b : s.binary) b.assign(bins->size(), Obs::kTrue);
    return s;
  };
  profile.add(series("a", "b", 10), TieClass::kMutual);
  profile.add(series("a", "c", 20), TieClass::kOneWay);
  profile.add(series("b", "c", 30), TieClass::kNone);
  const auto rows = profile.rows();
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.week == 0);
    const double expect = row.cls == TieClass::kMutual ? 10 : row.cls == TieClass::kOneWay ? 20 : 30;
    CHECK(row.median == expect);
  }
}
