#include <doctest.h>

#include "coloc/networks.hpp"
#include "coloc/synth.hpp"

using namespace coloc;

namespace {

SynthConfig small() {
  SynthConfig c;
  c.n_nodes = 12;
  c.residents = 4;
  c.period_days = 2;
  return c;
}

}  // namespace

TEST_CASE("zero change rate repeats wave 1") {
  auto c = small();
  c.n_nodes = 40;
  c.change_rate = 0;
  const auto nets = generate_networks(c);
  const auto* w1 = nets.find(1, TieType::kFriend);
  for (int w : {2, 3}) CHECK(nets.find(w, TieType::kFriend)->adjacency == w1->adjacency);
}

TEST_CASE("close ties are friend ties") {
  auto c = small();
  c.n_nodes = 60;
  c.close_fraction = 0.7;
  const auto nets = generate_networks(c);
  for (int w = 1; w <= 3; ++w) {
    const auto& f = *nets.find(w, TieType::kFriend);
    const auto& cl = *nets.find(w, TieType::kCloseFriend);
    std::size_t close = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (cl.tie(i, j)) CHECK(f.tie(i, j));
        close += cl.tie(i, j);
      }
    }
    CHECK(close > 0);
  }
}

TEST_CASE("without a reciprocity boost reciprocity is close to density") {
  auto c = small();
  c.n_nodes = 200;
  c.reciprocity_boost = 0;
  c.base_tie_prob = 0.1;
  const auto nets = generate_networks(c);
  const auto& w1 = *nets.find(1, TieType::kFriend);
  CHECK(std::abs(reciprocity(w1) - density(w1)) < 0.02);
  c.reciprocity_boost = 0.8;
  const auto boosted = generate_networks(c);
  CHECK(reciprocity(*boosted.find(1, TieType::kFriend)) > 0.5);
}

TEST_CASE("missing rate 0 covers every bin") {
  auto c = small();
  c.missing_rate = 0;
  const auto cohort = generate_cohort(c);
  std::vector<std::string> nodes = cohort.study.nodes;
  const auto grids = build_grids(cohort.traces.locations, cohort.traces.wifi, cohort.study, nodes);
  for (const auto& g : grids.grids) CHECK(g.missing_locations() == 0);
  CHECK(grids.grids.size() == 12);
}

TEST_CASE("generation is reproducible and seed-sensitive") {
  const auto a = generate_cohort(small());
  const auto b = generate_cohort(small());
  CHECK(locations_to_csv(a.traces.locations) == locations_to_csv(b.traces.locations));
  CHECK(wifi_to_csv(a.traces.wifi) == wifi_to_csv(b.traces.wifi));
  CHECK(survey_to_csv(a.ties) == survey_to_csv(b.ties));
  auto c = small();
  c.seed = 2;
  CHECK(locations_to_csv(generate_cohort(c).traces.locations) != locations_to_csv(a.traces.locations));
}

TEST_CASE("generated study config validates and round trips") {
  const auto cohort = generate_cohort(small());
  CHECK_NOTHROW(cohort.study.validate());
  CHECK(StudyConfig::from_json(cohort.study.to_json()).hash() == cohort.study.hash());
  CHECK(SynthConfig::from_json(small().to_json()).to_json() == small().to_json());
  auto bad = small();
  bad.change_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("leakage fixture shape") {
  LeakageConfig c;
  c.n_nodes = 20;
  const auto fx = leakage_fixture(c);
  const std::size_t dyads = 20 * 19 / 2;
  CHECK(fx.labels.size() == 2 * dyads * 2);
  CHECK(fx.features.rows() == dyads * 2);
  for (const auto* n : fx.networks.all()) {
    if (n->tie_type == TieType::kFriend) CHECK(reciprocity(*n) == doctest::Approx(1.0));
  }
  // Both directions of a (dyad, period) share a feature row.
  std::map<std::pair<Dyad, int>, std::size_t> row_of;
  for (const auto& r : fx.labels.rows) {
    auto [it, fresh] = row_of.emplace(std::make_pair(Dyad::of(r.ego, r.alter), r.wave), r.feature_row);
    if (!fresh) CHECK(it->second == r.feature_row);
  }
}
