#include <doctest.h>

#include <set>

#include "coloc/cfs.hpp"
#include "coloc/ensemble.hpp"
#include "coloc/tree.hpp"
#include "oracles.hpp"

using namespace coloc;

namespace {

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> r(d.rows());
  std::iota(r.begin(), r.end(), 0);
  return r;
}

Dataset xor_data() {
  // Unequal quadrant sizes so the first greedy split has positive gain.
  const int counts[2][2] = {{10, 5}, {15, 10}};
  Dataset d(40, {"x", "y"});
  std::size_t r = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int i = 0; i < counts[a][b]; ++i, ++r) {
        d.set(r, 0, a);
        d.set(r, 1, b);
        d.labels()[r] = a ^ b;
      }
    }
  }
  return d;
}

double train_accuracy(const DecisionTree& t, const Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) ok += t.vote(d, i) == d.labels()[i];
  return static_cast<double>(ok) / static_cast<double>(d.rows());
}

/// One informative column plus `noise` independent columns.
Dataset planted(std::size_t n, std::size_t noise, double shift, Rng& rng, bool duplicate = false) {
  std::vector<std::string> names = {"signal"};
  if (duplicate) names.push_back("signal_copy");
  for (std::size_t i = 0; i < noise; ++i) names.push_back("noise" + std::to_string(i));
  Dataset d(n, names);
  for (std::size_t r = 0; r < n; ++r) {
    const int y = rng.bernoulli(0.5);
    d.labels()[r] = y;
    const double s = rng.normal(y * shift, 1.0);
    std::size_t c = 0;
    d.set(r, c++, s);
    if (duplicate) d.set(r, c++, s);
    for (std::size_t i = 0; i < noise; ++i) d.set(r, c++, rng.normal());
  }
  return d;
}

}  // namespace

TEST_CASE("pure labels give a single leaf") {
  Dataset d(5, {"x"});
  for (std::size_t i = 0; i < 5; ++i) {
    d.set(i, 0, static_cast<double>(i));
    d.labels()[i] = 1;
  }
  Rng rng(1);
  const auto t = DecisionTree::fit(d, all_rows(d), TreeParams{}, rng);
  CHECK(t.nodes().size() == 1);
  CHECK(t.predict_proba(d, 0) == 1.0);
}

TEST_CASE("separable data needs one split") {
  Dataset d(10, {"x"});
  for (std::size_t i = 0; i < 10; ++i) {
    d.set(i, 0, static_cast<double>(i));
    d.labels()[i] = i >= 6;
  }
  Rng rng(1);
  const auto t = DecisionTree::fit(d, all_rows(d), TreeParams{}, rng);
  CHECK(t.depth() == 1);
  CHECK(train_accuracy(t, d) == 1.0);
  CHECK(t.nodes()[0].threshold == doctest::Approx(5.5));
}

TEST_CASE("XOR needs depth 2") {
  const auto d = xor_data();
  Rng rng(1);
  TreeParams stump;
  stump.max_depth = 1;
  CHECK(train_accuracy(DecisionTree::fit(d, all_rows(d), stump, rng), d) < 1.0);
  TreeParams two;
  two.max_depth = 2;
  const auto t = DecisionTree::fit(d, all_rows(d), two, rng);
  CHECK(train_accuracy(t, d) == 1.0);
  CHECK(t.depth() == 2);
  // No depth-1 stump on either feature reaches accuracy 1.
  for (std::size_t f = 0; f < 2; ++f) {
    for (std::size_t i = 0; i < d.rows(); ++i) {
      std::size_t ok = 0;
      for (std::size_t r = 0; r < d.rows(); ++r) ok += (d.at(r, f) <= d.at(i, f)) == (d.labels()[r] == 0);
      CHECK(ok < d.rows());
      CHECK(d.rows() - ok < d.rows());
    }
  }
}

TEST_CASE("missing values route to the heavier branch, also when every split feature is missing") {
  Dataset d(12, {"x"});
  for (std::size_t i = 0; i < 12; ++i) {
    d.set(i, 0, i < 2 ? kMissing : static_cast<double>(i));
    d.labels()[i] = i >= 9;
  }
  Rng rng(1);
  const auto t = DecisionTree::fit(d, all_rows(d), TreeParams{}, rng);
  REQUIRE(t.nodes()[0].feature == 0);
  CHECK(t.nodes()[0].missing_left);

  Dataset blank(1, {"x"});
  blank.set(0, 0, kMissing);
  const auto leaf = t.leaf(blank, 0);
  CHECK(t.nodes()[leaf].feature == -1);
  CHECK(t.predict_proba(blank, 0) == 0.0);
}

TEST_CASE("an all-missing column is never split on") {
  Dataset d(8, {"empty", "x"});
  for (std::size_t i = 0; i < 8; ++i) {
    d.set(i, 0, kMissing);
    d.set(i, 1, static_cast<double>(i));
    d.labels()[i] = i % 3 == 0;
  }
  Rng rng(1);
  const auto t = DecisionTree::fit(d, all_rows(d), TreeParams{}, rng);
  for (const auto& n : t.nodes()) CHECK(n.feature != 0);
}

TEST_CASE("tree JSON round trip predicts identically") {
  Rng data_rng(3);
  const auto d = planted(300, 5, 1.0, data_rng);
  Rng rng(1);
  TreeParams p;
  p.max_depth = 6;
  const auto t = DecisionTree::fit(d, all_rows(d), p, rng);
  const auto back = DecisionTree::from_json(t.to_json());
  for (std::size_t i = 0; i < d.rows(); ++i) CHECK(back.predict_proba(d, i) == t.predict_proba(d, i));
}

TEST_CASE("a one-tree forest without bootstrap is the tree") {
  Rng data_rng(4);
  const auto d = planted(200, 4, 1.0, data_rng);
  ForestParams fp;
  fp.trees = 1;
  fp.bootstrap = false;
  fp.tree.features_per_split = d.cols();
  const auto forest = RandomForest::fit(d, all_rows(d), fp, 5);
  Rng rng(1);
  const auto tree = DecisionTree::fit(d, all_rows(d), fp.tree, rng);
  for (std::size_t i = 0; i < d.rows(); ++i) CHECK(forest.predict(d, i) == tree.vote(d, i));
}

TEST_CASE("forest defaults, tree order and thread count do not change predictions") {
  Rng data_rng(6);
  const auto d = planted(300, 8, 1.0, data_rng);
  ForestParams fp;
  fp.trees = 20;
  auto f1 = RandomForest::fit(d, all_rows(d), fp, 7);
  CHECK(f1.features_per_split() == 3);
  fp.jobs = 3;
  const auto f3 = RandomForest::fit(d, all_rows(d), fp, 7);
  CHECK(f1.to_json() == f3.to_json());
  auto reversed = f1;
  std::reverse(reversed.trees().begin(), reversed.trees().end());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    CHECK(f1.predict(d, i) == reversed.predict(d, i));
    CHECK(f1.predict(d, i) >= 0.0);
    CHECK(f1.predict(d, i) <= 1.0);
  }
}

TEST_CASE("boosting: weights stay a distribution and training error does not rise") {
  Rng data_rng(8);
  auto d = planted(400, 3, 0.8, data_rng);
  AdaBoostParams p;
  p.rounds = 40;
  BoostTrace trace;
  const auto model = AdaBoost::fit(d, all_rows(d), p, 9, &trace);
  CHECK(model.members().size() == trace.alpha.size());
  for (double w : trace.weight_sum) CHECK(std::abs(w - 1.0) < 1e-9);
  for (double e : trace.weighted_error) CHECK(e < 0.5);
  CHECK(trace.train_error.back() <= trace.train_error.front());
}

TEST_CASE("boosting stops after a perfect first round") {
  Dataset d(10, {"x"});
  for (std::size_t i = 0; i < 10; ++i) {
    d.set(i, 0, static_cast<double>(i));
    d.labels()[i] = i >= 5;
  }
  BoostTrace trace;
  const auto model = AdaBoost::fit(d, all_rows(d), AdaBoostParams{}, 1, &trace);
  CHECK(model.members().size() == 1);
  CHECK(trace.stop_reason == "zero_error");
  Rng rng(1);
  const auto tree = DecisionTree::fit(d, all_rows(d), AdaBoostParams{}.base, rng);
  for (std::size_t i = 0; i < 10; ++i) CHECK(model.predict(d, i) == tree.vote(d, i));
}

TEST_CASE("model envelope round trips") {
  Rng data_rng(10);
  const auto d = planted(150, 3, 1.0, data_rng);
  for (auto kind : {ModelKind::kForest, ModelKind::kAdaBoost, ModelKind::kTree}) {
    ModelParams p;
    p.kind = kind;
    p.forest.trees = 5;
    p.boost.rounds = 5;
    const auto m = Model::fit(d, all_rows(d), p, 3, "abc");
    const auto back = Model::from_json(m.to_json());
    CHECK(back.kind() == kind);
    CHECK(back.to_json() == m.to_json());
    CHECK(back.predict(d, all_rows(d)) == m.predict(d, all_rows(d)));
  }
  CHECK(parse_model_kind("adaboost") == ModelKind::kAdaBoost);
  CHECK_THROWS(parse_model_kind("svm"));
}

TEST_CASE("CFS merit reductions") {
  CHECK(cfs_merit(0, 0, 0) == 0.0);
  CHECK(cfs_merit(1, 0.4, 0) == doctest::Approx(0.4));
  // Two identical features: mean r_cf unchanged, r_ff = 1.
  CHECK(cfs_merit(2, 0.8, 1.0) == doctest::Approx(0.4));
  CHECK(cfs_merit(2, 0.8, 0.5) < 0.4 * 2 / std::sqrt(2.0));
}

TEST_CASE("pairwise Pearson matches the definition") {
  Rng rng(12);
  std::vector<double> x(80), y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    x[i] = rng.bernoulli(0.1) ? kMissing : rng.normal();
    y[i] = rng.bernoulli(0.1) ? kMissing : x[i] * 0.3 + rng.normal();
  }
  CHECK(pearson_pairwise(x, y) == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
  std::vector<double> flat(80, 2.0);
  CHECK(pearson_pairwise(x, flat) == 0.0);
}

TEST_CASE("CFS picks the planted feature and a single copy of a duplicate") {
  Rng rng(13);
  const auto d = planted(600, 9, 1.0, rng);
  const auto r = cfs_select(d, all_rows(d));
  CHECK(std::find(r.features.begin(), r.features.end(), 0) != r.features.end());
  Rng rng2(14);
  const auto dup = planted(600, 9, 1.0, rng2, true);
  const auto rd = cfs_select(dup, all_rows(dup));
  const bool a = std::count(rd.features.begin(), rd.features.end(), 0), b = std::count(rd.features.begin(), rd.features.end(), 1);
  CHECK(a != b);
}

TEST_CASE("CFS under the null selects at most one feature") {
  Rng rng(15);
  const auto d = planted(3000, 10, 0.0, rng);
  const auto r = cfs_select(d, all_rows(d));
  CHECK(r.features.size() <= 1);
  CHECK(r.merit < 0.1);
}

TEST_CASE("best-first CFS reaches the exhaustive optimum without the floor") {
  Rng rng(16);
  CfsParams params;
  params.alpha = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t p = 8;
    Dataset d(120, std::vector<std::string>(p, "f"));
    for (std::size_t r = 0; r < 120; ++r) {
      const int y = rng.bernoulli(0.4);
      d.labels()[r] = y;
      const double base = rng.normal();
      for (std::size_t c = 0; c < p; ++c) d.set(r, c, 0.5 * base + rng.normal(0.3 * y * (c % 3), 1.0));
    }
    CorrelationCache cache(d, all_rows(d));
    std::vector<double> rcf(p);
    std::vector<std::size_t> allowed(p);
    for (std::size_t c = 0; c < p; ++c) {
      rcf[c] = cache.class_corr(c);
      allowed[c] = c;
    }
    const double best = oracle::best_subset_merit(p, rcf, [&](std::size_t a, std::size_t b) { return cache.feature_corr(a, b); }, allowed);
    const auto r = cfs_select(cache, params);
    CHECK(r.merit == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("stability selection over identical folds counts every fold") {
  Rng rng(17);
  const auto d = planted(400, 5, 1.2, rng);
  std::vector<std::vector<std::size_t>> sets(10, all_rows(d));
  const auto s = stability_select_sets(d, sets, 9);
  for (const auto& f : s.fold_sets) CHECK(f == s.fold_sets.front());
  for (const auto& [name, c] : s.counts) CHECK(c == 10);
  CHECK(s.final_set == s.fold_sets.front());
  const auto back = SelectionResult::from_json(s.to_json());
  CHECK(back.final_set == s.final_set);
}

TEST_CASE("stability selection keeps the planted feature; final set lies in the union") {
  Rng rng(18);
  const auto d = planted(800, 9, 1.0, rng);
  const auto s = stability_select(d, all_rows(d), 10, 9, 3);
  CHECK(s.fold_sets.size() == 10);
  CHECK(s.counts.at("signal") >= 9);
  std::set<std::string> uni;
  for (const auto& f : s.fold_sets) uni.insert(f.begin(), f.end());
  for (const auto& f : s.final_set) CHECK(uni.count(f) == 1);
}

TEST_CASE("a copy of a strong feature is not taken alongside a weaker one") {
  Rng rng(19);
  const std::size_t n = 2000;
  Dataset d(n, {"strong", "copy", "weak"});
  for (std::size_t r = 0; r < n; ++r) {
    const int y = rng.bernoulli(0.5);
    d.labels()[r] = y;
    const double s = rng.normal(1.2 * y, 1.0);
    d.set(r, 0, s);
    d.set(r, 1, s);
    d.set(r, 2, rng.normal(0.6 * y, 1.0));
  }
  // Plain merit would prefer all three columns.
  CorrelationCache cache(d, all_rows(d));
  const double rs = cache.class_corr(0), rw = cache.class_corr(2), rsw = cache.feature_corr(0, 2);
  CHECK(cfs_merit(3, 2 * rs + rw, 1.0 + 2 * rsw) > cfs_merit(2, rs + rw, rsw));
  const auto sel = cfs_select(d, all_rows(d));
  CHECK(sel.features == std::vector<std::size_t>{0, 2});
}
