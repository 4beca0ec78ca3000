#include <doctest.h>

#include <set>

#include "coloc/evalkit.hpp"
#include "oracles.hpp"

using namespace coloc;

namespace {

LabelTable table(std::size_t dyads, int periods = 2) {
  LabelTable t;
  for (std::size_t d = 0; d < dyads; ++d) {
    const std::string a = "n" + std::to_string(d), b = "m" + std::to_string(d);
    for (int p = 0; p < periods; ++p) {
      for (int dir = 0; dir < 2; ++dir) {
        LabelRow r;
        r.ego = dir ? a : b;
        r.alter = dir ? b : a;
        r.wave = 2 + p;
        r.period = static_cast<Period>(p);
        t.rows.push_back(r);
      }
    }
  }
  return t;
}

}  // namespace

TEST_CASE("MCC conventions") {
  CHECK(mcc({0, 80, 0, 20}) == 0.0);  // always predicting the majority class
  CHECK(mcc({40, 60, 0, 0}) == 1.0);
  const double expect = 7000.0 / std::sqrt(110.0 * 100.0 * 100.0 * 90.0);
  CHECK(mcc({90, 80, 20, 10}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(mcc({90, 80, 20, 10}) - 0.7035) < 1e-4);
}

TEST_CASE("MCC is invariant under swapping the classes") {
  Rng rng(1, "mcc_swap");
  for (int i = 0; i < 500; ++i) {
    ConfusionCounts c{rng.below(100), rng.below(100), rng.below(100), rng.below(100)};
    ConfusionCounts s{c.tn, c.tp, c.fn, c.fp};
    CHECK(mcc(c) == doctest::Approx(mcc(s)).epsilon(1e-14));
  }
}

TEST_CASE("AUC ties and monotone transforms") {
  std::vector<double> same(10, 0.3);
  std::vector<int> y = {1, 0, 1, 0, 0, 0, 1, 0, 0, 1};
  CHECK(auc(same, y) == 0.5);
  std::vector<int> one_class(10, 1);
  CHECK(is_missing(auc(same, one_class)));
  Rng rng(2, "auc");
  std::vector<double> s(200), t(200);
  std::vector<int> lab(200);
  for (std::size_t i = 0; i < 200; ++i) {
    s[i] = std::floor(rng.uniform() * 20) / 20;
    lab[i] = rng.bernoulli(0.3);
    t[i] = std::exp(3 * s[i]) - 7;
  }
  CHECK(auc(s, lab) == doctest::Approx(*oracle::auc(s, lab)).epsilon(1e-12));
  CHECK(auc(s, lab) == auc(t, lab));
}

TEST_CASE("binomial test examples") {
  CHECK(binomial_vs_nir(10, 10, 0.5) == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-12));
  CHECK(binomial_vs_nir(0, 10, 0.5) == 1.0);
  CHECK(binomial_vs_nir(70, 100, 0.7) > 0.5);
  CHECK_THROWS_AS(binomial_vs_nir(11, 10, 0.5), InputError);
  CHECK_THROWS_AS(binomial_vs_nir(1, 10, 1.0), InputError);
}

TEST_CASE("binomial tail matches the pmf sum up to n = 10000") {
  Rng rng(3, "binom");
  for (int i = 0; i < 60; ++i) {
    const std::uint64_t n = 1 + rng.below(10000);
    const std::uint64_t c = rng.below(n + 1);
    const double p = 0.5 + 0.49 * rng.uniform();
    const double want = oracle::binomial_upper_tail(c, n, p);
    const double got = binomial_vs_nir(c, n, p);
    if (want > 1e-280) CHECK(oracle::close_rel(got, want, 1e-9));
  }
}

TEST_CASE("Clopper-Pearson bounds") {
  const auto ci = clopper_pearson(0, 10);
  CHECK(ci.lo == 0.0);
  CHECK(ci.hi == doctest::Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-10));
  const auto mid = clopper_pearson(50, 100);
  CHECK(mid.lo < 0.5);
  CHECK(mid.hi > 0.5);
  CHECK(mid.lo + mid.hi == doctest::Approx(1.0));
}

TEST_CASE("metric suite: perfect predictions and degenerate cases") {
  std::vector<double> s = {0.9, 0.1, 0.8, 0.2};
  std::vector<int> y = {1, 0, 1, 0};
  const auto m = metric_suite(s, y);
  CHECK(m.accuracy == 1.0);
  CHECK(m.f1 == 1.0);
  CHECK(m.mcc == 1.0);
  std::vector<double> zero = {0.1, 0.1, 0.2, 0.2};
  const auto z = metric_suite(zero, y);
  CHECK(is_missing(z.precision));
  CHECK(z.mcc == 0.0);
  CHECK_FALSE(z.notes.empty());
  std::vector<double> bad = {1.5, 0, 0, 0};
  CHECK_THROWS_AS(metric_suite(bad, y), InputError);
}

TEST_CASE("metric suite agrees with counting on ten rows") {
  std::vector<double> s = {0.95, 0.7, 0.5, 0.49, 0.3, 0.8, 0.1, 0.6, 0.2, 0.55};
  std::vector<int> y = {1, 1, 0, 1, 0, 0, 0, 1, 0, 1};
  const auto m = metric_suite(s, y);
  const auto c = oracle::count(s, y);
  CHECK(m.counts.tp == c.tp);
  CHECK(m.counts.fp == c.fp);
  CHECK(m.mcc == doctest::Approx(oracle::mcc(c)).epsilon(1e-12));
  CHECK(m.precision == doctest::Approx(*oracle::precision(c)));
  CHECK(m.recall == doctest::Approx(*oracle::recall(c)));
  CHECK(m.specificity == doctest::Approx(*oracle::specificity(c)));
  CHECK(m.f1 == doctest::Approx(*oracle::f1(c)));
  CHECK(m.auc == doctest::Approx(*oracle::auc(s, y)));
}

TEST_CASE("dyadic folds keep every row of a dyad together") {
  const auto t = table(300);
  const auto plan = assign_folds(t, CvSchema::kDyadic, 10, 4);
  std::map<Dyad, std::set<int>> folds;
  for (std::size_t i = 0; i < t.size(); ++i) folds[t.dyad(i)].insert(plan.fold[i]);
  for (const auto& [d, f] : folds) CHECK(f.size() == 1);
}

TEST_CASE("temporal block trains on exactly the first period") {
  const auto t = table(50);
  const auto plan = assign_folds(t, CvSchema::kTemporalBlock, 10, 4);
  CHECK(plan.k == 2);
  CHECK(plan.test_folds() == std::vector<int>{1});
  for (auto r : plan.train_rows(1)) CHECK(t.rows[r].period == Period::kP1);
  for (auto r : plan.test_rows(1)) CHECK(t.rows[r].period == Period::kP2);
  CHECK(plan.train_rows(1).size() == 100);
  CHECK_THROWS_AS(assign_folds(table(5, 1), CvSchema::kTemporalBlock, 10, 4), InputError);
}

TEST_CASE("unrestricted k = 5 on 1000 rows") {
  const auto t = table(250);
  const auto plan = assign_folds(t, CvSchema::kUnrestricted, 5, 9);
  const auto sizes = plan.fold_sizes();
  for (auto s : sizes) CHECK(std::abs(static_cast<double>(s) - 200.0) < 4 * std::sqrt(1000 * 0.2 * 0.8));
  CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == 1000);
  CHECK(assign_folds(t, CvSchema::kUnrestricted, 5, 9).fold == plan.fold);
  CHECK_THROWS_AS(assign_folds(t, CvSchema::kDyadic, 1, 9), InputError);
}

TEST_CASE("chi-square against uniform") {
  std::vector<std::size_t> even = {100, 100, 100, 100};
  CHECK(chi_square_uniform_p(even) == doctest::Approx(1.0));
  std::vector<std::size_t> skew = {400, 0, 0, 0};
  CHECK(chi_square_uniform_p(skew) < 1e-10);
}

TEST_CASE("schema names parse back") {
  for (auto s : {CvSchema::kUnrestricted, CvSchema::kDyadic, CvSchema::kTemporalBlock}) {
    CHECK(parse_cv_schema(to_string(s)) == s);
  }
  CHECK(parse_cv_schema("temporal") == CvSchema::kTemporalBlock);
  CHECK_FALSE(parse_cv_schema("loo").has_value());
}
