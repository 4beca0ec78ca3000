#include "coloc/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace coloc {

std::string_view to_string(CvSchema s) {
  switch (s) {
    case CvSchema::kUnrestricted: return "unrestricted";
    case CvSchema::kDyadic: return "dyadic";
    case CvSchema::kTemporalBlock: return "temporal_block";
  }
  return "unknown";
}

std::optional<CvSchema> parse_cv_schema(std::string_view s) {
  if (s == "unrestricted") return CvSchema::kUnrestricted;
  if (s == "dyadic") return CvSchema::kDyadic;
  if (s == "temporal" || s == "temporal_block") return CvSchema::kTemporalBlock;
  return std::nullopt;
}

std::vector<int> FoldPlan::test_folds() const {
  if (schema == CvSchema::kTemporalBlock) return {1};
  std::vector<int> f(static_cast<std::size_t>(k));
  std::iota(f.begin(), f.end(), 0);
  return f;
}

std::vector<std::size_t> FoldPlan::train_rows(int test_fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] != test_fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::test_rows(int test_fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] == test_fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

std::string FoldPlan::to_csv() const {
  std::string out = "row,fold\n";
  for (std::size_t i = 0; i < fold.size(); ++i) out += std::to_string(i) + "," + std::to_string(fold[i]) + "\n";
  return out;
}

FoldPlan assign_folds(const LabelTable& labels, CvSchema schema, int k, std::uint64_t seed) {
  FoldPlan plan;
  plan.schema = schema;
  plan.seed = seed;
  plan.fold.assign(labels.size(), 0);
  Rng rng(seed, "folds");
  switch (schema) {
    case CvSchema::kUnrestricted: {
      if (k < 2) throw InputError("cross-validation needs k >= 2");
      plan.k = k;
      for (auto& f : plan.fold) f = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      break;
    }
    case CvSchema::kDyadic: {
      if (k < 2) throw InputError("cross-validation needs k >= 2");
      plan.k = k;
      std::map<Dyad, int> dyad_fold;
      for (std::size_t i = 0; i < labels.size(); ++i) dyad_fold.emplace(labels.dyad(i), 0);
      for (auto& [dyad, f] : dyad_fold) f = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      for (std::size_t i = 0; i < labels.size(); ++i) plan.fold[i] = dyad_fold.at(labels.dyad(i));
      break;
    }
    case CvSchema::kTemporalBlock: {
      plan.k = 2;
      bool seen[2] = {false, false};
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const int f = static_cast<int>(labels.rows[i].period);
        plan.fold[i] = f;
        seen[f] = true;
      }
      if (!seen[0] || !seen[1]) throw InputError("temporal block needs labelled rows from both periods");
      break;
    }
  }
  return plan;
}

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) throw InputError("scores and labels differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    const bool truth = labels[i] != 0;
    if (pred && truth) {
      ++c.tp;
    } else if (pred) {
      ++c.fp;
    } else if (truth) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

double mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double a = fp + tp, b = tp + fn, d = tn + fp, e = tn + fn;
  if (a == 0 || b == 0 || d == 0 || e == 0) return 0.0;
  // Paired roots keep a perfect or perfectly inverted predictor exact.
  return (tp * tn - fp * fn) / (std::sqrt(a * b) * std::sqrt(d * e));
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InputError("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });
  // Mann-Whitney U with mid-ranks for ties.
  double pos_rank_sum = 0.0;
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] != 0) {
        pos_rank_sum += mid_rank;
        ++pos;
      }
    }
    i = j;
  }
  const std::uint64_t neg = n - pos;
  if (pos == 0 || neg == 0) return kMissing;
  const double p = static_cast<double>(pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double binomial_vs_nir(std::uint64_t correct, std::uint64_t n, double nir) {
  if (!(nir > 0.0 && nir < 1.0)) throw InputError("binomial test needs 0 < nir < 1");
  if (correct > n) throw InputError("more correct predictions than rows");
  if (correct == 0) return 1.0;
  // P(X >= c) = I_nir(c, n - c + 1)
  return boost::math::ibeta(static_cast<double>(correct), static_cast<double>(n - correct + 1), nir);
}

Interval clopper_pearson(std::uint64_t x, std::uint64_t n, double level) {
  if (n == 0) return {kMissing, kMissing};
  const double alpha = 1.0 - level;
  const double xs = static_cast<double>(x), ns = static_cast<double>(n);
  Interval ci;
  ci.lo = x == 0 ? 0.0 : boost::math::ibeta_inv(xs, ns - xs + 1.0, alpha / 2.0);
  ci.hi = x == n ? 1.0 : boost::math::ibeta_inv(xs + 1.0, ns - xs, 1.0 - alpha / 2.0);
  return ci;
}

namespace {
nlohmann::ordered_json num(double v) { return is_missing(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v); }
}  // namespace

nlohmann::ordered_json MetricBlock::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["confusion"] = {{"tp", counts.tp}, {"tn", counts.tn}, {"fp", counts.fp}, {"fn", counts.fn}};
  j["accuracy"] = num(accuracy);
  j["accuracy_ci95"] = {num(accuracy_ci.lo), num(accuracy_ci.hi)};
  j["no_information_rate"] = num(nir);
  j["binomial_p_accuracy_gt_nir"] = num(binomial_p);
  j["precision"] = num(precision);
  j["recall"] = num(recall);
  j["specificity"] = num(specificity);
  j["f1"] = num(f1);
  j["auc"] = num(auc);
  j["mcc"] = num(mcc);
  j["notes"] = notes;
  return j;
}

MetricBlock metric_suite(std::span<const double> scores, std::span<const int> labels, double threshold) {
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw InputError("scores must lie in [0, 1]");
  }
  MetricBlock m;
  m.counts = confusion(scores, labels, threshold);
  const auto& c = m.counts;
  m.n = c.total();
  if (m.n == 0) {
    m.notes.push_back("no evaluated rows");
    return m;
  }
  const auto ratio = [](std::uint64_t a, std::uint64_t b) {
    return b == 0 ? kMissing : static_cast<double>(a) / static_cast<double>(b);
  };
  const std::uint64_t correct = c.tp + c.tn;
  const std::uint64_t positives = c.tp + c.fn;
  m.accuracy = ratio(correct, m.n);
  m.accuracy_ci = clopper_pearson(correct, m.n);
  m.nir = ratio(std::max(positives, m.n - positives), m.n);
  if (m.nir < 1.0) {
    m.binomial_p = binomial_vs_nir(correct, m.n, m.nir);
  } else {
    m.notes.push_back("single class in labels: binomial test and AUC undefined");
  }
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, positives);
  m.specificity = ratio(c.tn, c.tn + c.fp);
  m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  m.auc = auc(scores, labels);
  m.mcc = mcc(c);
  if (c.tp + c.fp == 0) m.notes.push_back("zero positive predictions: precision undefined, MCC reported as 0");
  return m;
}

double chi_square_uniform_p(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw InputError("chi-square needs at least two cells");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace coloc
