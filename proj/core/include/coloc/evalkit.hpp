#ifndef COLOC_EVALKIT_HPP
#define COLOC_EVALKIT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coloc/networks.hpp"

namespace coloc {

enum class CvSchema { kUnrestricted, kDyadic, kTemporalBlock };
std::string_view to_string(CvSchema s);
/// Accepts unrestricted, dyadic, temporal, temporal_block.
std::optional<CvSchema> parse_cv_schema(std::string_view s);

struct FoldPlan {
  CvSchema schema = CvSchema::kUnrestricted;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold;  // per label row

  /// Test folds evaluated under this plan: every fold, except temporal
  /// block which only tests on fold 1 (trained on fold 0).
  std::vector<int> test_folds() const;
  std::vector<std::size_t> train_rows(int test_fold) const;
  std::vector<std::size_t> test_rows(int test_fold) const;
  std::vector<std::size_t> fold_sizes() const;
  std::string to_csv() const;
};

/// Unrestricted: every row independently uniform over k folds. Dyadic: every
/// canonical dyad independently uniform, all its rows follow. Temporal block:
/// fold = period (k = 2). Deterministic in `seed`.
FoldPlan assign_folds(const LabelTable& labels, CvSchema schema, int k, std::uint64_t seed);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Predicted positive when score >= threshold.
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

/// Matthews correlation; 0 when any marginal is empty.
double mcc(const ConfusionCounts& c);

/// Probability a random positive outscores a random negative, ties counting
/// one half. NaN when either class is absent.
double auc(std::span<const double> scores, std::span<const int> labels);

/// One-sided exact P(X >= correct) for X ~ Binomial(n, nir).
double binomial_vs_nir(std::uint64_t correct, std::uint64_t n, double nir);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
/// Exact (Clopper-Pearson) interval for a binomial proportion.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t n, double level = 0.95);

struct MetricBlock {
  std::uint64_t n = 0;
  ConfusionCounts counts;
  double accuracy = kMissing;
  Interval accuracy_ci{kMissing, kMissing};
  double nir = kMissing;
  double binomial_p = kMissing;
  double precision = kMissing;
  double recall = kMissing;
  double specificity = kMissing;
  double f1 = kMissing;
  double auc = kMissing;
  double mcc = kMissing;
  std::vector<std::string> notes;

  nlohmann::ordered_json to_json() const;
};

/// Full metric suite for scored rows. Undefined entries stay missing and
/// are explained in `notes` (e.g. no positive predictions).
MetricBlock metric_suite(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

/// Pearson chi-square goodness of fit of counts against a uniform split;
/// returns the upper-tail p-value.
double chi_square_uniform_p(std::span<const std::size_t> counts);

}  // namespace coloc

#endif  // COLOC_EVALKIT_HPP
