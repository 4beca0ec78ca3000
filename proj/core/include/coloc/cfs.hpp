#ifndef COLOC_CFS_HPP
#define COLOC_CFS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "coloc/tree.hpp"

namespace coloc {

/// |Pearson| correlations over pairwise-complete rows. Feature-class values
/// are computed up front, feature-feature values on demand.
class CorrelationCache {
 public:
  CorrelationCache(const Dataset& data, std::span<const std::size_t> rows);

  std::size_t features() const { return class_.size(); }
  std::size_t rows() const { return rows_.size(); }
  double class_corr(std::size_t f) const { return class_[f]; }
  /// Rows where f is present.
  std::size_t present(std::size_t f) const { return present_[f]; }
  double feature_corr(std::size_t a, std::size_t b);

 private:
  const Dataset& data_;
  std::vector<std::size_t> rows_;
  std::vector<double> class_;
  std::vector<std::size_t> present_;
  std::unordered_map<std::uint64_t, double> pairs_;
};

/// Pearson correlation of two equal-length series skipping positions where
/// either is NaN. Zero variance gives 0.
double pearson_pairwise(std::span<const double> x, std::span<const double> y);

/// k * mean(r_cf) / sqrt(k + k(k-1) * mean(r_ff)), from the sums of the
/// feature-class and distinct feature-pair correlations.
double cfs_merit(std::size_t k, double sum_cf, double sum_ff);
double cfs_merit(std::span<const std::size_t> subset, CorrelationCache& cache);

struct CfsParams {
  std::size_t max_stale = 5;
  double min_improvement = 1e-12;
  /// Features whose class correlation is not significant at
  /// alpha / p (normal approximation) are never candidates. 0 disables.
  double alpha = 0.05;
};

struct CfsResult {
  std::vector<std::size_t> features;  // ascending
  double merit = 0.0;
  std::size_t expansions = 0;
};

CfsResult cfs_select(CorrelationCache& cache, const CfsParams& params = {});
CfsResult cfs_select(const Dataset& data, std::span<const std::size_t> rows, const CfsParams& params = {});

struct SelectionResult {
  std::size_t folds = 0;
  std::size_t stability_min = 0;
  std::vector<std::vector<std::string>> fold_sets;
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> final_set;  // in dataset column order

  nlohmann::ordered_json to_json() const;
  static SelectionResult from_json(const nlohmann::json& j);
};

/// CFS on each given row set, then keep features chosen at least
/// `stability_min` times.
SelectionResult stability_select_sets(const Dataset& data, const std::vector<std::vector<std::size_t>>& row_sets,
                                      std::size_t stability_min, const CfsParams& params = {}, unsigned jobs = 1);

/// Splits `rows` into k random folds and runs CFS on each fold's training
/// complement.
SelectionResult stability_select(const Dataset& data, std::span<const std::size_t> rows, std::size_t k,
                                 std::size_t stability_min, std::uint64_t seed, const CfsParams& params = {},
                                 unsigned jobs = 1);

}  // namespace coloc

#endif  // COLOC_CFS_HPP
