#ifndef COLOC_THRESHOLDS_HPP
#define COLOC_THRESHOLDS_HPP

#include <span>
#include <vector>

#include <json.hpp>

#include "coloc/config.hpp"
#include "coloc/geodyads.hpp"
#include "coloc/ingest.hpp"

namespace coloc {

struct WeightedSample {
  double value = 0.0;
  double weight = 1.0;
};

struct EccdfPoint {
  double value = 0.0;
  double exceed = 0.0;  // weighted fraction of samples strictly greater than value
};

/// Weighted empirical survival function, one point per distinct value.
class Eccdf {
 public:
  explicit Eccdf(std::vector<EccdfPoint> points) : points_(std::move(points)) {}

  const std::vector<EccdfPoint>& points() const { return points_; }
  /// Right-continuous step evaluation: fraction of weight strictly above x.
  double exceed(double x) const;

 private:
  std::vector<EccdfPoint> points_;
};

/// Throws InputError on empty input or non-positive weights.
Eccdf eccdf(std::span<const WeightedSample> samples);

struct ThresholdSet {
  double cutoff = 2000.0;
  std::vector<double> breaks;  // strictly increasing, last == cutoff

  void validate() const;
  nlohmann::json to_json() const;
  static ThresholdSet from_json(const nlohmann::json& j);
};

struct Cluster {
  double min = 0.0;
  double max = 0.0;
  double weight = 0.0;
  double mean = 0.0;
};

struct Clustering {
  std::vector<Cluster> clusters;
  double cost = 0.0;  // total weighted within-cluster sum of squares
  ThresholdSet thresholds;
};

/// Optimal weighted 1-D k-means over contiguous partitions of the sorted
/// values (exact dynamic program). Break m is the midpoint between cluster m
/// and m+1; the final break is `cutoff`. Requires every value < cutoff and at
/// least k distinct values.
Clustering cluster_1d(std::span<const WeightedSample> samples, std::size_t k, double cutoff);

/// Weighted within-cluster sum of squares for a run of samples (two-pass).
double weighted_sse(std::span<const WeightedSample> run);

ThresholdSet static_thresholds(const StudyConfig& config);

/// One sample per bin in which both members of a dyad are located, weighted
/// by the bin width in minutes. Values are rounded to `resolution_m` (0 keeps
/// them exact) and equal values merged; output sorted by value.
std::vector<WeightedSample> distance_samples(const GridSet& grids, std::span<const Dyad> dyads,
                                             double resolution_m, unsigned jobs = 1);

}  // namespace coloc

#endif  // COLOC_THRESHOLDS_HPP
