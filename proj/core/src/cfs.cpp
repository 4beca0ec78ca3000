#include "coloc/cfs.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/normal.hpp>

namespace coloc {

double pearson_pairwise(std::span<const double> x, std::span<const double> y) {
  COLOC_ENSURE(x.size() == y.size(), "pearson: length mismatch");
  std::size_t n = 0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    ++n;
    mx += x[i];
    my += y[i];
  }
  if (n < 2) return 0.0;
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationCache::CorrelationCache(const Dataset& data, std::span<const std::size_t> rows)
    : data_(data), rows_(rows.begin(), rows.end()), class_(data.cols(), 0.0), present_(data.cols(), 0) {
  std::vector<double> x(rows_.size()), y(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) y[i] = data.labels()[rows_[i]];
  for (std::size_t f = 0; f < data.cols(); ++f) {
    const auto col = data.column(f);
    std::size_t present = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      x[i] = col[rows_[i]];
      if (!std::isnan(x[i])) ++present;
    }
    present_[f] = present;
    class_[f] = std::abs(pearson_pairwise(x, y));
  }
}

double CorrelationCache::feature_corr(std::size_t a, std::size_t b) {
  if (a == b) return 1.0;
  if (a > b) std::swap(a, b);
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  if (auto it = pairs_.find(key); it != pairs_.end()) return it->second;
  std::vector<double> x(rows_.size()), y(rows_.size());
  const auto ca = data_.column(a), cb = data_.column(b);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    x[i] = ca[rows_[i]];
    y[i] = cb[rows_[i]];
  }
  const double r = std::abs(pearson_pairwise(x, y));
  pairs_.emplace(key, r);
  return r;
}

double cfs_merit(std::size_t k, double sum_cf, double sum_ff) {
  if (k == 0) return 0.0;
  const double kd = static_cast<double>(k);
  const double denom = kd + 2.0 * sum_ff;
  if (denom <= 0) return 0.0;
  return sum_cf / std::sqrt(denom);
}

double cfs_merit(std::span<const std::size_t> subset, CorrelationCache& cache) {
  double cf = 0, ff = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    cf += cache.class_corr(subset[i]);
    for (std::size_t j = i + 1; j < subset.size(); ++j) ff += cache.feature_corr(subset[i], subset[j]);
  }
  return cfs_merit(subset.size(), cf, ff);
}

namespace {

struct Node {
  std::vector<std::size_t> subset;  // ascending
  double sum_cf = 0;
  double sum_ff = 0;
  double merit = 0;
};

struct OpenOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.merit != b.merit) return a.merit > b.merit;
    if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
    return a.subset < b.subset;
  }
};

std::vector<std::size_t> candidates(CorrelationCache& cache, const CfsParams& params) {
  std::vector<std::size_t> out;
  const std::size_t p = cache.features();
  double z = 0.0;
  if (params.alpha > 0 && p > 0) {
    const boost::math::normal_distribution<double> normal;
    z = boost::math::quantile(normal, 1.0 - params.alpha / (2.0 * static_cast<double>(p)));
  }
  for (std::size_t f = 0; f < p; ++f) {
    const double r = cache.class_corr(f);
    if (r <= 0) continue;
    if (params.alpha > 0) {
      const auto n = static_cast<double>(cache.present(f));
      if (n < 3 || r * std::sqrt(n) <= z) continue;
    }
    // An exact copy of an earlier candidate can still raise the merit of a
    // subset holding weaker features, so collinear columns enter once.
    const bool copy = std::any_of(out.begin(), out.end(), [&](std::size_t g) {
      return std::abs(cache.class_corr(g) - r) <= 1e-9 && cache.feature_corr(g, f) >= 1.0 - 1e-9;
    });
    if (copy) continue;
    out.push_back(f);
  }
  return out;
}

}  // namespace

CfsResult cfs_select(CorrelationCache& cache, const CfsParams& params) {
  const auto pool = candidates(cache, params);
  std::set<Node, OpenOrder> open;
  std::set<std::vector<std::size_t>> visited;
  Node best;
  open.insert(best);
  visited.insert(best.subset);
  std::size_t stale = 0, expansions = 0;

  while (!open.empty() && stale < params.max_stale) {
    Node node = *open.begin();
    open.erase(open.begin());
    ++expansions;
    bool improved = false;
    for (std::size_t f : pool) {
      if (std::binary_search(node.subset.begin(), node.subset.end(), f)) continue;
      Node child;
      child.subset = node.subset;
      child.subset.insert(std::upper_bound(child.subset.begin(), child.subset.end(), f), f);
      if (!visited.insert(child.subset).second) continue;
      child.sum_cf = node.sum_cf + cache.class_corr(f);
      child.sum_ff = node.sum_ff;
      for (std::size_t g : node.subset) child.sum_ff += cache.feature_corr(f, g);
      child.merit = cfs_merit(child.subset.size(), child.sum_cf, child.sum_ff);
      if (child.merit > best.merit + params.min_improvement) {
        best = child;
        improved = true;
      }
      open.insert(std::move(child));
    }
    stale = improved ? 0 : stale + 1;
  }
  return CfsResult{best.subset, best.merit, expansions};
}

CfsResult cfs_select(const Dataset& data, std::span<const std::size_t> rows, const CfsParams& params) {
  CorrelationCache cache(data, rows);
  return cfs_select(cache, params);
}

nlohmann::ordered_json SelectionResult::to_json() const {
  nlohmann::ordered_json j;
  j["folds"] = folds;
  j["stability_min"] = stability_min;
  j["fold_sets"] = fold_sets;
  nlohmann::ordered_json counts_j = nlohmann::ordered_json::object();
  for (const auto& [name, c] : counts) counts_j[name] = c;
  j["counts"] = counts_j;
  j["final_set"] = final_set;
  return j;
}

SelectionResult SelectionResult::from_json(const nlohmann::json& j) {
  SelectionResult s;
  s.folds = j.at("folds").get<std::size_t>();
  s.stability_min = j.at("stability_min").get<std::size_t>();
  s.fold_sets = j.at("fold_sets").get<std::vector<std::vector<std::string>>>();
  for (const auto& [name, c] : j.at("counts").items()) s.counts[name] = c.get<std::size_t>();
  s.final_set = j.at("final_set").get<std::vector<std::string>>();
  return s;
}

SelectionResult stability_select_sets(const Dataset& data, const std::vector<std::vector<std::size_t>>& row_sets,
                                      std::size_t stability_min, const CfsParams& params, unsigned jobs) {
  std::vector<CfsResult> results(row_sets.size());
  parallel_for(row_sets.size(), jobs, [&](std::size_t i) { results[i] = cfs_select(data, row_sets[i], params); });
  SelectionResult out;
  out.folds = row_sets.size();
  out.stability_min = stability_min;
  std::vector<std::size_t> count(data.cols(), 0);
  for (const auto& r : results) {
    std::vector<std::string> names;
    for (auto f : r.features) {
      names.push_back(data.column_names()[f]);
      ++count[f];
    }
    out.fold_sets.push_back(std::move(names));
  }
  for (std::size_t f = 0; f < data.cols(); ++f) {
    if (count[f] == 0) continue;
    out.counts[data.column_names()[f]] = count[f];
    if (count[f] >= stability_min) out.final_set.push_back(data.column_names()[f]);
  }
  return out;
}

SelectionResult stability_select(const Dataset& data, std::span<const std::size_t> rows, std::size_t k,
                                 std::size_t stability_min, std::uint64_t seed, const CfsParams& params,
                                 unsigned jobs) {
  if (k < 2) throw InputError("stability selection needs at least 2 folds");
  if (stability_min == 0 || stability_min > k) throw InputError("stability_min must be in [1, k]");
  Rng rng(seed, "stability");
  std::vector<std::size_t> fold(rows.size());
  for (auto& f : fold) f = rng.below(k);
  std::vector<std::vector<std::size_t>> sets(k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      if (fold[i] != f) sets[f].push_back(rows[i]);
    }
  }
  return stability_select_sets(data, sets, stability_min, params, jobs);
}

}  // namespace coloc
