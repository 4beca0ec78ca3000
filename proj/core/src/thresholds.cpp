#include "coloc/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace coloc {

namespace {

std::vector<WeightedSample> merge_sorted(std::span<const WeightedSample> samples) {
  std::vector<WeightedSample> v(samples.begin(), samples.end());
  for (const auto& s : v) {
    if (!(s.weight > 0) || !std::isfinite(s.weight) || !std::isfinite(s.value)) {
      throw InputError("weighted samples need finite values and positive weights");
    }
  }
  std::sort(v.begin(), v.end(), [](const WeightedSample& a, const WeightedSample& b) { return a.value < b.value; });
  std::vector<WeightedSample> merged;
  for (const auto& s : v) {
    if (!merged.empty() && merged.back().value == s.value) {
      merged.back().weight += s.weight;
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

}  // namespace

double Eccdf::exceed(double x) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), x,
                             [](double v, const EccdfPoint& p) { return v < p.value; });
  if (it == points_.begin()) return 1.0;
  return std::prev(it)->exceed;
}

Eccdf eccdf(std::span<const WeightedSample> samples) {
  if (samples.empty()) throw InputError("eccdf of an empty sample");
  const auto merged = merge_sorted(samples);
  double total = 0.0;
  for (const auto& s : merged) total += s.weight;
  std::vector<EccdfPoint> pts;
  pts.reserve(merged.size());
  double above = total;
  for (const auto& s : merged) {
    above -= s.weight;
    pts.push_back({s.value, std::max(0.0, above / total)});
  }
  pts.back().exceed = 0.0;
  return Eccdf(std::move(pts));
}

void ThresholdSet::validate() const {
  if (breaks.empty()) throw InputError("threshold set has no breaks");
  if (breaks.back() != cutoff) throw InputError("last break must equal the cutoff");
  if (!(breaks.front() > 0)) throw InputError("breaks must be positive");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) throw InputError("breaks must be strictly increasing");
  }
}

nlohmann::json ThresholdSet::to_json() const { return {{"cutoff", cutoff}, {"breaks", breaks}}; }

ThresholdSet ThresholdSet::from_json(const nlohmann::json& j) {
  ThresholdSet t;
  try {
    t.cutoff = j.at("cutoff").get<double>();
    t.breaks = j.at("breaks").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("thresholds: ") + e.what());
  }
  t.validate();
  return t;
}

double weighted_sse(std::span<const WeightedSample> run) {
  double w = 0.0;
  double wx = 0.0;
  for (const auto& s : run) {
    w += s.weight;
    wx += s.weight * s.value;
  }
  if (w == 0.0) return 0.0;
  const double mean = wx / w;
  double sse = 0.0;
  for (const auto& s : run) sse += s.weight * (s.value - mean) * (s.value - mean);
  return sse;
}

namespace {

// Prefix sums over centered values; cost(i, j) is the SSE of merged[i..j].
class SegmentCost {
 public:
  explicit SegmentCost(const std::vector<WeightedSample>& v) {
    long double tw = 0, twx = 0;
    for (const auto& s : v) {
      tw += s.weight;
      twx += static_cast<long double>(s.weight) * s.value;
    }
    const long double center = twx / tw;
    w_.assign(v.size() + 1, 0);
    wx_.assign(v.size() + 1, 0);
    wxx_.assign(v.size() + 1, 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const long double x = v[i].value - center;
      w_[i + 1] = w_[i] + v[i].weight;
      wx_[i + 1] = wx_[i] + v[i].weight * x;
      wxx_[i + 1] = wxx_[i] + v[i].weight * x * x;
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    const long double w = w_[j + 1] - w_[i];
    const long double wx = wx_[j + 1] - wx_[i];
    const long double wxx = wxx_[j + 1] - wxx_[i];
    const long double c = wxx - wx * wx / w;
    return c > 0 ? static_cast<double>(c) : 0.0;
  }

 private:
  std::vector<long double> w_, wx_, wxx_;
};

// One layer of the DP by divide and conquer: the leftmost optimal split is
// monotone in the right endpoint for this cost, so each layer costs O(n log n).
void solve_layer(const SegmentCost& cost, const std::vector<double>& prev, std::vector<double>& cur,
                 std::vector<std::size_t>& arg, std::size_t lo, std::size_t hi, std::size_t opt_lo,
                 std::size_t opt_hi) {
  if (lo > hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = opt_lo;
  const std::size_t last = std::min(mid, opt_hi);
  // Split i means the final cluster is [i, mid]; prev[i-1] covers [0, i-1].
  for (std::size_t i = opt_lo; i <= last; ++i) {
    const double v = prev[i - 1] + cost(i, mid);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  cur[mid] = best;
  arg[mid] = best_i;
  if (mid > lo) solve_layer(cost, prev, cur, arg, lo, mid - 1, opt_lo, best_i);
  solve_layer(cost, prev, cur, arg, mid + 1, hi, best_i, opt_hi);
}

}  // namespace

Clustering cluster_1d(std::span<const WeightedSample> samples, std::size_t k, double cutoff) {
  if (k == 0) throw InputError("cluster_1d needs k >= 1");
  const auto v = merge_sorted(samples);
  if (v.size() < k) {
    throw InputError("cluster_1d: " + std::to_string(v.size()) + " distinct values, fewer than k=" +
                     std::to_string(k));
  }
  if (v.back().value >= cutoff) throw InputError("cluster_1d: values must lie below the cutoff");
  const std::size_t n = v.size();
  const SegmentCost cost(v);

  // layer c holds the best cost of splitting [0, j] into c+1 clusters.
  std::vector<std::vector<std::size_t>> args(k, std::vector<std::size_t>(n, 0));
  std::vector<double> prev(n), cur(n, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < n; ++j) prev[j] = cost(0, j);
  for (std::size_t c = 1; c < k; ++c) {
    std::fill(cur.begin(), cur.end(), std::numeric_limits<double>::infinity());
    solve_layer(cost, prev, cur, args[c], c, n - 1, c, n - 1);
    std::swap(prev, cur);
  }

  std::vector<std::pair<std::size_t, std::size_t>> ranges(k);
  std::size_t end = n - 1;
  for (std::size_t c = k; c-- > 0;) {
    const std::size_t begin = c == 0 ? 0 : args[c][end];
    ranges[c] = {begin, end};
    if (c > 0) end = begin - 1;
  }

  Clustering out;
  out.thresholds.cutoff = cutoff;
  for (std::size_t c = 0; c < k; ++c) {
    const auto [b, e] = ranges[c];
    Cluster cl;
    cl.min = v[b].value;
    cl.max = v[e].value;
    double wx = 0.0;
    for (std::size_t i = b; i <= e; ++i) {
      cl.weight += v[i].weight;
      wx += v[i].weight * v[i].value;
    }
    cl.mean = wx / cl.weight;
    out.cost += weighted_sse(std::span(v).subspan(b, e - b + 1));
    out.clusters.push_back(cl);
  }
  for (std::size_t c = 0; c + 1 < k; ++c) {
    out.thresholds.breaks.push_back(0.5 * (out.clusters[c].max + out.clusters[c + 1].min));
  }
  out.thresholds.breaks.push_back(cutoff);
  return out;
}

ThresholdSet static_thresholds(const StudyConfig& config) {
  ThresholdSet t;
  t.breaks = config.static_thresholds_m;
  t.cutoff = t.breaks.back();
  t.validate();
  return t;
}

std::vector<WeightedSample> distance_samples(const GridSet& grids, std::span<const Dyad> dyads,
                                             double resolution_m, unsigned jobs) {
  if (resolution_m < 0) throw InputError("distance resolution must be non-negative");
  const double w = static_cast<double>(grids.bins->width()) / static_cast<double>(kMinuteMs);
  std::vector<std::vector<std::pair<double, std::size_t>>> per_dyad(dyads.size());
  parallel_for(dyads.size(), jobs, [&](std::size_t k) {
    const TimelineGrid* a = grids.find(dyads[k].a);
    const TimelineGrid* b = grids.find(dyads[k].b);
    if (a == nullptr || b == nullptr) throw InputError("dyad member without a grid: " + dyads[k].a + "/" + dyads[k].b);
    std::vector<double> values;
    for (std::size_t t = 0; t < a->size(); ++t) {
      if (!a->has_location(t) || !b->has_location(t)) continue;
      double d = haversine_m({a->lat[t], a->lon[t]}, {b->lat[t], b->lon[t]});
      if (resolution_m > 0) d = std::round(d / resolution_m) * resolution_m;
      values.push_back(d);
    }
    std::sort(values.begin(), values.end());
    auto& out = per_dyad[k];
    for (double v : values) {
      if (!out.empty() && out.back().first == v) {
        ++out.back().second;
      } else {
        out.emplace_back(v, 1);
      }
    }
  });
  std::map<double, std::size_t> merged;
  for (const auto& runs : per_dyad) {
    for (const auto& [v, c] : runs) merged[v] += c;
  }
  std::vector<WeightedSample> out;
  out.reserve(merged.size());
  for (const auto& [v, c] : merged) out.push_back({v, w * static_cast<double>(c)});
  return out;
}

}  // namespace coloc
