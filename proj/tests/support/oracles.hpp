// Brute-force reference implementations. Deliberately naive: counting,
// enumeration and direct formula evaluation in long double.
#ifndef COLOC_TEST_ORACLES_HPP
#define COLOC_TEST_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

struct Counts {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
};

inline Counts count(const std::vector<double>& scores, const std::vector<int>& labels, double thr = 0.5) {
  Counts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool p = scores[i] >= thr;
    if (p && labels[i] == 1) c.tp++;
    if (p && labels[i] == 0) c.fp++;
    if (!p && labels[i] == 0) c.tn++;
    if (!p && labels[i] == 1) c.fn++;
  }
  return c;
}

inline double mcc(const Counts& c) {
  const long double tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  const long double d = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (d == 0) return 0.0;
  return static_cast<double>((tp * tn - fp * fn) / std::sqrt(d));
}

inline std::optional<double> ratio(std::uint64_t a, std::uint64_t b) {
  if (b == 0) return std::nullopt;
  return static_cast<double>(static_cast<long double>(a) / static_cast<long double>(b));
}

inline std::optional<double> precision(const Counts& c) { return ratio(c.tp, c.tp + c.fp); }
inline std::optional<double> recall(const Counts& c) { return ratio(c.tp, c.tp + c.fn); }
inline std::optional<double> specificity(const Counts& c) { return ratio(c.tn, c.tn + c.fp); }
inline std::optional<double> f1(const Counts& c) { return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn); }

/// Pair counting over all (positive, negative) pairs.
inline std::optional<double> auc(const std::vector<double>& s, const std::vector<int>& y) {
  long double wins = 0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) wins += 1;
      if (s[i] == s[j]) wins += 0.5L;
    }
  }
  if (pairs == 0) return std::nullopt;
  return static_cast<double>(wins / pairs);
}

/// P(X >= c), X ~ Binomial(n, p), by summing the pmf term by term.
inline double binomial_upper_tail(std::uint64_t c, std::uint64_t n, double p) {
  if (c == 0) return 1.0;
  if (c > n) return 0.0;
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(-static_cast<long double>(p));
  std::vector<long double> logs;
  for (std::uint64_t k = c; k <= n; ++k) {
    const long double lc = std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
                           std::lgamma(static_cast<long double>(n - k) + 1);
    logs.push_back(lc + k * lp + (n - k) * lq);
  }
  const long double m = *std::max_element(logs.begin(), logs.end());
  long double sum = 0;
  for (auto l : logs) sum += std::exp(l - m);
  return static_cast<double>(std::exp(m) * sum);
}

struct Weighted {
  double value;
  double weight;
};

inline long double sse(const std::vector<Weighted>& v, std::size_t lo, std::size_t hi) {
  long double w = 0, s = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    w += v[i].weight;
    s += static_cast<long double>(v[i].weight) * v[i].value;
  }
  const long double mean = s / w;
  long double out = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const long double d = v[i].value - mean;
    out += v[i].weight * d * d;
  }
  return out;
}

/// Minimum weighted within-cluster SSE over every split of the sorted
/// samples into k non-empty contiguous runs.
inline double best_contiguous_partition(std::vector<Weighted> v, std::size_t k) {
  std::sort(v.begin(), v.end(), [](const Weighted& a, const Weighted& b) { return a.value < b.value; });
  const std::size_t n = v.size();
  long double best = std::numeric_limits<long double>::infinity();
  std::vector<std::size_t> cuts;
  std::function<void(std::size_t, std::size_t, long double)> rec = [&](std::size_t start, std::size_t left,
                                                                        long double acc) {
    if (left == 1) {
      best = std::min(best, acc + sse(v, start, n));
      return;
    }
    for (std::size_t end = start + 1; end + left - 1 <= n; ++end) rec(end, left - 1, acc + sse(v, start, end));
  };
  rec(0, k, 0);
  return static_cast<double>(best);
}

/// Exhaustive CFS: best merit over every non-empty subset of `p` features.
inline double best_subset_merit(std::size_t p, const std::vector<double>& rcf,
                                const std::function<double(std::size_t, std::size_t)>& rff,
                                const std::vector<std::size_t>& allowed) {
  double best = 0.0;
  const std::size_t m = allowed.size();
  for (std::uint64_t mask = 1; mask < (1ULL << m); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) s.push_back(allowed[i]);
    }
    long double cf = 0, ff = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      cf += rcf[s[i]];
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i != j) ff += rff(s[i], s[j]);
      }
    }
    const long double k = s.size();
    const long double mean_cf = cf / k;
    const long double mean_ff = s.size() > 1 ? ff / (k * (k - 1)) : 0;
    const long double merit = k * mean_cf / std::sqrt(k + k * (k - 1) * mean_ff);
    best = std::max(best, static_cast<double>(merit));
  }
  (void)p;
  return best;
}

/// Pearson over complete pairs, by definition.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    n += 1;
    sx += x[i];
    sy += y[i];
  }
  if (n < 2) return 0.0;
  const long double mx = sx / n, my = sy / n;
  long double cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  if (cxx == 0 || cyy == 0) return 0.0;
  return static_cast<double>(cxy / std::sqrt(cxx * cyy));
}

/// Maximal runs of `value` in a tri-state series (-1 missing), as lengths.
inline std::vector<int> runs(const std::vector<int>& s, int value) {
  std::vector<int> out;
  int cur = 0;
  for (int v : s) {
    if (v == value) {
      ++cur;
    } else {
      if (cur > 0) out.push_back(cur);
      cur = 0;
    }
  }
  if (cur > 0) out.push_back(cur);
  return out;
}

/// Great-circle distance from the chord between unit vectors.
inline double chord_distance_m(double lat1, double lon1, double lat2, double lon2) {
  const long double pi = 3.141592653589793238462643383279502884L;
  auto vec = [&](double lat, double lon) {
    const long double a = lat * pi / 180, b = lon * pi / 180;
    return std::array<long double, 3>{std::cos(a) * std::cos(b), std::cos(a) * std::sin(b), std::sin(a)};
  };
  const auto p = vec(lat1, lon1), q = vec(lat2, lon2);
  long double c2 = 0;
  for (int i = 0; i < 3; ++i) c2 += (p[i] - q[i]) * (p[i] - q[i]);
  return static_cast<double>(2.0L * std::asin(std::sqrt(c2) / 2.0L) * 6371000.0L);
}

/// z with P(Z > z) = tail for a standard normal, by bisection on erfc.
inline double normal_upper_quantile(double tail) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline bool close_rel(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace oracle

#endif  // COLOC_TEST_ORACLES_HPP
