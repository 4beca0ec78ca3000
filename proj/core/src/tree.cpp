#include "coloc/tree.hpp"

#include <algorithm>
#include <numeric>

#include "coloc/features.hpp"
#include "coloc/networks.hpp"

namespace coloc {

Dataset::Dataset(std::size_t rows, std::vector<std::string> column_names)
    : rows_(rows), names_(std::move(column_names)), data_(rows_ * names_.size(), 0.0f), labels_(rows, 0) {}

Dataset Dataset::from_labels(const FeatureMatrix& features, const LabelTable& labels,
                             std::span<const std::size_t> columns) {
  std::vector<std::size_t> cols(columns.begin(), columns.end());
  if (cols.empty()) {
    cols.resize(features.cols());
    std::iota(cols.begin(), cols.end(), 0);
  }
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (auto c : cols) {
    if (c >= features.cols()) throw InputError("feature column index out of range");
    names.push_back(features.columns()[c]);
  }
  Dataset d(labels.size(), std::move(names));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto src = features.row(labels.rows[r].feature_row);
    for (std::size_t j = 0; j < cols.size(); ++j) d.set(r, j, src[cols[j]]);
    d.labels_[r] = labels.rows[r].label;
  }
  return d;
}

Dataset Dataset::select_columns(std::span<const std::size_t> columns) const {
  std::vector<std::string> names;
  for (auto c : columns) names.push_back(names_.at(c));
  Dataset d(rows_, std::move(names));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(columns[j] * rows_), rows_,
                d.data_.begin() + static_cast<std::ptrdiff_t>(j * rows_));
  }
  d.labels_ = labels_;
  return d;
}

namespace {

inline double gini(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0) return 0.0;
  const double p0 = w0 / w, p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  bool missing_left = true;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::span<const double> weights, const TreeParams& params, Rng& rng)
      : data_(data), weights_(weights), params_(params), rng_(rng) {
    features_.resize(data.cols());
    std::iota(features_.begin(), features_.end(), 0);
  }

  std::vector<TreeNode> build(std::vector<std::uint32_t> rows) {
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::uint32_t> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double w0 = 0, w1 = 0;
    for (auto r : rows) (data_.labels()[r] ? w1 : w0) += weights_[r];
    nodes_[id].weight = w0 + w1;
    nodes_[id].positive = (w0 + w1) > 0 ? w1 / (w0 + w1) : 0.0;

    const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
    if (w0 == 0 || w1 == 0 || depth_capped || rows.size() < 2 * params_.min_leaf) return id;

    const Split split = best_split(rows, w0, w1);
    if (split.feature < 0) return id;

    std::vector<std::uint32_t> left, right;
    for (auto r : rows) {
      const float v = data_.at(r, static_cast<std::size_t>(split.feature));
      const bool go_left = std::isnan(v) ? split.missing_left : v <= split.threshold;
      (go_left ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    nodes_[id].missing_left = split.missing_left;
    const int l = grow(std::move(left), depth + 1);
    nodes_[id].left = l;
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].right = r;
    return id;
  }

  std::span<const std::size_t> candidates() {
    const std::size_t p = features_.size();
    const std::size_t m = params_.features_per_split;
    if (m == 0 || m >= p) return features_;
    // Partial Fisher-Yates: the first m entries become a uniform sample.
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + rng_.below(p - i);
      std::swap(features_[i], features_[j]);
    }
    std::sort(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(m));
    return std::span(features_).first(m);
  }

  Split best_split(const std::vector<std::uint32_t>& rows, double w0, double w1) {
    const double total = w0 + w1;
    const double parent = gini(w0, w1);
    Split best;
    for (std::size_t f : candidates()) {
      const auto col = data_.column(f);
      values_.clear();
      double m0 = 0, m1 = 0;
      std::size_t m_count = 0;
      for (auto r : rows) {
        const float v = col[r];
        if (std::isnan(v)) {
          (data_.labels()[r] ? m1 : m0) += weights_[r];
          ++m_count;
        } else {
          values_.push_back({v, r});
        }
      }
      if (values_.size() < 2) continue;
      std::sort(values_.begin(), values_.end(), [](const auto& a, const auto& b) {
        return a.first < b.first || (a.first == b.first && a.second < b.second);
      });
      const double n0 = w0 - m0, n1 = w1 - m1;
      double l0 = 0, l1 = 0;
      const std::size_t n = values_.size();
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto r = values_[i].second;
        (data_.labels()[r] ? l1 : l0) += weights_[r];
        if (values_[i].first == values_[i + 1].first) continue;
        const double r0 = n0 - l0, r1 = n1 - l1;
        const bool missing_left = l0 + l1 >= r0 + r1;
        const std::size_t left_count = i + 1 + (missing_left ? m_count : 0);
        const std::size_t right_count = n - i - 1 + (missing_left ? 0 : m_count);
        if (left_count < params_.min_leaf || right_count < params_.min_leaf) continue;
        const double a0 = l0 + (missing_left ? m0 : 0), a1 = l1 + (missing_left ? m1 : 0);
        const double b0 = r0 + (missing_left ? 0 : m0), b1 = r1 + (missing_left ? 0 : m1);
        const double child = ((a0 + a1) * gini(a0, a1) + (b0 + b1) * gini(b0, b1)) / total;
        const double gain = parent - child;
        if (gain > best.gain + 1e-12) {
          const double lo = values_[i].first, hi = values_[i + 1].first;
          best = Split{static_cast<int>(f), lo + (hi - lo) / 2.0, missing_left, gain};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  std::span<const double> weights_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<float, std::uint32_t>> values_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree DecisionTree::fit(const Dataset& data, std::span<const std::size_t> rows,
                               std::span<const double> weights, const TreeParams& params, Rng& rng) {
  if (rows.empty()) throw InputError("cannot fit a tree on zero rows");
  if (weights.size() != data.rows()) throw InputError("weights must be indexed by dataset row");
  std::vector<std::uint32_t> active;
  active.reserve(rows.size());
  for (auto r : rows) {
    if (weights[r] > 0) active.push_back(static_cast<std::uint32_t>(r));
  }
  if (active.empty()) throw InputError("all tree rows have zero weight");
  TreeBuilder builder(data, weights, params, rng);
  DecisionTree tree;
  tree.nodes_ = builder.build(std::move(active));
  return tree;
}

DecisionTree DecisionTree::fit(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params,
                               Rng& rng) {
  std::vector<double> w(data.rows(), 0.0);
  for (auto r : rows) w[r] = 1.0;
  return fit(data, rows, w, params, rng);
}

std::size_t DecisionTree::leaf(const Dataset& data, std::size_t row) const {
  std::size_t n = 0;
  while (nodes_[n].feature >= 0) {
    const TreeNode& node = nodes_[n];
    const float v = data.at(row, static_cast<std::size_t>(node.feature));
    const bool go_left = std::isnan(v) ? node.missing_left : v <= node.threshold;
    n = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  return n;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature < 0) continue;
    d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
    d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    if (n.feature < 0) {
      nodes.push_back({{"leaf", n.positive}, {"weight", n.weight}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"missing", n.missing_left ? "left" : "right"},
                       {"left", n.left},
                       {"right", n.right},
                       {"positive", n.positive},
                       {"weight", n.weight}});
    }
  }
  return {{"nodes", nodes}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  DecisionTree t;
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.weight = n.at("weight").get<double>();
    if (n.contains("leaf")) {
      node.positive = n.at("leaf").get<double>();
    } else {
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.missing_left = n.at("missing").get<std::string>() == "left";
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
      node.positive = n.at("positive").get<double>();
    }
    t.nodes_.push_back(node);
  }
  const auto count = static_cast<int>(t.nodes_.size());
  for (const auto& n : t.nodes_) {
    if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count)) {
      throw InputError("tree model: child index out of range");
    }
  }
  if (t.nodes_.empty()) throw InputError("tree model: no nodes");
  return t;
}

}  // namespace coloc
