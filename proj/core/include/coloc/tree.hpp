#ifndef COLOC_TREE_HPP
#define COLOC_TREE_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coloc/common.hpp"

namespace coloc {

class FeatureMatrix;
struct LabelTable;

/// Column-major float design matrix with 0/1 labels. NaN cells are missing.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::vector<std::string> column_names);

  /// One row per label row, restricted to `columns` of the feature matrix
  /// (all columns when empty).
  static Dataset from_labels(const FeatureMatrix& features, const LabelTable& labels,
                             std::span<const std::size_t> columns = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  float at(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  void set(std::size_t r, std::size_t c, double v) { data_[c * rows_ + r] = static_cast<float>(v); }
  std::span<const float> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
  const std::vector<std::string>& column_names() const { return names_; }

  std::vector<int>& labels() { return labels_; }
  const std::vector<int>& labels() const { return labels_; }

  /// Copy keeping only the listed columns, in the given order.
  Dataset select_columns(std::span<const std::size_t> columns) const;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<float> data_;
  std::vector<int> labels_;
};

struct TreeParams {
  int max_depth = 0;                  // 0 = unlimited
  std::size_t min_leaf = 1;           // rows per child
  std::size_t features_per_split = 0;  // 0 = all features
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when value <= threshold
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double positive = 0.0;  // weighted fraction of positive rows reaching the node
  double weight = 0.0;
};

/// CART classifier with weighted Gini splits. Rows missing the split feature
/// follow the branch that received more weight at fit time.
class DecisionTree {
 public:
  /// `weights` is indexed by dataset row; rows not listed in `rows` are
  /// ignored, as are rows of weight zero.
  static DecisionTree fit(const Dataset& data, std::span<const std::size_t> rows, std::span<const double> weights,
                          const TreeParams& params, Rng& rng);
  static DecisionTree fit(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params,
                          Rng& rng);

  /// Leaf positive fraction.
  double predict_proba(const Dataset& data, std::size_t row) const { return nodes_[leaf(data, row)].positive; }
  /// Hard vote: 1 when the leaf is majority positive.
  int vote(const Dataset& data, std::size_t row) const { return predict_proba(data, row) > 0.5 ? 1 : 0; }
  std::size_t leaf(const Dataset& data, std::size_t row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace coloc

#endif  // COLOC_TREE_HPP
