#ifndef COLOC_ENSEMBLE_HPP
#define COLOC_ENSEMBLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coloc/tree.hpp"

namespace coloc {

struct ForestParams {
  std::size_t trees = 100;
  TreeParams tree{};  // features_per_split 0 means ceil(sqrt(p))
  bool bootstrap = true;
  unsigned jobs = 1;
};

class RandomForest {
 public:
  static RandomForest fit(const Dataset& data, std::span<const std::size_t> rows, const ForestParams& params,
                          std::uint64_t seed);

  /// Fraction of trees voting positive.
  double predict(const Dataset& data, std::size_t row) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::vector<DecisionTree>& trees() { return trees_; }
  std::size_t features_per_split() const { return features_per_split_; }
  bool bootstrap() const { return bootstrap_; }
  std::uint64_t seed() const { return seed_; }

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);

 private:
  std::vector<DecisionTree> trees_;
  std::size_t features_per_split_ = 0;
  bool bootstrap_ = true;
  std::uint64_t seed_ = 0;
};

struct AdaBoostParams {
  std::size_t rounds = 50;
  TreeParams base{1, 1, 0};
};

/// Per-round record of a boosting fit.
struct BoostTrace {
  std::vector<double> weighted_error;
  std::vector<double> alpha;
  std::vector<double> weight_sum;   // after renormalisation
  std::vector<double> train_error;  // ensemble so far, unweighted
  std::string stop_reason;
};

class AdaBoost {
 public:
  static AdaBoost fit(const Dataset& data, std::span<const std::size_t> rows, const AdaBoostParams& params,
                      std::uint64_t seed, BoostTrace* trace = nullptr);

  /// Alpha-weighted fraction of members voting positive.
  double predict(const Dataset& data, std::size_t row) const;

  const std::vector<DecisionTree>& members() const { return members_; }
  const std::vector<double>& alphas() const { return alphas_; }

  nlohmann::json to_json() const;
  static AdaBoost from_json(const nlohmann::json& j);

 private:
  std::vector<DecisionTree> members_;
  std::vector<double> alphas_;
};

enum class ModelKind { kForest, kAdaBoost, kTree };
std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct ModelParams {
  ModelKind kind = ModelKind::kForest;
  ForestParams forest{};
  AdaBoostParams boost{};
  TreeParams tree{};
};

/// A fitted classifier bound to named feature columns.
class Model {
 public:
  static Model fit(const Dataset& data, std::span<const std::size_t> rows, const ModelParams& params,
                   std::uint64_t seed, const std::string& schema_hash);

  double predict(const Dataset& data, std::size_t row) const;
  std::vector<double> predict(const Dataset& data, std::span<const std::size_t> rows) const;

  ModelKind kind() const;
  const std::vector<std::string>& columns() const { return columns_; }
  const std::string& schema_hash() const { return schema_hash_; }

  nlohmann::json to_json() const;
  static Model from_json(const nlohmann::json& j);

 private:
  std::variant<RandomForest, AdaBoost, DecisionTree> impl_;
  std::vector<std::string> columns_;
  std::string schema_hash_;
};

}  // namespace coloc

#endif  // COLOC_ENSEMBLE_HPP
