#include "coloc/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace coloc {

RandomForest RandomForest::fit(const Dataset& data, std::span<const std::size_t> rows, const ForestParams& params,
                               std::uint64_t seed) {
  if (params.trees == 0) throw InputError("forest needs at least one tree");
  if (rows.empty()) throw InputError("cannot fit a forest on zero rows");
  RandomForest forest;
  forest.seed_ = seed;
  forest.bootstrap_ = params.bootstrap;
  TreeParams tp = params.tree;
  if (tp.features_per_split == 0) {
    tp.features_per_split = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(data.cols()))));
  }
  forest.features_per_split_ = tp.features_per_split;
  forest.trees_.resize(params.trees);
  const Rng base(seed, "bootstrap");
  parallel_for(params.trees, params.jobs, [&](std::size_t t) {
    Rng rng = base.derive("tree", t);
    std::vector<double> w(data.rows(), 0.0);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < rows.size(); ++i) w[rows[rng.below(rows.size())]] += 1.0;
    } else {
      for (auto r : rows) w[r] = 1.0;
    }
    forest.trees_[t] = DecisionTree::fit(data, rows, w, tp, rng);
  });
  return forest;
}

double RandomForest::predict(const Dataset& data, std::size_t row) const {
  std::size_t votes = 0;
  for (const auto& t : trees_) votes += static_cast<std::size_t>(t.vote(data, row));
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

nlohmann::json RandomForest::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"trees_count", trees_.size()},
          {"features_per_split", features_per_split_},
          {"bootstrap", bootstrap_},
          {"seed", seed_},
          {"trees", trees}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
  RandomForest f;
  f.features_per_split_ = j.at("features_per_split").get<std::size_t>();
  f.bootstrap_ = j.at("bootstrap").get<bool>();
  f.seed_ = j.at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("trees")) f.trees_.push_back(DecisionTree::from_json(t));
  if (f.trees_.empty()) throw InputError("forest model: no trees");
  return f;
}

AdaBoost AdaBoost::fit(const Dataset& data, std::span<const std::size_t> rows, const AdaBoostParams& params,
                       std::uint64_t seed, BoostTrace* trace) {
  if (params.rounds == 0) throw InputError("boosting needs at least one round");
  if (rows.empty()) throw InputError("cannot fit boosting on zero rows");
  AdaBoost model;
  Rng rng(seed, "boost");
  const auto& y = data.labels();
  std::vector<double> w(data.rows(), 0.0);
  for (auto r : rows) w[r] = 1.0 / static_cast<double>(rows.size());
  std::vector<int> h(data.rows(), 0);
  std::vector<double> margin(data.rows(), 0.0);  // sum alpha*(2h-1)
  std::vector<double> total_alpha_pos(data.rows(), 0.0);
  double alpha_sum = 0.0;
  std::string stop = "rounds";

  for (std::size_t round = 0; round < params.rounds; ++round) {
    DecisionTree tree = DecisionTree::fit(data, rows, w, params.base, rng);
    double err = 0.0;
    for (auto r : rows) {
      h[r] = tree.vote(data, r);
      if (h[r] != y[r]) err += w[r];
    }
    double alpha = 0.0;
    bool last = false;
    if (err <= 0.0) {
      constexpr double kFloor = 1e-10;
      alpha = 0.5 * std::log((1.0 - kFloor) / kFloor);
      stop = "zero_error";
      last = true;
    } else if (err >= 0.5) {
      stop = "error_at_least_half";
      if (!model.members_.empty()) {
        if (trace) trace->stop_reason = stop;
        break;
      }
      alpha = 1.0;
      last = true;
    } else {
      alpha = 0.5 * std::log((1.0 - err) / err);
    }
    model.members_.push_back(std::move(tree));
    model.alphas_.push_back(alpha);
    alpha_sum += alpha;

    double sum = 0.0;
    if (!last) {
      for (auto r : rows) {
        w[r] *= std::exp(h[r] != y[r] ? alpha : -alpha);
        sum += w[r];
      }
      for (auto r : rows) w[r] /= sum;
    }
    std::size_t wrong = 0;
    for (auto r : rows) {
      if (h[r]) total_alpha_pos[r] += alpha;
      const int pred = total_alpha_pos[r] / alpha_sum >= 0.5 ? 1 : 0;
      if (pred != y[r]) ++wrong;
    }
    if (trace) {
      double s = 0.0;
      for (auto r : rows) s += w[r];
      trace->weighted_error.push_back(err);
      trace->alpha.push_back(alpha);
      trace->weight_sum.push_back(s);
      trace->train_error.push_back(static_cast<double>(wrong) / static_cast<double>(rows.size()));
    }
    if (last) break;
  }
  if (trace) trace->stop_reason = stop;
  return model;
}

double AdaBoost::predict(const Dataset& data, std::size_t row) const {
  double pos = 0.0, total = 0.0;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    total += alphas_[m];
    if (members_[m].vote(data, row)) pos += alphas_[m];
  }
  return total > 0 ? pos / total : 0.0;
}

nlohmann::json AdaBoost::to_json() const {
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t m = 0; m < members_.size(); ++m) {
    auto j = members_[m].to_json();
    j["alpha"] = alphas_[m];
    members.push_back(std::move(j));
  }
  return {{"rounds", members_.size()}, {"members", members}};
}

AdaBoost AdaBoost::from_json(const nlohmann::json& j) {
  AdaBoost a;
  for (const auto& m : j.at("members")) {
    a.members_.push_back(DecisionTree::from_json(m));
    a.alphas_.push_back(m.at("alpha").get<double>());
  }
  if (a.members_.empty()) throw InputError("boosting model: no members");
  return a;
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kForest: return "forest";
    case ModelKind::kAdaBoost: return "adaboost";
    case ModelKind::kTree: return "tree";
  }
  return "forest";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "forest") return ModelKind::kForest;
  if (s == "adaboost") return ModelKind::kAdaBoost;
  if (s == "tree") return ModelKind::kTree;
  throw InputError("unknown model '" + s + "'");
}

Model Model::fit(const Dataset& data, std::span<const std::size_t> rows, const ModelParams& params,
                 std::uint64_t seed, const std::string& schema_hash) {
  Model m;
  m.columns_ = data.column_names();
  m.schema_hash_ = schema_hash;
  switch (params.kind) {
    case ModelKind::kForest:
      m.impl_ = RandomForest::fit(data, rows, params.forest, seed);
      break;
    case ModelKind::kAdaBoost:
      m.impl_ = AdaBoost::fit(data, rows, params.boost, seed);
      break;
    case ModelKind::kTree: {
      Rng rng(seed, "tree");
      m.impl_ = DecisionTree::fit(data, rows, params.tree, rng);
      break;
    }
  }
  return m;
}

ModelKind Model::kind() const {
  return static_cast<ModelKind>(impl_.index());
}

double Model::predict(const Dataset& data, std::size_t row) const {
  return std::visit(
      [&](const auto& impl) -> double {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          return impl.predict_proba(data, row);
        } else {
          return impl.predict(data, row);
        }
      },
      impl_);
}

std::vector<double> Model::predict(const Dataset& data, std::span<const std::size_t> rows) const {
  if (data.column_names() != columns_) throw InputError("dataset columns do not match the model");
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(predict(data, r));
  return out;
}

nlohmann::json Model::to_json() const {
  nlohmann::json j;
  j["format"] = "coloc-model/1";
  j["kind"] = to_string(kind());
  j["schema_hash"] = schema_hash_;
  j["columns"] = columns_;
  j["model"] = std::visit([](const auto& impl) { return impl.to_json(); }, impl_);
  return j;
}

Model Model::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "coloc-model/1") throw InputError("not a coloc model document");
  Model m;
  m.schema_hash_ = j.at("schema_hash").get<std::string>();
  m.columns_ = j.at("columns").get<std::vector<std::string>>();
  const auto kind = parse_model_kind(j.at("kind").get<std::string>());
  const auto& body = j.at("model");
  switch (kind) {
    case ModelKind::kForest: m.impl_ = RandomForest::from_json(body); break;
    case ModelKind::kAdaBoost: m.impl_ = AdaBoost::from_json(body); break;
    case ModelKind::kTree: m.impl_ = DecisionTree::from_json(body); break;
  }
  const int p = static_cast<int>(m.columns_.size());
  auto check = [p](const DecisionTree& t) {
    for (const auto& n : t.nodes()) {
      if (n.feature >= p) throw InputError("model references a feature outside its columns");
    }
  };
  std::visit(
      [&](const auto& impl) {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          check(impl);
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          for (const auto& t : impl.trees()) check(t);
        } else {
          for (const auto& t : impl.members()) check(t);
        }
      },
      m.impl_);
  return m;
}

}  // namespace coloc
