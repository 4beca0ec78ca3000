#ifndef COLOC_PIPELINE_HPP
#define COLOC_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coloc/ensemble.hpp"
#include "coloc/evalkit.hpp"
#include "coloc/networks.hpp"

namespace coloc {

struct PipelineOptions {
  std::string config_path;  // study config (synth config for simulate)
  std::string out_dir = "out";
  /// Ingest inputs; explicit paths win over files found in data_dir.
  std::string data_dir;
  std::string locations_path;
  std::string wifi_path;
  std::string surveys_path;
  std::uint64_t seed = 1;
  std::vector<Target> targets{Target::kFriend};
  std::vector<CvSchema> schemas{CvSchema::kUnrestricted, CvSchema::kDyadic, CvSchema::kTemporalBlock};
  int folds = 10;
  ModelKind model = ModelKind::kForest;
  std::string features = "all";  // or selected:<path>
  unsigned jobs = 1;
  std::size_t trees = 100;
  std::size_t boost_rounds = 50;
  std::size_t stability_folds = 10;
  std::size_t stability_min = 9;
  bool force = false;
};

struct StageResult {
  std::string stage;
  bool skipped = false;
  std::vector<std::string> outputs;  // relative to out_dir
  std::vector<std::string> notes;
};

/// FNV-1a of the file bytes as 16 hex digits.
std::string hash_file(const std::string& path);

/// Stage records of one output directory (manifest.json).
class Manifest {
 public:
  struct Stage {
    std::string config_path;
    std::string config_hash;
    std::uint64_t seed = 0;
    nlohmann::json params = nlohmann::json::object();
    std::map<std::string, std::string> inputs;   // path -> hash
    std::map<std::string, std::string> outputs;  // path relative to out_dir -> hash
  };

  static Manifest load(const std::string& out_dir);
  void save(const std::string& out_dir) const;

  const Stage* find(const std::string& name) const;
  void set(const std::string& name, Stage stage) { stages_[name] = std::move(stage); }
  const std::map<std::string, Stage>& stages() const { return stages_; }

  nlohmann::json to_json(const std::string& out_dir) const;

 private:
  std::map<std::string, Stage> stages_;
};

StageResult run_simulate(const PipelineOptions& options);
StageResult run_ingest(const PipelineOptions& options);
StageResult run_thresholds(const PipelineOptions& options);
StageResult run_extract(const PipelineOptions& options);
StageResult run_select(const PipelineOptions& options);
StageResult run_evaluate(const PipelineOptions& options);
StageResult run_report(const PipelineOptions& options);

/// Evaluation of one target under one CV schema on an in-memory dataset.
struct SchemaEvaluation {
  CvSchema schema = CvSchema::kUnrestricted;
  FoldPlan plan;
  std::vector<double> scores;  // per label row; NaN for rows never tested
  MetricBlock metrics;
  std::vector<std::string> notes;
};

SchemaEvaluation evaluate_schema(const Dataset& data, const LabelTable& labels, CvSchema schema, int folds,
                                 const ModelParams& params, std::uint64_t seed);

ModelParams model_params(const PipelineOptions& options);

}  // namespace coloc

#endif  // COLOC_PIPELINE_HPP
