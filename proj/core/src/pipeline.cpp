#include "coloc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "coloc/cfs.hpp"
#include "coloc/svg.hpp"
#include "coloc/synth.hpp"
#include "coloc/thresholds.hpp"

namespace coloc {

namespace fs = std::filesystem;

std::string hash_file(const std::string& path) { return hex64(fnv1a64(read_file(path))); }

Manifest Manifest::load(const std::string& out_dir) {
  Manifest m;
  const fs::path path = fs::path(out_dir) / "manifest.json";
  if (!fs::exists(path)) return m;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("unreadable manifest " + path.string() + ": " + e.what());
  }
  for (const auto& [name, s] : j.at("stages").items()) {
    Stage st;
    st.config_path = s.value("config_path", "");
    st.config_hash = s.value("config_hash", "");
    st.seed = s.value("seed", std::uint64_t{0});
    st.params = s.value("params", nlohmann::json::object());
    st.inputs = s.value("inputs", std::map<std::string, std::string>{});
    st.outputs = s.value("outputs", std::map<std::string, std::string>{});
    m.stages_[name] = std::move(st);
  }
  return m;
}

nlohmann::json Manifest::to_json(const std::string& out_dir) const {
  nlohmann::json j;
  j["format"] = "coloc-manifest/1";
  j["output_dir"] = out_dir;
  nlohmann::json stages = nlohmann::json::object();
  for (const auto& [name, s] : stages_) {
    stages[name] = {{"config_path", s.config_path}, {"config_hash", s.config_hash}, {"seed", s.seed},
                    {"params", s.params},           {"inputs", s.inputs},           {"outputs", s.outputs}};
  }
  j["stages"] = stages;
  return j;
}

void Manifest::save(const std::string& out_dir) const {
  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / "manifest.json").string(), to_json(out_dir).dump(2) + "\n");
}

const Manifest::Stage* Manifest::find(const std::string& name) const {
  auto it = stages_.find(name);
  return it == stages_.end() ? nullptr : &it->second;
}

namespace {

// Bookkeeping for one stage run: input hashes, upstream checks, outputs.
class StageRun {
 public:
  StageRun(const PipelineOptions& opt, std::string name, std::string config_hash, nlohmann::json params)
      : opt_(opt), manifest_(Manifest::load(opt.out_dir)) {
    result_.stage = std::move(name);
    record_.config_path = opt.config_path;
    record_.config_hash = std::move(config_hash);
    record_.seed = opt.seed;
    record_.params = std::move(params);
  }

  void input(const std::string& path) {
    if (!fs::exists(path)) throw InputError(result_.stage + ": input file not found: " + path);
    record_.inputs[path] = hash_file(path);
  }

  // Requires an upstream stage produced with the same config, with its
  // outputs intact, and records those outputs as inputs.
  void upstream(const std::string& stage) {
    const Manifest::Stage* up = manifest_.find(stage);
    if (up == nullptr) {
      throw MissingArtifactError(stage, "missing upstream artifacts of stage '" + stage + "' in " + opt_.out_dir +
                                            "; run `coloc " + stage + "` first");
    }
    if (up->config_hash != record_.config_hash) {
      throw InputError("refusing to mix artifacts: stage '" + stage + "' in " + opt_.out_dir +
                       " was produced with config hash " + up->config_hash + ", current config hash is " +
                       record_.config_hash + "; rerun `coloc " + stage + "`");
    }
    for (const auto& [rel, hash] : up->outputs) {
      const std::string path = out(rel);
      if (!fs::exists(path)) {
        throw MissingArtifactError(stage, "artifact " + path + " of stage '" + stage + "' is missing");
      }
      const std::string now = hash_file(path);
      if (now != hash) {
        throw InputError("artifact " + path + " of stage '" + stage + "' changed since it was written");
      }
      record_.inputs["@" + stage + "/" + rel] = now;
    }
  }

  bool up_to_date() const {
    if (opt_.force) return false;
    const Manifest::Stage* prev = manifest_.find(result_.stage);
    if (prev == nullptr) return false;
    if (prev->config_hash != record_.config_hash || prev->params != record_.params ||
        prev->inputs != record_.inputs || prev->seed != record_.seed) {
      return false;
    }
    for (const auto& [rel, hash] : prev->outputs) {
      const std::string path = out(rel);
      if (!fs::exists(path) || hash_file(path) != hash) return false;
    }
    return true;
  }

  StageResult skip() {
    result_.skipped = true;
    for (const auto& [rel, hash] : manifest_.find(result_.stage)->outputs) result_.outputs.push_back(rel);
    result_.notes.push_back("up to date");
    return result_;
  }

  std::string out(const std::string& rel) const { return (fs::path(opt_.out_dir) / rel).string(); }

  void write(const std::string& rel, std::string_view contents) {
    const fs::path path = out(rel);
    fs::create_directories(path.parent_path());
    write_file(path.string(), contents);
    record_.outputs[rel] = hex64(fnv1a64(contents));
    result_.outputs.push_back(rel);
  }

  // Records files already written under a relative directory.
  void adopt_dir(const std::string& rel_dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(out(rel_dir))) {
      if (e.is_regular_file()) names.push_back(e.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    for (const auto& n : names) {
      const std::string rel = rel_dir + "/" + n;
      record_.outputs[rel] = hash_file(out(rel));
      result_.outputs.push_back(rel);
    }
  }

  void note(std::string n) { result_.notes.push_back(std::move(n)); }

  StageResult commit() {
    // Stages downstream of a rerun stay recorded; their input hashes will
    // no longer match and they rerun on demand.
    manifest_.set(result_.stage, record_);
    manifest_.save(opt_.out_dir);
    return result_;
  }

 private:
  const PipelineOptions& opt_;
  Manifest manifest_;
  Manifest::Stage record_;
  StageResult result_;
};

StudyConfig study_config(const PipelineOptions& opt) {
  if (opt.config_path.empty()) throw InputError("--config is required");
  return load_study_config(opt.config_path);
}

std::string config_hash(const StudyConfig& c) { return hex64(c.hash()); }

struct IngestArtifacts {
  GridSet grids;
  std::vector<SurveyTie> ties;
  std::vector<Dyad> dyads;
};

std::vector<SurveyTie> read_surveys(const StageRun& run, const StudyConfig& config) {
  IngestReport report;
  const std::string path = run.out("ingest/surveys.csv");
  auto ties = parse_surveys(read_file(path), path, config.nodes, report);
  if (!report.rejected.empty()) throw InputError(path + ": validated survey file has rejected rows");
  return ties;
}

std::vector<Dyad> read_dyads(const StageRun& run) {
  const std::string path = run.out("ingest/dyads.csv");
  const std::string text = read_file(path);
  std::vector<Dyad> dyads;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos || text.substr(0, pos) != "a,b") throw InputError(path + ": unexpected header");
  ++pos;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    if (!trim(line).empty()) {
      const auto f = split_csv(line);
      if (f.size() != 2) throw InputError(path + ": malformed dyad row");
      dyads.push_back(Dyad::of(f[0], f[1]));
    }
    pos = end + 1;
  }
  return dyads;
}

IngestArtifacts read_ingest(const StageRun& run, const StudyConfig& config) {
  IngestArtifacts a{read_grids(run.out("ingest/grids"), config), read_surveys(run, config), read_dyads(run)};
  return a;
}

ThresholdSet read_thresholds(const StageRun& run) {
  const std::string path = run.out("thresholds/thresholds.json");
  ThresholdSet t = ThresholdSet::from_json(nlohmann::json::parse(read_file(path)));
  t.validate();
  return t;
}

FeatureMatrix read_features(const StageRun& run) {
  return FeatureMatrix::from_csv(read_file(run.out("extract/features.csv")));
}

NetworkSet networks_for(const StudyConfig& config, const std::vector<SurveyTie>& ties) {
  return build_networks(ties, make_roster(config, ties));
}

std::string target_name(Target t) { return std::string(to_string(t)); }

nlohmann::json target_list(const std::vector<Target>& ts) {
  nlohmann::json j = nlohmann::json::array();
  for (auto t : ts) j.push_back(target_name(t));
  return j;
}

std::vector<std::size_t> period_rows(const LabelTable& labels, Period p) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.rows[i].period == p) rows.push_back(i);
  }
  return rows;
}

std::string selection_rel(Target t) { return "select/selection_" + target_name(t) + ".json"; }

std::vector<std::size_t> selected_columns(const FeatureMatrix& features, const std::string& spec,
                                          std::string* source) {
  std::vector<std::size_t> cols;
  if (spec == "all") return cols;
  const std::string prefix = "selected:";
  if (spec.rfind(prefix, 0) != 0) throw InputError("--features must be 'all' or 'selected:<path>'");
  const std::string path = spec.substr(prefix.size());
  if (!fs::exists(path)) throw MissingArtifactError("select", "selection file not found: " + path);
  const auto j = nlohmann::json::parse(read_file(path));
  const std::string want = hex64(features.schema_hash());
  if (j.value("schema_hash", "") != want) {
    throw InputError("refusing to mix artifacts: selection " + path + " was made for schema " +
                     j.value("schema_hash", "?") + ", feature matrix schema is " + want);
  }
  const SelectionResult sel = SelectionResult::from_json(j);
  for (const auto& name : sel.final_set) {
    auto it = std::find(features.columns().begin(), features.columns().end(), name);
    if (it == features.columns().end()) throw InputError("selected feature not in matrix: " + name);
    cols.push_back(static_cast<std::size_t>(it - features.columns().begin()));
  }
  if (cols.empty()) throw InputError("selection " + path + " has an empty final feature set");
  std::sort(cols.begin(), cols.end());
  *source = path;
  return cols;
}

std::string eval_csv_header() {
  return "target,cv,n,tp,tn,fp,fn,accuracy,accuracy_ci_lo,accuracy_ci_hi,nir,binomial_p,precision,recall,"
         "specificity,f1,auc,mcc\n";
}

std::string eval_csv_row(Target t, CvSchema s, const MetricBlock& m) {
  std::string row = target_name(t) + "," + std::string(to_string(s)) + "," + std::to_string(m.n) + "," +
                    std::to_string(m.counts.tp) + "," + std::to_string(m.counts.tn) + "," +
                    std::to_string(m.counts.fp) + "," + std::to_string(m.counts.fn);
  for (double v : {m.accuracy, m.accuracy_ci.lo, m.accuracy_ci.hi, m.nir, m.binomial_p, m.precision, m.recall,
                   m.specificity, m.f1, m.auc, m.mcc}) {
    row += "," + format_double(v);
  }
  return row + "\n";
}

}  // namespace

ModelParams model_params(const PipelineOptions& opt) {
  ModelParams p;
  p.kind = opt.model;
  p.forest.trees = opt.trees;
  p.forest.jobs = opt.jobs;
  p.boost.rounds = opt.boost_rounds;
  return p;
}

SchemaEvaluation evaluate_schema(const Dataset& data, const LabelTable& labels, CvSchema schema, int folds,
                                 const ModelParams& params, std::uint64_t seed) {
  SchemaEvaluation ev;
  ev.schema = schema;
  ev.plan = assign_folds(labels, schema, folds, seed);
  ev.scores.assign(labels.size(), kMissing);
  const Rng model_rng(seed, "model");
  std::vector<std::size_t> tested;
  for (int f : ev.plan.test_folds()) {
    const auto train = ev.plan.train_rows(f);
    const auto test = ev.plan.test_rows(f);
    if (test.empty()) continue;
    if (train.empty()) {
      ev.notes.push_back("fold " + std::to_string(f) + " has no training rows; its test rows are unscored");
      continue;
    }
    const std::uint64_t fold_seed = model_rng.derive(to_string(schema), static_cast<std::uint64_t>(f)).next_u64();
    const Model model = Model::fit(data, train, params, fold_seed, "");
    for (auto r : test) {
      ev.scores[r] = model.predict(data, r);
      tested.push_back(r);
    }
  }
  std::sort(tested.begin(), tested.end());
  std::vector<double> s;
  std::vector<int> y;
  for (auto r : tested) {
    s.push_back(ev.scores[r]);
    y.push_back(data.labels()[r]);
  }
  if (tested.empty()) {
    ev.notes.push_back("no rows were tested");
  } else {
    ev.metrics = metric_suite(s, y);
  }
  return ev;
}

StageResult run_simulate(const PipelineOptions& opt) {
  nlohmann::json j = nlohmann::json::object();
  if (!opt.config_path.empty()) {
    try {
      j = nlohmann::json::parse(read_file(opt.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(opt.config_path + ": " + e.what());
    }
  }
  SynthConfig cfg = SynthConfig::from_json(j);
  cfg.seed = opt.seed;
  StageRun run(opt, "simulate", hex64(fnv1a64(cfg.to_json().dump())), {{"synth", cfg.to_json()}});
  if (!opt.config_path.empty()) run.input(opt.config_path);
  if (run.up_to_date()) return run.skip();
  const SynthCohort cohort = generate_cohort(cfg);
  run.write("locations.csv", locations_to_csv(cohort.traces.locations));
  run.write("wifi.csv", wifi_to_csv(cohort.traces.wifi));
  run.write("surveys.csv", survey_to_csv(cohort.ties));
  run.write("study.json", cohort.study.to_json().dump(2) + "\n");
  run.write("ground_truth.json", cohort.ground_truth().dump(2) + "\n");
  run.note(std::to_string(cohort.traces.locations.size()) + " location rows, " +
           std::to_string(cohort.traces.wifi.size()) + " wifi rows, " + std::to_string(cohort.ties.size()) +
           " survey rows");
  return run.commit();
}

StageResult run_ingest(const PipelineOptions& opt) {
  const StudyConfig config = study_config(opt);
  auto pick = [&](const std::string& explicit_path, const char* name) {
    if (!explicit_path.empty()) return explicit_path;
    if (opt.data_dir.empty()) throw InputError(std::string("no path for ") + name + " (use --data or --" + name + ")");
    return (fs::path(opt.data_dir) / (std::string(name) + ".csv")).string();
  };
  const std::string loc = pick(opt.locations_path, "locations");
  const std::string wifi = pick(opt.wifi_path, "wifi");
  const std::string surveys = pick(opt.surveys_path, "surveys");
  StageRun run(opt, "ingest", config_hash(config), nlohmann::json::object());
  run.input(opt.config_path);
  run.input(loc);
  run.input(wifi);
  run.input(surveys);
  if (run.up_to_date()) return run.skip();

  ParsedInputs in = parse_inputs(loc, wifi, surveys, config);
  const auto roster = make_roster(config, in.ties);
  GridStats stats;
  GridSet grids = build_grids(in.locations, in.wifi, config, roster->ids(), &stats);
  const EligibleDyads eligible = eligible_dyads(grids, roster->ids());

  const std::string grid_dir = run.out("ingest/grids");
  fs::remove_all(grid_dir);
  write_grids(grid_dir, grids);
  run.adopt_dir("ingest/grids");
  run.write("ingest/surveys.csv", survey_to_csv(in.ties));
  std::string dyads = "a,b\n";
  for (const auto& d : eligible.dyads) dyads += d.a + "," + d.b + "\n";
  run.write("ingest/dyads.csv", dyads);

  nlohmann::ordered_json report;
  report["rows"] = in.report.to_json();
  report["devices"] = grids.grids.size();
  report["bins"] = grids.bins->size();
  report["grid"] = {{"readings_outside_window", stats.readings_outside_window},
                    {"readings_excluded", stats.readings_excluded},
                    {"readings_below_accuracy", stats.readings_below_accuracy},
                    {"carried_forward_bins", stats.carried_forward_bins}};
  report["dyads"] = {{"surveyed_nodes", eligible.surveyed_nodes},
                     {"potential", eligible.potential},
                     {"eligible", eligible.dyads.size()}};
  run.write("ingest/report.json", report.dump(2) + "\n");
  run.note(std::to_string(eligible.dyads.size()) + " of " + std::to_string(eligible.potential) +
           " dyads eligible; " + std::to_string(in.report.rejected.size()) + " rows rejected");
  return run.commit();
}

StageResult run_thresholds(const PipelineOptions& opt) {
  const StudyConfig config = study_config(opt);
  StageRun run(opt, "thresholds", config_hash(config), nlohmann::json::object());
  run.upstream("ingest");
  if (run.up_to_date()) return run.skip();
  const GridSet grids = read_grids(run.out("ingest/grids"), config);
  const auto dyads = read_dyads(run);
  const auto samples = distance_samples(grids, dyads, config.cluster_resolution_m, opt.jobs);

  std::string eccdf_csv = "distance_m,exceed\n";
  if (!samples.empty()) {
    for (const auto& p : eccdf(samples).points()) eccdf_csv += format_double(p.value) + "," + format_double(p.exceed) + "\n";
  }
  run.write("thresholds/eccdf.csv", eccdf_csv);

  ThresholdSet thresholds;
  std::string clusters_csv = "cluster,min_m,max_m,weight_min,mean_m\n";
  if (config.threshold_mode == ThresholdMode::kStatic) {
    thresholds = static_thresholds(config);
    run.note("static thresholds");
  } else {
    std::vector<WeightedSample> below;
    for (const auto& s : samples) {
      if (s.value < config.distance_elbow_m) below.push_back(s);
    }
    if (below.empty()) throw InputError("no co-located bins below the distance cutoff; cannot cluster");
    const Clustering c = cluster_1d(below, kThresholdCount, config.distance_elbow_m);
    for (std::size_t k = 0; k < c.clusters.size(); ++k) {
      const auto& cl = c.clusters[k];
      clusters_csv += std::to_string(k + 1) + "," + format_double(cl.min) + "," + format_double(cl.max) + "," +
                      format_double(cl.weight) + "," + format_double(cl.mean) + "\n";
    }
    thresholds = c.thresholds;
    run.write("thresholds/clusters.csv", clusters_csv);
  }
  run.write("thresholds/thresholds.json", thresholds.to_json().dump(2) + "\n");
  return run.commit();
}

StageResult run_extract(const PipelineOptions& opt) {
  const StudyConfig config = study_config(opt);
  StageRun run(opt, "extract", config_hash(config), nlohmann::json::object());
  run.upstream("ingest");
  run.upstream("thresholds");
  if (run.up_to_date()) return run.skip();
  const GridSet grids = read_grids(run.out("ingest/grids"), config);
  const auto dyads = read_dyads(run);
  const ThresholdSet thresholds = read_thresholds(run);
  const DyadContext ctx = DyadContext::make(config, thresholds.breaks, *grids.hotspots);
  const FeatureSchema schema = FeatureSchema::standard(config.wifi_features);
  const ExtractionPlan plan(*grids.bins, config, schema);
  const FeatureMatrix features = extract_all(grids, dyads, ctx, plan, opt.jobs);
  run.write("extract/features.csv", features.to_csv());
  nlohmann::ordered_json meta;
  meta["columns"] = features.cols();
  meta["rows"] = features.rows();
  meta["schema_hash"] = hex64(features.schema_hash());
  meta["schema"] = schema.to_json();
  run.write("extract/schema.json", meta.dump(2) + "\n");
  run.note(std::to_string(features.rows()) + " rows x " + std::to_string(features.cols()) + " columns");
  return run.commit();
}

StageResult run_select(const PipelineOptions& opt) {
  const StudyConfig config = study_config(opt);
  nlohmann::json params = {{"targets", target_list(opt.targets)},
                           {"folds", opt.stability_folds},
                           {"stability_min", opt.stability_min}};
  StageRun run(opt, "select", config_hash(config), params);
  run.upstream("ingest");
  run.upstream("extract");
  if (run.up_to_date()) return run.skip();
  const FeatureMatrix features = read_features(run);
  const NetworkSet nets = networks_for(config, read_surveys(run, config));
  for (Target t : opt.targets) {
    const LabelTable labels = build_label_table(nets, features, t);
    const Dataset data = Dataset::from_labels(features, labels);
    const auto rows = period_rows(labels, Period::kP1);
    if (rows.empty()) throw InputError("no first-period label rows for target " + target_name(t));
    const SelectionResult sel =
        stability_select(data, rows, opt.stability_folds, opt.stability_min, opt.seed, CfsParams{}, opt.jobs);
    nlohmann::ordered_json j;
    j["target"] = target_name(t);
    j["schema_hash"] = hex64(features.schema_hash());
    j["training_rows"] = rows.size();
    const auto body = sel.to_json();
    for (const auto& [k, v] : body.items()) j[k] = v;
    run.write(selection_rel(t), j.dump(2) + "\n");
    run.note(target_name(t) + ": " + std::to_string(sel.final_set.size()) + " stable features");
  }
  return run.commit();
}

StageResult run_evaluate(const PipelineOptions& opt) {
  const StudyConfig config = study_config(opt);
  nlohmann::json schemas = nlohmann::json::array();
  for (auto s : opt.schemas) schemas.push_back(std::string(to_string(s)));
  nlohmann::json params = {{"targets", target_list(opt.targets)}, {"cv", schemas},          {"folds", opt.folds},
                           {"model", to_string(opt.model)},        {"features", opt.features}, {"trees", opt.trees},
                           {"boost_rounds", opt.boost_rounds}};
  if (opt.folds < 2) throw InputError("--folds must be at least 2");
  StageRun run(opt, "evaluate", config_hash(config), params);
  run.upstream("ingest");
  run.upstream("extract");
  std::string selection_path;
  const FeatureMatrix features = read_features(run);
  const auto columns = selected_columns(features, opt.features, &selection_path);
  if (!selection_path.empty()) run.input(selection_path);
  if (run.up_to_date()) return run.skip();

  const NetworkSet nets = networks_for(config, read_surveys(run, config));
  const ModelParams mp = model_params(opt);
  const std::string schema_hash = hex64(features.schema_hash());
  for (Target t : opt.targets) {
    const LabelTable labels = build_label_table(nets, features, t);
    const Dataset data = Dataset::from_labels(features, labels, columns);
    const std::string tn = target_name(t);
    nlohmann::ordered_json report;
    report["target"] = tn;
    report["model"] = to_string(opt.model);
    if (opt.model == ModelKind::kForest) report["model_note"] = "random forest is the default classifier for every target";
    report["features"] = opt.features;
    report["feature_count"] = data.cols();
    report["rows"] = labels.size();
    report["positives"] = std::count(data.labels().begin(), data.labels().end(), 1);
    report["folds"] = opt.folds;
    report["seed"] = opt.seed;
    report["config_hash"] = config_hash(config);
    report["schema_hash"] = schema_hash;
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    std::string csv = eval_csv_header();
    for (CvSchema s : opt.schemas) {
      const std::string sn(to_string(s));
      if (labels.size() == 0) throw InputError("no label rows for target " + tn);
      const SchemaEvaluation ev = evaluate_schema(data, labels, s, opt.folds, mp, opt.seed);
      auto block = ev.metrics.to_json();
      if (!ev.notes.empty()) {
        auto notes = block.contains("notes") ? block["notes"] : nlohmann::ordered_json::array();
        for (const auto& n : ev.notes) notes.push_back(n);
        block["notes"] = notes;
      }
      std::vector<std::size_t> sizes = ev.plan.fold_sizes();
      block["fold_sizes"] = sizes;
      results[sn] = block;
      csv += eval_csv_row(t, s, ev.metrics);
      run.write("evaluate/folds_" + tn + "_" + sn + ".csv", ev.plan.to_csv());

      std::string pred = "row,ego,alter,wave,period,fold,label,score\n";
      for (std::size_t r = 0; r < labels.size(); ++r) {
        const auto& lr = labels.rows[r];
        pred += std::to_string(r) + "," + lr.ego + "," + lr.alter + "," + std::to_string(lr.wave) + "," +
                std::string(to_string(lr.period)) + "," + std::to_string(ev.plan.fold[r]) + "," +
                std::to_string(lr.label) + "," + format_double(ev.scores[r]) + "\n";
      }
      run.write("evaluate/predictions_" + tn + "_" + sn + ".csv", pred);

      // Final model on everything this schema trains on.
      std::vector<std::size_t> train;
      if (s == CvSchema::kTemporalBlock) {
        train = ev.plan.train_rows(1);
      } else {
        train.resize(labels.size());
        for (std::size_t i = 0; i < train.size(); ++i) train[i] = i;
      }
      if (!train.empty()) {
        const std::uint64_t seed = Rng(opt.seed, "final_model").derive(sn).next_u64();
        const Model model = Model::fit(data, train, mp, seed, schema_hash);
        auto mj = model.to_json();
        mj["target"] = tn;
        mj["cv"] = sn;
        run.write("evaluate/model_" + tn + "_" + sn + ".json", mj.dump() + "\n");
      }
      run.note(tn + "/" + sn + ": MCC " + format_double(ev.metrics.mcc));
    }
    report["results"] = results;
    run.write("evaluate/eval_" + tn + ".json", report.dump(2) + "\n");
    run.write("evaluate/eval_" + tn + ".csv", csv);
  }
  return run.commit();
}

StageResult run_report(const PipelineOptions& opt) {
  const StudyConfig config = study_config(opt);
  StageRun run(opt, "report", config_hash(config), nlohmann::json::object());
  run.upstream("ingest");
  run.upstream("thresholds");
  if (run.up_to_date()) return run.skip();
  const IngestArtifacts in = read_ingest(run, config);
  const NetworkSet nets = networks_for(config, in.ties);

  for (auto mode : {SimilarityMode::kSharedPairs, SimilarityMode::kStandard}) {
    const SimilarityGrid g = similarity_grid(nets, mode);
    const std::string name = mode == SimilarityMode::kSharedPairs ? "similarity_shared_pairs" : "similarity_standard";
    run.write("report/" + name + ".csv", g.to_csv());
    const std::size_t n = g.labels.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) m[i][k] = g.values[i * n + k];
    }
    run.write("report/" + name + ".svg",
              svg_heatmap(g.labels, m,
                          mode == SimilarityMode::kSharedPairs ? "Network similarity (shared ties / ordered pairs)"
                                                         : "Network similarity (Jaccard)"));
  }

  std::string nets_csv = "tie_type,wave,respondents,ties,density,reciprocity\n";
  for (const TieNetwork* net : nets.all()) {
    std::size_t resp = 0;
    for (std::size_t i = 0; i < net->size(); ++i) resp += net->is_respondent(i) ? 1 : 0;
    nets_csv += std::string(to_string(net->tie_type)) + "," + std::to_string(net->wave) + "," +
                std::to_string(resp) + "," + std::to_string(net->tie_count()) + "," + format_double(density(*net)) +
                "," + format_double(reciprocity(*net)) + "\n";
  }
  run.write("report/networks.csv", nets_csv);

  // Survival of the pairwise-distance distribution.
  const std::string eccdf_text = read_file(run.out("thresholds/eccdf.csv"));
  run.write("report/eccdf.csv", eccdf_text);
  PlotSeries ecc{"distance", {}, {}};
  {
    std::size_t pos = eccdf_text.find('\n') + 1;
    while (pos < eccdf_text.size()) {
      std::size_t end = eccdf_text.find('\n', pos);
      if (end == std::string::npos) end = eccdf_text.size();
      const auto f = split_csv(std::string_view(eccdf_text).substr(pos, end - pos));
      if (f.size() == 2) {
        ecc.x.push_back(parse_double(f[0]));
        ecc.y.push_back(parse_double(f[1]));
      }
      pos = end + 1;
    }
  }
  const ThresholdSet thresholds = read_thresholds(run);
  run.write("report/eccdf.svg", svg_line_chart({ecc}, {"Pairwise distance survival", "distance (m)",
                                                        "fraction of time exceeding", true, true}));

  const auto survival = coverage_survival(in.grids);
  std::string cov = "gap_minutes,fraction_exceeding\n";
  PlotSeries cs{"location gaps", {}, {}};
  for (const auto& p : survival) {
    const double minutes = static_cast<double>(p.gap) / static_cast<double>(kMinuteMs);
    cov += format_double(minutes) + "," + format_double(p.fraction) + "\n";
    if (minutes > 0) {
      cs.x.push_back(minutes);
      cs.y.push_back(p.fraction);
    }
  }
  run.write("report/coverage.csv", cov);
  run.write("report/coverage.svg", svg_line_chart({cs}, {"Missing-data gap survival", "gap length (minutes)",
                                                         "fraction of time in longer gaps", true, true}));

  const DyadContext ctx = DyadContext::make(config, thresholds.breaks, *in.grids.hotspots);
  TieDistanceProfile profile(in.grids.bins, config.study_start);
  const auto periods = study_periods(config);
  DyadSeries series;
  for (const auto& d : in.dyads) {
    const TimelineGrid* a = in.grids.find(d.a);
    const TimelineGrid* b = in.grids.find(d.b);
    if (a == nullptr || b == nullptr) continue;
    build_dyad_series(*a, *b, ctx, series);
    for (std::size_t p = 0; p < periods.size(); ++p) {
      const TieNetwork* net = nets.find(static_cast<int>(p) + 2, TieType::kFriend);
      if (net == nullptr) continue;
      if (auto cls = classify_dyad(*net, d)) profile.add(series, *cls, periods[p].window);
    }
  }
  run.write("report/tie_profile.csv", profile.to_csv());
  std::array<PlotSeries, 3> curves{PlotSeries{"mutual", {}, {}}, PlotSeries{"one-way", {}, {}},
                                   PlotSeries{"none", {}, {}}};
  for (const auto& r : profile.rows()) {
    auto& c = curves[static_cast<std::size_t>(r.cls)];
    c.x.push_back(static_cast<double>(r.week + 1));
    c.y.push_back(r.median);
  }
  run.write("report/tie_profile.svg",
            svg_line_chart({curves.begin(), curves.end()},
                           {"Median weekly on-campus distance by friendship", "week", "median distance (m)"}));
  return run.commit();
}

}  // namespace coloc
