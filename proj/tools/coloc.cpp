// coloc: co-location feature pipeline.
//
//   coloc simulate  --out DIR [--config synth.json] [--seed N]
//   coloc ingest    --config study.json --data DIR --out OUT
//   coloc thresholds|extract|report --config study.json --out OUT
//   coloc select    --config study.json --out OUT [--target T]
//   coloc evaluate  --config study.json --out OUT [--target T] [--cv S] [--model M] [--features F]
//
// Exit status: 0 ok, 2 bad input, 3 missing upstream artifact, 4 internal error.

#include <cstdio>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "coloc/pipeline.hpp"

namespace {

using coloc::PipelineOptions;
using coloc::StageResult;

void print(const StageResult& r) {
  std::cout << r.stage << (r.skipped ? ": up to date" : ": done") << "\n";
  for (const auto& n : r.notes) {
    if (n != "up to date") std::cout << "  " << n << "\n";
  }
  if (!r.skipped) std::cout << "  " << r.outputs.size() << " artifacts written\n";
}

int run_guarded(const std::function<StageResult()>& fn) {
  try {
    print(fn());
    return static_cast<int>(coloc::ExitCode::kOk);
  } catch (const coloc::MissingArtifactError& e) {
    std::cerr << "error: [stage " << e.stage() << "] " << e.what() << "\n";
    return static_cast<int>(coloc::ExitCode::kMissingArtifact);
  } catch (const coloc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(coloc::ExitCode::kInputContract);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return static_cast<int>(coloc::ExitCode::kInputContract);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(coloc::ExitCode::kInputContract);
  } catch (const coloc::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(coloc::ExitCode::kInvariant);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(coloc::ExitCode::kInvariant);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic co-location features and friendship detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "coloc 0.3.0");

  PipelineOptions opt;
  std::vector<std::string> targets;
  std::vector<std::string> schemas;
  std::string model = "forest";

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config_path, "Study config JSON (synth config for simulate)");
    if (config_required) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "Run seed")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
    sub->add_flag("--force", opt.force, "Rerun even when the stage is up to date");
  };
  auto target_opt = [&](CLI::App* sub) {
    sub->add_option("--target", targets, "friend, close or change (repeatable)")
        ->check(CLI::IsMember({"friend", "close", "close_given_friend", "change"}));
  };

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort");
  common(simulate, false);

  auto* ingest = app.add_subcommand("ingest", "Validate inputs and build per-device grids");
  common(ingest, true);
  ingest->add_option("--data", opt.data_dir, "Directory with locations.csv, wifi.csv, surveys.csv");
  ingest->add_option("--locations", opt.locations_path, "Location CSV");
  ingest->add_option("--wifi", opt.wifi_path, "WiFi CSV");
  ingest->add_option("--surveys", opt.surveys_path, "Survey CSV");

  auto* thresholds = app.add_subcommand("thresholds", "Distance survival curve and threshold clustering");
  common(thresholds, true);

  auto* extract = app.add_subcommand("extract", "Dyad feature matrix");
  common(extract, true);

  auto* select = app.add_subcommand("select", "CFS stability selection on first-period rows");
  common(select, true);
  target_opt(select);
  select->add_option("--folds", opt.stability_folds, "Selection folds")->capture_default_str();
  select->add_option("--stability-min", opt.stability_min, "Folds a feature must appear in")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated detection reports");
  common(evaluate, true);
  target_opt(evaluate);
  evaluate->add_option("--cv", schemas, "unrestricted, dyadic or temporal (repeatable; default all)")
      ->check(CLI::IsMember({"unrestricted", "dyadic", "temporal", "temporal_block"}));
  evaluate->add_option("--folds", opt.folds, "Folds for unrestricted and dyadic CV")->capture_default_str();
  evaluate->add_option("--model", model, "forest, adaboost or tree")
      ->capture_default_str()
      ->check(CLI::IsMember({"forest", "adaboost", "tree"}));
  evaluate->add_option("--features", opt.features, "all or selected:<path>")->capture_default_str();
  evaluate->add_option("--trees", opt.trees, "Forest size")->capture_default_str()->check(CLI::PositiveNumber);
  evaluate->add_option("--rounds", opt.boost_rounds, "Boosting rounds")->capture_default_str()->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "Similarity grid, survival curves and tie-distance profile");
  common(report, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(coloc::ExitCode::kInputContract);
  }

  if (!targets.empty()) {
    opt.targets.clear();
    for (const auto& t : targets) opt.targets.push_back(*coloc::parse_target(t));
  }
  if (!schemas.empty()) {
    opt.schemas.clear();
    for (const auto& s : schemas) opt.schemas.push_back(*coloc::parse_cv_schema(s));
  }
  opt.model = coloc::parse_model_kind(model);

  if (*simulate) return run_guarded([&] { return coloc::run_simulate(opt); });
  if (*ingest) return run_guarded([&] { return coloc::run_ingest(opt); });
  if (*thresholds) return run_guarded([&] { return coloc::run_thresholds(opt); });
  if (*extract) return run_guarded([&] { return coloc::run_extract(opt); });
  if (*select) return run_guarded([&] { return coloc::run_select(opt); });
  if (*evaluate) return run_guarded([&] { return coloc::run_evaluate(opt); });
  if (*report) return run_guarded([&] { return coloc::run_report(opt); });
  return static_cast<int>(coloc::ExitCode::kInputContract);
}
