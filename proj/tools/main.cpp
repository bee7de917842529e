// prunelab command line: train single models, prune them, run full
// multi-seed experiments, and turn the recorded runs into analysis files and
// reports. See README.md for the config schema.

#include <CLI11.hpp>
#include <bit>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "prunelab/analysis.hpp"
#include "prunelab/error.hpp"
#include "prunelab/experiment.hpp"
#include "prunelab/model_io.hpp"
#include "prunelab/pruning.hpp"
#include "prunelab/report.hpp"
#include "prunelab/rng.hpp"

namespace fs = std::filesystem;
using namespace prunelab;

namespace {

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 1;
};

Dataset load_run_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  Dataset ds = cfg.dataset.load();
  ds.carve_validation(cfg.dataset.validation_fraction, seed);
  return ds;
}

int cmd_train(const CommonArgs& args, const std::string& out_path,
              const std::string& history_path) {
  const ExperimentConfig cfg = ExperimentConfig::load(args.config);
  const Dataset ds = load_run_dataset(cfg, args.seed);
  TrainConfig tc = cfg.train;
  tc.seed = args.seed;
  Model model = build_model(cfg.architecture, args.seed);
  const TrainResult result = train(model, ds, tc);
  save_model(result.model, out_path);
  std::cout << "trained " << cfg.architecture.label() << " on " << ds.name << " (seed "
            << args.seed << "), best epoch " << result.best_epoch << ", val acc "
            << result.history[result.best_epoch - 1].val_accuracy << "\n";
  if (!history_path.empty()) {
    std::ofstream hist(history_path);
    if (!hist) throw IoError("cannot write " + history_path);
    hist << "epoch,train_loss,val_loss,val_accuracy\n";
    for (std::size_t e = 0; e < result.history.size(); ++e)
      hist << (e + 1) << "," << result.history[e].train_loss << ","
           << result.history[e].val_loss << "," << result.history[e].val_accuracy << "\n";
  }
  std::cout << "model written to " << out_path << "\n";
  return 0;
}

int cmd_prune(const CommonArgs& args, const std::string& model_path,
              const std::string& method_name, double ratio, const std::string& out_path,
              const std::string& plan_path, bool finetune) {
  const ExperimentConfig cfg = ExperimentConfig::load(args.config);
  const Dataset ds = load_run_dataset(cfg, args.seed);
  Model model = load_model(model_path);

  PruneMethod method{PruneMethod::parse_kind(method_name), 0.0, 0};
  if (method.kind == PruneMethodKind::Undecayed) method = PruneMethod::undecayed(cfg.up_epsilon);
  if (method.kind == PruneMethodKind::Random) method = PruneMethod::random(args.seed);

  TrainConfig ft = cfg.finetune;
  ft.seed = derive_key(args.seed, "ft", {method_rank(method.name()),
                                         std::bit_cast<std::uint64_t>(ratio)});

  GradientSet grads;
  const GradientSet* grads_ptr = nullptr;
  if (method.needs_gradients()) {
    const double eps = method.kind == PruneMethodKind::Undecayed ? method.epsilon
                                                                 : ft.weight_decay;
    grads = full_gradient(model, ds, Split::Train, eps);
    grads_ptr = &grads;
  }
  const ScoreSet scores = score(model, method, grads_ptr);
  const PrunePlan p = plan(scores, ratio);
  if (!plan_path.empty()) export_plan_csv(p, scores, plan_path);
  const double achieved = apply(model, p);
  std::cout << method.name() << " pruned to ratio " << achieved << " (" << p.keep_count
            << " of " << p.eligible_before << " weights kept)\n";
  if (finetune) {
    model = train(model, ds, ft).model;
    std::cout << "fine-tuned for " << ft.epochs << " epochs\n";
  }
  save_model(model, out_path);
  std::cout << "model written to " << out_path << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, bool resume) {
  const ExperimentConfig cfg = ExperimentConfig::load(config_path);
  const ExperimentResult result = run_experiment(cfg, resume, &std::cout);
  std::cout << "baselines: " << result.progress.baselines_trained << " trained, "
            << result.progress.baselines_reused << " reused\n";
  std::cout << "cells: " << result.progress.cells_computed << " computed, "
            << result.progress.cells_skipped << " reused, " << result.progress.cells_failed
            << " failed\n";
  std::cout << "records written to " << cfg.output_dir.string() << "\n";
  return result.progress.cells_failed == 0 ? 0 : 1;
}

int cmd_analyze(const std::string& records_dir, const std::string& plan_path,
                const std::string& out_dir) {
  AnalysisOptions opts;
  if (!plan_path.empty()) opts = AnalysisOptions::load_plan(plan_path);
  const auto records = load_records(records_dir);
  const Analysis analysis = analyze(records, opts);
  const fs::path out = out_dir.empty() ? fs::path(records_dir) / "analysis" : fs::path(out_dir);
  write_analysis(analysis, out);
  std::cout << "analysis written to " << out.string() << " (" << analysis.tables.size()
            << " tables, " << analysis.ci.size() << " confidence intervals, "
            << analysis.gaps.size() << " gaps)\n";
  return 0;
}

int cmd_report(const std::string& analysis_dir, const std::string& format,
               const std::string& out_dir) {
  const Analysis analysis = load_analysis(analysis_dir);
  const fs::path out = out_dir.empty() ? fs::path(analysis_dir) / "report" : fs::path(out_dir);
  write_report(analysis, parse_report_format(format), out);
  std::cout << "report written to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recall distortion under neural network pruning: training, pruning, experiments"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string out_path, history_path, model_path, method_name, plan_path, records_dir,
      analysis_dir, format = "csv", out_dir, config_path;
  double ratio = 2.0;
  bool finetune = true;

  auto* train_cmd = app.add_subcommand("train", "train one model from a config");
  train_cmd->add_option("--config", common.config, "experiment config file")->required();
  train_cmd->add_option("--seed", common.seed, "run seed (default 1)");
  train_cmd->add_option("--out", out_path, "output model file (.plab)")->required();
  train_cmd->add_option("--history", history_path, "per-epoch history CSV");

  auto* prune_cmd = app.add_subcommand("prune", "prune (and fine-tune) a trained model");
  prune_cmd->add_option("--config", common.config, "experiment config file")->required();
  prune_cmd->add_option("--seed", common.seed, "run seed (default 1)");
  prune_cmd->add_option("--model", model_path, "input model file")->required();
  prune_cmd->add_option("--method", method_name, "MP, GP, UP, or RP")->required();
  prune_cmd->add_option("--ratio", ratio, "pruning ratio t > 1")->required();
  prune_cmd->add_option("--out", out_path, "output model file")->required();
  prune_cmd->add_option("--plan-csv", plan_path, "export the prune plan as CSV");
  prune_cmd->add_flag("--finetune,!--no-finetune", finetune, "fine-tune after pruning (default on)");

  auto* exp_cmd = app.add_subcommand("experiment", "multi-seed experiment grid");
  auto* exp_run = exp_cmd->add_subcommand("run", "run from scratch");
  exp_run->add_option("config", config_path, "experiment config file")->required();
  auto* exp_resume = exp_cmd->add_subcommand("resume", "resume, skipping completed cells");
  exp_resume->add_option("config", config_path, "experiment config file")->required();
  exp_cmd->require_subcommand(1);

  auto* analyze_cmd = app.add_subcommand("analyze", "hypothesis tests and CIs from records");
  analyze_cmd->add_option("records", records_dir, "directory with runs.csv / recalls.csv")
      ->required();
  analyze_cmd->add_option("--plan", plan_path, "comparison plan file");
  analyze_cmd->add_option("--out", out_dir, "analysis output directory");

  auto* report_cmd = app.add_subcommand("report", "render an analysis as csv tables or text");
  report_cmd->add_option("analysis", analysis_dir, "analysis directory")->required();
  report_cmd->add_option("--format", format, "csv or text (default csv)");
  report_cmd->add_option("--out", out_dir, "report output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(common, out_path, history_path);
    if (*prune_cmd)
      return cmd_prune(common, model_path, method_name, ratio, out_path, plan_path, finetune);
    if (*exp_cmd) return cmd_experiment(config_path, exp_resume->parsed());
    if (*analyze_cmd) return cmd_analyze(records_dir, plan_path, out_dir);
    if (*report_cmd) return cmd_report(analysis_dir, format, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
