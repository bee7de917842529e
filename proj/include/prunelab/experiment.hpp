#ifndef PRUNELAB_EXPERIMENT_HPP
#define PRUNELAB_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prunelab/config.hpp"
#include "prunelab/metrics.hpp"

namespace prunelab {

struct RunKey {
  std::string dataset;
  std::string arch;
  std::string method;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

// Outcome of one (seed, method, ratio) cell: metrics before and after
// pruning on the same test split.
struct RunRecord {
  RunKey key;
  ClassBalanceProfile before, after;
  double alpha_value = 0.0;
  double acc_before = 0.0, acc_after = 0.0;
  double recall_var_before = 0.0, recall_var_after = 0.0;
  double wall_seconds = 0.0;
};

struct ExperimentProgress {
  std::size_t baselines_trained = 0, baselines_reused = 0;
  std::size_t cells_computed = 0, cells_skipped = 0, cells_failed = 0;
};

struct ExperimentResult {
  ExperimentProgress progress;
  std::vector<RunRecord> records;               // successful cells, sorted
  std::vector<std::string> failures;            // "cell: error" lines
};

// Runs the full (seed x method x ratio) grid. Per seed one model is trained
// and shared across all of that seed's cells. Cells are persisted one file
// each under <output_dir>/cells and keyed by a config hash, so an
// interrupted run resumes by skipping completed cells. Worker count comes
// from the PRUNELAB_WORKERS environment variable (default: hardware
// concurrency). With resume == false the output directory must not already
// contain records.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool resume,
                                std::ostream* log = nullptr);

// Reads runs.csv + recalls.csv back into records.
std::vector<RunRecord> load_records(const std::filesystem::path& records_dir);

void sort_records(std::vector<RunRecord>& records);
std::size_t method_rank(const std::string& name);

}  // namespace prunelab

#endif
