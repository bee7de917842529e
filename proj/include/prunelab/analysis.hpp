#ifndef PRUNELAB_ANALYSIS_HPP
#define PRUNELAB_ANALYSIS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prunelab/experiment.hpp"
#include "prunelab/metrics.hpp"
#include "prunelab/stats.hpp"

namespace prunelab {

// Which comparison families to compute and in which order to treat datasets
// and architectures as "consecutive". Loaded from a plan file with sections
// [families] and [options]; everything is optional.
struct AnalysisOptions {
  bool family_ratio = true;             // consecutive ratios, paired, one-sided
  bool family_model = true;             // consecutive architectures, independent, one-sided
  bool family_dataset = true;           // dataset pairs, independent, one-sided
  bool family_method = true;            // method pairs, paired, two-sided
  bool family_method_by_model = true;   // MP vs UP per (ratio, arch), global correction
  double ci_level = 0.99;
  std::vector<std::string> dataset_order;  // default: lexicographic
  std::vector<std::string> arch_order;     // default: lexicographic

  static AnalysisOptions load_plan(const std::filesystem::path& path);
};

struct PvalueCell {
  TestResult result;
  std::size_t n = 0;  // pairs (paired) or min sample size (independent)
};

// One table in the paper layout: row labels x group columns, each cell one
// test. p_adjusted carries the per-column Bonferroni correction (the
// method-by-model family corrects over the whole table instead).
struct PvalueTable {
  std::string family;
  std::string table;  // sub-table id within the family ("" when unique)
  std::string row_header;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::optional<PvalueCell>>> cells;  // [row][col]
};

struct CiEntry {
  std::string dataset, arch, method;
  double ratio = 0.0;
  std::size_t n = 0;
  double mean_alpha = 0.0;
  ConfidenceInterval ci;
  char classification = '?';
  PooledAlpha pooled;
};

struct TradeoffEntry {
  std::string dataset, arch, method;
  double ratio = 0.0;  // 1 marks the pre-pruning row
  std::size_t n = 0;
  double mean_accuracy = 0.0, se_accuracy = 0.0;
  bool has_alpha = false;
  double mean_alpha = 0.0, se_alpha = 0.0;
};

struct Analysis {
  double ci_level = 0.99;
  std::vector<PvalueTable> tables;
  std::vector<CiEntry> ci;
  std::vector<TradeoffEntry> tradeoff;
  std::vector<std::string> gaps;  // cells that could not be computed, and why
};

Analysis analyze(const std::vector<RunRecord>& records, const AnalysisOptions& opts);

// pvalues_<family>.csv (full precision, tidy), ci_alpha.csv, tradeoff.csv,
// gaps.txt.
void write_analysis(const Analysis& analysis, const std::filesystem::path& dir);
Analysis load_analysis(const std::filesystem::path& dir);

}  // namespace prunelab

#endif
