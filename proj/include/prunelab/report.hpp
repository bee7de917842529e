#ifndef PRUNELAB_REPORT_HPP
#define PRUNELAB_REPORT_HPP

#include <filesystem>
#include <string>

#include "prunelab/analysis.hpp"

namespace prunelab {

enum class ReportFormat { Csv, Text };
ReportFormat parse_report_format(const std::string& s);

// Renders an analysis into files under dir. Csv: one table_pvalues_*.csv per
// hypothesis table in the row-label x group-column layout (p-values
// Bonferroni-adjusted, "<0.001" below 0.0005), plus rendered CI and tradeoff
// tables. Text: a single summary.txt with everything aligned.
void write_report(const Analysis& analysis, ReportFormat format,
                  const std::filesystem::path& dir);

}  // namespace prunelab

#endif
