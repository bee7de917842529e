#include "prunelab/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "prunelab/csv.hpp"
#include "prunelab/error.hpp"

namespace prunelab {

namespace fs = std::filesystem;

ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "text") return ReportFormat::Text;
  throw ConfigError("report format must be 'csv' or 'text', got '" + s + "'");
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '=')
                              ? c
                              : '_';
  return out;
}

std::string table_name(const PvalueTable& t) {
  std::string name = t.family;
  if (!t.table.empty()) name += "_" + sanitize(t.table);
  return name;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string table_description(const PvalueTable& t) {
  std::string kind, alt;
  for (const auto& row : t.cells)
    for (const auto& cell : row)
      if (cell) {
        kind = to_string(cell->result.kind);
        alt = to_string(cell->result.alternative);
        break;
      }
  std::string desc = "family " + t.family;
  if (!t.table.empty()) desc += " [" + t.table + "]";
  if (!kind.empty()) desc += " (" + kind + ", " + alt + ", Bonferroni-adjusted)";
  return desc;
}

// One rendered table: row label column plus one column per group.
std::vector<std::vector<std::string>> rendered_rows(const PvalueTable& t) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{t.row_header.empty() ? "row" : t.row_header};
  header.insert(header.end(), t.col_labels.begin(), t.col_labels.end());
  rows.push_back(std::move(header));
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    std::vector<std::string> row{t.row_labels[r]};
    for (std::size_t c = 0; c < t.col_labels.size(); ++c)
      row.push_back(t.cells[r][c] ? render_p_value(t.cells[r][c]->result.p_adjusted) : "");
    rows.push_back(std::move(row));
  }
  return rows;
}

void append_aligned(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (widths.size() <= i) widths.resize(i + 1, 0);
      widths[i] = std::max(widths[i], row[i].size());
    }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "  " : "") << std::setw(static_cast<int>(widths[i]))
         << (i ? std::right : std::left) << row[i];
    os << "\n";
  }
}

std::vector<std::vector<std::string>> ci_rows(const Analysis& a) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"dataset", "arch", "method", "ratio", "n", "mean_alpha", "ci_lower", "ci_upper",
                  "vs_1", "alpha_hat", "r2", "mean_acc"});
  for (const auto& e : a.ci)
    rows.push_back({e.dataset, e.arch, e.method, format_double(e.ratio), std::to_string(e.n),
                    fmt3(e.mean_alpha), fmt3(e.ci.lower), fmt3(e.ci.upper),
                    std::string(1, e.classification), fmt3(e.pooled.alpha_hat),
                    fmt3(e.pooled.r2), fmt3(e.pooled.mean_accuracy)});
  return rows;
}

std::vector<std::vector<std::string>> tradeoff_rows(const Analysis& a) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"dataset", "arch", "method", "ratio", "n", "mean_accuracy", "se_accuracy",
                  "mean_alpha", "se_alpha"});
  for (const auto& e : a.tradeoff)
    rows.push_back({e.dataset, e.arch, e.method, format_double(e.ratio), std::to_string(e.n),
                    fmt3(e.mean_accuracy), fmt3(e.se_accuracy),
                    e.has_alpha ? fmt3(e.mean_alpha) : "NA",
                    e.has_alpha ? fmt3(e.se_alpha) : "NA"});
  return rows;
}

}  // namespace

void write_report(const Analysis& analysis, ReportFormat format, const fs::path& dir) {
  fs::create_directories(dir);
  if (format == ReportFormat::Csv) {
    for (const auto& table : analysis.tables) {
      std::ofstream out(dir / ("table_pvalues_" + table_name(table) + ".csv"));
      if (!out) throw IoError("cannot write rendered p-value table");
      for (const auto& row : rendered_rows(table)) out << csv_join(row) << "\n";
    }
    {
      std::ofstream out(dir / "table_ci.csv");
      if (!out) throw IoError("cannot write table_ci.csv");
      for (const auto& row : ci_rows(analysis)) out << csv_join(row) << "\n";
    }
    {
      std::ofstream out(dir / "table_tradeoff.csv");
      if (!out) throw IoError("cannot write table_tradeoff.csv");
      for (const auto& row : tradeoff_rows(analysis)) out << csv_join(row) << "\n";
    }
    return;
  }

  std::ofstream out(dir / "summary.txt");
  if (!out) throw IoError("cannot write summary.txt");
  out << "prunelab analysis summary\n";
  out << "=========================\n\n";
  for (const auto& table : analysis.tables) {
    out << table_description(table) << "\n";
    append_aligned(out, rendered_rows(table));
    out << "\n";
  }
  out << "confidence intervals for mean alpha (level " << analysis.ci_level
      << "; <, >, ? against 1)\n";
  append_aligned(out, ci_rows(analysis));
  out << "\naccuracy / intensification tradeoff (ratio 1 = before pruning)\n";
  append_aligned(out, tradeoff_rows(analysis));
  if (!analysis.gaps.empty()) {
    out << "\ngaps (cells that could not be analyzed)\n";
    for (const auto& g : analysis.gaps) out << "  - " << g << "\n";
  }
  if (!out) throw IoError("write failed for summary.txt");
}

}  // namespace prunelab
