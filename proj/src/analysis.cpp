#include "prunelab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "prunelab/config.hpp"
#include "prunelab/csv.hpp"
#include "prunelab/error.hpp"

namespace prunelab {

namespace fs = std::filesystem;

AnalysisOptions AnalysisOptions::load_plan(const fs::path& path) {
  AnalysisOptions opts;
  ConfigFile cfg = ConfigFile::parse_file(path);
  opts.family_ratio = cfg.get_bool("families", "ratio", true);
  opts.family_model = cfg.get_bool("families", "model", true);
  opts.family_dataset = cfg.get_bool("families", "dataset", true);
  opts.family_method = cfg.get_bool("families", "method", true);
  opts.family_method_by_model = cfg.get_bool("families", "method_by_model", true);
  opts.ci_level = cfg.get_double("options", "ci_level", 0.99);
  if (cfg.has("options", "dataset_order"))
    opts.dataset_order = cfg.get_list("options", "dataset_order");
  if (cfg.has("options", "arch_order"))
    opts.arch_order = cfg.get_list("options", "arch_order");
  cfg.finish();
  if (!(opts.ci_level > 0.0 && opts.ci_level < 1.0))
    throw ConfigError("ci_level must be in (0, 1)");
  return opts;
}

namespace {

std::string ratio_label(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r);
  return buf;
}

// Orders labels by an explicit plan order when given, else lexicographically.
std::vector<std::string> ordered(const std::set<std::string>& values,
                                 const std::vector<std::string>& plan_order) {
  std::vector<std::string> out;
  for (const auto& v : plan_order)
    if (values.count(v)) out.push_back(v);
  for (const auto& v : values)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

struct CellKey {
  std::string dataset, arch, method;
  double ratio;
  auto tie() const { return std::make_tuple(dataset, arch, method, ratio); }
  bool operator<(const CellKey& o) const { return tie() < o.tie(); }
};

// alpha per seed, plus the record itself for pooled regression.
struct CellData {
  std::map<std::uint64_t, const RunRecord*> by_seed;
};

using CellIndex = std::map<CellKey, CellData>;

// Paired samples matched by seed; the seeds line up in sorted order.
std::pair<std::vector<double>, std::vector<double>> paired_alphas(const CellData& a,
                                                                  const CellData& b) {
  std::vector<double> x, y;
  for (const auto& [seed, rec] : a.by_seed) {
    const auto it = b.by_seed.find(seed);
    if (it != b.by_seed.end()) {
      x.push_back(rec->alpha_value);
      y.push_back(it->second->alpha_value);
    }
  }
  return {x, y};
}

std::vector<double> all_alphas(const CellData& c) {
  std::vector<double> out;
  for (const auto& [seed, rec] : c.by_seed) out.push_back(rec->alpha_value);
  return out;
}

void bonferroni_by_column(PvalueTable& table) {
  for (std::size_t col = 0; col < table.col_labels.size(); ++col) {
    std::size_t rows = 0;
    for (std::size_t row = 0; row < table.row_labels.size(); ++row)
      if (table.cells[row][col]) ++rows;
    if (!rows) continue;
    for (std::size_t row = 0; row < table.row_labels.size(); ++row)
      if (table.cells[row][col])
        table.cells[row][col]->result.p_adjusted =
            bonferroni(table.cells[row][col]->result.p_raw, rows);
  }
}

void bonferroni_whole_table(PvalueTable& table) {
  std::size_t count = 0;
  for (const auto& row : table.cells)
    for (const auto& cell : row)
      if (cell) ++count;
  if (!count) return;
  for (auto& row : table.cells)
    for (auto& cell : row)
      if (cell) cell->result.p_adjusted = bonferroni(cell->result.p_raw, count);
}

}  // namespace

Analysis analyze(const std::vector<RunRecord>& records, const AnalysisOptions& opts) {
  if (records.empty()) throw UsageError("no records to analyze");
  Analysis out;
  out.ci_level = opts.ci_level;

  CellIndex index;
  std::set<std::string> datasets, archs, methods;
  std::set<double> ratios;
  for (const auto& r : records) {
    const CellKey key{r.key.dataset, r.key.arch, r.key.method, r.key.ratio};
    auto [it, inserted] = index[key].by_seed.insert({r.key.seed, &r});
    if (!inserted) throw UsageError("duplicate record for one (cell, seed)");
    datasets.insert(r.key.dataset);
    archs.insert(r.key.arch);
    methods.insert(r.key.method);
    ratios.insert(r.key.ratio);
  }
  const auto dataset_list = ordered(datasets, opts.dataset_order);
  const auto arch_list = ordered(archs, opts.arch_order);
  std::vector<std::string> method_list;
  for (const auto& m : {"MP", "GP", "UP", "RP"})
    if (methods.count(m)) method_list.push_back(m);
  for (const auto& m : methods)
    if (std::find(method_list.begin(), method_list.end(), m) == method_list.end())
      method_list.push_back(m);
  const std::vector<double> ratio_list(ratios.begin(), ratios.end());

  // Groups (dataset, arch, method) present in the records, in report order.
  std::vector<std::tuple<std::string, std::string, std::string>> groups;
  for (const auto& d : dataset_list)
    for (const auto& a : arch_list)
      for (const auto& m : method_list) {
        for (double t : ratio_list)
          if (index.count({d, a, m, t})) {
            groups.emplace_back(d, a, m);
            break;
          }
      }

  auto note_gap = [&](const std::string& what) { out.gaps.push_back(what); };

  // Consecutive pruning ratios, paired one-sided (alpha grows with t).
  if (opts.family_ratio && ratio_list.size() >= 2) {
    PvalueTable table;
    table.family = "ratio";
    table.row_header = "ratios";
    for (std::size_t i = 0; i + 1 < ratio_list.size(); ++i)
      table.row_labels.push_back(ratio_label(ratio_list[i]) + " vs " +
                                 ratio_label(ratio_list[i + 1]));
    for (const auto& [d, a, m] : groups) table.col_labels.push_back(d + "/" + a + "/" + m);
    table.cells.assign(table.row_labels.size(),
                       std::vector<std::optional<PvalueCell>>(table.col_labels.size()));
    for (std::size_t col = 0; col < groups.size(); ++col) {
      const auto& [d, a, m] = groups[col];
      for (std::size_t row = 0; row + 1 < ratio_list.size(); ++row) {
        const auto lo = index.find({d, a, m, ratio_list[row]});
        const auto hi = index.find({d, a, m, ratio_list[row + 1]});
        if (lo == index.end() || hi == index.end()) continue;
        const auto [x, y] = paired_alphas(lo->second, hi->second);
        if (x.size() < 2) {
          note_gap("ratio family " + table.col_labels[col] + " " + table.row_labels[row] +
                   ": fewer than 2 paired seeds");
          continue;
        }
        PvalueCell cell;
        cell.result = t_paired(x, y, Alternative::Less);
        cell.n = x.size();
        table.cells[row][col] = cell;
      }
    }
    bonferroni_by_column(table);
    out.tables.push_back(std::move(table));
  }

  // Consecutive architectures, independent one-sided (smaller nets
  // intensify more), one table per (dataset, method).
  if (opts.family_model && arch_list.size() >= 2) {
    for (const auto& d : dataset_list)
      for (const auto& m : method_list) {
        PvalueTable table;
        table.family = "model";
        table.table = d + "/" + m;
        table.row_header = "architectures";
        for (std::size_t i = 0; i + 1 < arch_list.size(); ++i)
          table.row_labels.push_back(arch_list[i] + " vs " + arch_list[i + 1]);
        for (double t : ratio_list) table.col_labels.push_back("t=" + ratio_label(t));
        table.cells.assign(table.row_labels.size(),
                           std::vector<std::optional<PvalueCell>>(table.col_labels.size()));
        bool any = false;
        for (std::size_t row = 0; row + 1 < arch_list.size(); ++row)
          for (std::size_t col = 0; col < ratio_list.size(); ++col) {
            const auto small = index.find({d, arch_list[row], m, ratio_list[col]});
            const auto large = index.find({d, arch_list[row + 1], m, ratio_list[col]});
            if (small == index.end() || large == index.end()) continue;
            const auto x = all_alphas(small->second);
            const auto y = all_alphas(large->second);
            if (x.size() < 2 || y.size() < 2) {
              note_gap("model family " + table.table + " " + table.row_labels[row] +
                       " at t=" + ratio_label(ratio_list[col]) + ": fewer than 2 seeds");
              continue;
            }
            PvalueCell cell;
            cell.result = t_independent(x, y, Alternative::Greater);
            cell.n = std::min(x.size(), y.size());
            table.cells[row][col] = cell;
            any = true;
          }
        if (!any) continue;
        bonferroni_by_column(table);
        out.tables.push_back(std::move(table));
      }
  }

  // Dataset pairs, independent one-sided (simpler data intensifies less),
  // one table per method. Samples pool every architecture of that dataset.
  if (opts.family_dataset && dataset_list.size() >= 2) {
    for (const auto& m : method_list) {
      PvalueTable table;
      table.family = "dataset";
      table.table = m;
      table.row_header = "datasets";
      for (std::size_t i = 0; i + 1 < dataset_list.size(); ++i)
        table.row_labels.push_back(dataset_list[i] + " vs " + dataset_list[i + 1]);
      for (double t : ratio_list) table.col_labels.push_back("t=" + ratio_label(t));
      table.cells.assign(table.row_labels.size(),
                         std::vector<std::optional<PvalueCell>>(table.col_labels.size()));
      bool any = false;
      for (std::size_t row = 0; row + 1 < dataset_list.size(); ++row)
        for (std::size_t col = 0; col < ratio_list.size(); ++col) {
          std::vector<double> x, y;
          for (const auto& a : arch_list) {
            const auto xi = index.find({dataset_list[row], a, m, ratio_list[col]});
            if (xi != index.end())
              for (double v : all_alphas(xi->second)) x.push_back(v);
            const auto yi = index.find({dataset_list[row + 1], a, m, ratio_list[col]});
            if (yi != index.end())
              for (double v : all_alphas(yi->second)) y.push_back(v);
          }
          if (x.empty() && y.empty()) continue;
          if (x.size() < 2 || y.size() < 2) {
            note_gap("dataset family " + m + " " + table.row_labels[row] + " at t=" +
                     ratio_label(ratio_list[col]) + ": fewer than 2 seeds per side");
            continue;
          }
          PvalueCell cell;
          cell.result = t_independent(x, y, Alternative::Less);
          cell.n = std::min(x.size(), y.size());
          table.cells[row][col] = cell;
          any = true;
        }
      if (!any) continue;
      bonferroni_by_column(table);
      out.tables.push_back(std::move(table));
    }
  }

  // Method pairs, paired two-sided, one table per (dataset, arch).
  if (opts.family_method && method_list.size() >= 2) {
    for (const auto& d : dataset_list)
      for (const auto& a : arch_list) {
        PvalueTable table;
        table.family = "method";
        table.table = d + "/" + a;
        table.row_header = "methods";
        for (std::size_t i = 0; i < method_list.size(); ++i)
          for (std::size_t j = i + 1; j < method_list.size(); ++j)
            table.row_labels.push_back(method_list[i] + " vs " + method_list[j]);
        for (double t : ratio_list) table.col_labels.push_back("t=" + ratio_label(t));
        table.cells.assign(table.row_labels.size(),
                           std::vector<std::optional<PvalueCell>>(table.col_labels.size()));
        bool any = false;
        std::size_t row = 0;
        for (std::size_t i = 0; i < method_list.size(); ++i)
          for (std::size_t j = i + 1; j < method_list.size(); ++j, ++row)
            for (std::size_t col = 0; col < ratio_list.size(); ++col) {
              const auto mi = index.find({d, a, method_list[i], ratio_list[col]});
              const auto mj = index.find({d, a, method_list[j], ratio_list[col]});
              if (mi == index.end() || mj == index.end()) continue;
              const auto [x, y] = paired_alphas(mi->second, mj->second);
              if (x.size() < 2) {
                note_gap("method family " + table.table + " " + method_list[i] + " vs " +
                         method_list[j] + " at t=" + ratio_label(ratio_list[col]) +
                         ": fewer than 2 paired seeds");
                continue;
              }
              PvalueCell cell;
              cell.result = t_paired(x, y, Alternative::TwoSided);
              cell.n = x.size();
              table.cells[row][col] = cell;
              any = true;
            }
        if (!any) continue;
        bonferroni_by_column(table);
        out.tables.push_back(std::move(table));
      }
  }

  // MP vs UP per (ratio, architecture), corrected over the whole table.
  if (opts.family_method_by_model && methods.count("MP") && methods.count("UP")) {
    for (const auto& d : dataset_list) {
      PvalueTable table;
      table.family = "method_by_model";
      table.table = d;
      table.row_header = "ratio";
      for (double t : ratio_list) table.row_labels.push_back(ratio_label(t));
      for (const auto& a : arch_list) table.col_labels.push_back(a);
      table.cells.assign(table.row_labels.size(),
                         std::vector<std::optional<PvalueCell>>(table.col_labels.size()));
      bool any = false;
      for (std::size_t row = 0; row < ratio_list.size(); ++row)
        for (std::size_t col = 0; col < arch_list.size(); ++col) {
          const auto mp = index.find({d, arch_list[col], "MP", ratio_list[row]});
          const auto up = index.find({d, arch_list[col], "UP", ratio_list[row]});
          if (mp == index.end() || up == index.end()) continue;
          const auto [x, y] = paired_alphas(mp->second, up->second);
          if (x.size() < 2) {
            note_gap("method_by_model " + d + "/" + arch_list[col] + " at t=" +
                     ratio_label(ratio_list[row]) + ": fewer than 2 paired seeds");
            continue;
          }
          PvalueCell cell;
          cell.result = t_paired(x, y, Alternative::TwoSided);
          cell.n = x.size();
          table.cells[row][col] = cell;
          any = true;
        }
      if (!any) continue;
      bonferroni_whole_table(table);
      out.tables.push_back(std::move(table));
    }
  }

  // Confidence intervals over per-model alphas, pooled regression, and the
  // accuracy/intensification tradeoff series.
  for (const auto& [d, a, m] : groups) {
    // ratio 1 row: accuracy before pruning, one value per seed.
    std::map<std::uint64_t, double> acc_before;
    for (double t : ratio_list) {
      const auto it = index.find({d, a, m, t});
      if (it == index.end()) continue;
      for (const auto& [seed, rec] : it->second.by_seed) acc_before[seed] = rec->acc_before;
    }
    auto mean_se = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      if (v.size() < 2) return std::make_pair(mean, 0.0);
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      var /= static_cast<double>(v.size() - 1);
      return std::make_pair(mean, std::sqrt(var / static_cast<double>(v.size())));
    };
    {
      std::vector<double> acc;
      for (const auto& [seed, v] : acc_before) acc.push_back(v);
      const auto [mean, se] = mean_se(acc);
      TradeoffEntry t1{d, a, m, 1.0, acc.size(), mean, se, false, 0.0, 0.0};
      out.tradeoff.push_back(t1);
    }
    for (double t : ratio_list) {
      const auto it = index.find({d, a, m, t});
      if (it == index.end()) continue;
      const auto alphas = all_alphas(it->second);
      std::vector<double> accs;
      std::vector<std::pair<ClassBalanceProfile, ClassBalanceProfile>> pairs;
      for (const auto& [seed, rec] : it->second.by_seed) {
        accs.push_back(rec->acc_after);
        pairs.emplace_back(rec->before, rec->after);
      }
      const auto [acc_mean, acc_se] = mean_se(accs);
      const auto [alpha_mean, alpha_se] = mean_se(alphas);
      out.tradeoff.push_back(
          TradeoffEntry{d, a, m, t, alphas.size(), acc_mean, acc_se, true, alpha_mean, alpha_se});

      if (alphas.size() < 2) {
        note_gap("ci " + d + "/" + a + "/" + m + " at t=" + ratio_label(t) +
                 ": fewer than 2 seeds, no confidence interval");
        continue;
      }
      CiEntry entry;
      entry.dataset = d;
      entry.arch = a;
      entry.method = m;
      entry.ratio = t;
      entry.n = alphas.size();
      entry.mean_alpha = alpha_mean;
      entry.ci = ci_mean(alphas, opts.ci_level);
      entry.classification = classify_ci(entry.ci, 1.0);
      entry.pooled = alpha_pooled(pairs);
      out.ci.push_back(std::move(entry));
    }
  }

  std::sort(out.gaps.begin(), out.gaps.end());
  return out;
}

namespace {

const char* kPvalueHeader =
    "family,table,row,col,kind,alternative,n,t,df,p_raw,p_adjusted,degenerate";

void write_table_rows(std::ostream& os, const PvalueTable& table) {
  for (std::size_t row = 0; row < table.row_labels.size(); ++row)
    for (std::size_t col = 0; col < table.col_labels.size(); ++col) {
      const auto& cell = table.cells[row][col];
      if (!cell) continue;
      const TestResult& r = cell->result;
      os << csv_join({table.family, table.table, table.row_labels[row], table.col_labels[col],
                      to_string(r.kind), to_string(r.alternative), std::to_string(cell->n),
                      format_double(r.t), format_double(r.df), format_double(r.p_raw),
                      format_double(r.p_adjusted), r.degenerate ? "1" : "0"})
         << "\n";
    }
}

}  // namespace

void write_analysis(const Analysis& analysis, const fs::path& dir) {
  fs::create_directories(dir);
  for (const char* family :
       {"ratio", "model", "dataset", "method", "method_by_model"}) {
    std::ostringstream os;
    os << kPvalueHeader << "\n";
    for (const auto& table : analysis.tables)
      if (table.family == family) write_table_rows(os, table);
    std::ofstream out(dir / ("pvalues_" + std::string(family) + ".csv"));
    if (!out) throw IoError("cannot write pvalues csv");
    out << os.str();
  }

  {
    std::ofstream out(dir / "ci_alpha.csv");
    if (!out) throw IoError("cannot write ci_alpha.csv");
    out << "dataset,arch,method,ratio,n,mean_alpha,ci_lower,ci_upper,level,classification,"
           "alpha_hat,r2,mean_accuracy_after,points\n";
    for (const auto& e : analysis.ci)
      out << csv_join({e.dataset, e.arch, e.method, format_double(e.ratio), std::to_string(e.n),
                       format_double(e.mean_alpha), format_double(e.ci.lower),
                       format_double(e.ci.upper), format_double(e.ci.level),
                       std::string(1, e.classification), format_double(e.pooled.alpha_hat),
                       format_double(e.pooled.r2), format_double(e.pooled.mean_accuracy),
                       std::to_string(e.pooled.points)})
          << "\n";
  }
  {
    std::ofstream out(dir / "tradeoff.csv");
    if (!out) throw IoError("cannot write tradeoff.csv");
    out << "dataset,arch,method,ratio,n,mean_accuracy,se_accuracy,mean_alpha,se_alpha\n";
    for (const auto& e : analysis.tradeoff)
      out << csv_join({e.dataset, e.arch, e.method, format_double(e.ratio), std::to_string(e.n),
                       format_double(e.mean_accuracy), format_double(e.se_accuracy),
                       e.has_alpha ? format_double(e.mean_alpha) : std::string("NA"),
                       e.has_alpha ? format_double(e.se_alpha) : std::string("NA")})
          << "\n";
  }
  {
    std::ofstream out(dir / "gaps.txt");
    if (!out) throw IoError("cannot write gaps.txt");
    for (const auto& g : analysis.gaps) out << g << "\n";
  }
  {
    std::ofstream out(dir / "analysis_meta.csv");
    if (!out) throw IoError("cannot write analysis_meta.csv");
    out << "key,value\nci_level," << format_double(analysis.ci_level) << "\n";
  }
}

Analysis load_analysis(const fs::path& dir) {
  Analysis analysis;

  {
    std::ifstream in(dir / "analysis_meta.csv");
    if (in) {
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        const auto f = csv_split(line);
        if (f.size() == 2 && f[0] == "ci_level") analysis.ci_level = parse_double_field(f[1]);
      }
    }
  }

  for (const char* family : {"ratio", "model", "dataset", "method", "method_by_model"}) {
    std::ifstream in(dir / ("pvalues_" + std::string(family) + ".csv"));
    if (!in) throw IoError("analysis directory is missing pvalues_" + std::string(family) +
                           ".csv");
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, std::size_t> table_index;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = csv_split(line);
      if (f.size() != 12) throw FormatError("pvalues csv: expected 12 fields");
      const std::string table_id = f[1];
      if (!table_index.count(table_id)) {
        table_index[table_id] = analysis.tables.size();
        PvalueTable t;
        t.family = family;
        t.table = table_id;
        analysis.tables.push_back(std::move(t));
      }
      PvalueTable& table = analysis.tables[table_index[table_id]];
      auto row_it = std::find(table.row_labels.begin(), table.row_labels.end(), f[2]);
      if (row_it == table.row_labels.end()) {
        table.row_labels.push_back(f[2]);
        row_it = table.row_labels.end() - 1;
      }
      auto col_it = std::find(table.col_labels.begin(), table.col_labels.end(), f[3]);
      if (col_it == table.col_labels.end()) {
        table.col_labels.push_back(f[3]);
        col_it = table.col_labels.end() - 1;
      }
      const std::size_t row = static_cast<std::size_t>(row_it - table.row_labels.begin());
      const std::size_t col = static_cast<std::size_t>(col_it - table.col_labels.begin());
      if (table.cells.size() < table.row_labels.size())
        table.cells.resize(table.row_labels.size());
      for (auto& r : table.cells)
        if (r.size() < table.col_labels.size()) r.resize(table.col_labels.size());
      PvalueCell cell;
      cell.n = std::stoull(f[6]);
      cell.result.kind = f[4] == "paired" ? TestKind::Paired : TestKind::Independent;
      cell.result.alternative = parse_alternative(f[5]);
      cell.result.t = parse_double_field(f[7]);
      cell.result.df = parse_double_field(f[8]);
      cell.result.p_raw = parse_double_field(f[9]);
      cell.result.p_adjusted = parse_double_field(f[10]);
      cell.result.degenerate = f[11] == "1";
      table.cells[row][col] = cell;
    }
  }

  {
    std::ifstream in(dir / "ci_alpha.csv");
    if (!in) throw IoError("analysis directory is missing ci_alpha.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = csv_split(line);
      if (f.size() != 14) throw FormatError("ci_alpha.csv: expected 14 fields");
      CiEntry e;
      e.dataset = f[0];
      e.arch = f[1];
      e.method = f[2];
      e.ratio = parse_double_field(f[3]);
      e.n = std::stoull(f[4]);
      e.mean_alpha = parse_double_field(f[5]);
      e.ci = {parse_double_field(f[6]), parse_double_field(f[7]), parse_double_field(f[8]), e.n};
      e.classification = f[9].empty() ? '?' : f[9][0];
      e.pooled.alpha_hat = parse_double_field(f[10]);
      e.pooled.r2 = parse_double_field(f[11]);
      e.pooled.mean_accuracy = parse_double_field(f[12]);
      e.pooled.points = std::stoull(f[13]);
      analysis.ci.push_back(std::move(e));
    }
  }
  {
    std::ifstream in(dir / "tradeoff.csv");
    if (!in) throw IoError("analysis directory is missing tradeoff.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = csv_split(line);
      if (f.size() != 9) throw FormatError("tradeoff.csv: expected 9 fields");
      TradeoffEntry e;
      e.dataset = f[0];
      e.arch = f[1];
      e.method = f[2];
      e.ratio = parse_double_field(f[3]);
      e.n = std::stoull(f[4]);
      e.mean_accuracy = parse_double_field(f[5]);
      e.se_accuracy = parse_double_field(f[6]);
      e.has_alpha = f[7] != "NA";
      if (e.has_alpha) {
        e.mean_alpha = parse_double_field(f[7]);
        e.se_alpha = parse_double_field(f[8]);
      }
      analysis.tradeoff.push_back(std::move(e));
    }
  }
  {
    std::ifstream in(dir / "gaps.txt");
    if (in) {
      std::string line;
      while (std::getline(in, line))
        if (!line.empty()) analysis.gaps.push_back(line);
    }
  }
  return analysis;
}

}  // namespace prunelab
