#include "prunelab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "prunelab/csv.hpp"
#include "prunelab/error.hpp"
#include "prunelab/model_io.hpp"
#include "prunelab/pruning.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

namespace fs = std::filesystem;

std::size_t method_rank(const std::string& name) {
  if (name == "MP") return 0;
  if (name == "GP") return 1;
  if (name == "UP") return 2;
  if (name == "RP") return 3;
  return 4;
}

void sort_records(std::vector<RunRecord>& records) {
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    const auto ka = std::tie(a.key.dataset, a.key.arch);
    const auto kb = std::tie(b.key.dataset, b.key.arch);
    if (ka != kb) return ka < kb;
    const auto ma = method_rank(a.key.method), mb = method_rank(b.key.method);
    if (ma != mb) return ma < mb;
    if (a.key.ratio != b.key.ratio) return a.key.ratio < b.key.ratio;
    return a.key.seed < b.key.seed;
  });
}

namespace {

std::string hash_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

std::string ratio_tag(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", ratio);
  std::string tag = buf;
  for (char& c : tag)
    if (c == '.') c = 'p';
  return tag;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("PRUNELAB_WORKERS")) {
    try {
      n = static_cast<std::size_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw ConfigError("PRUNELAB_WORKERS is not a number");
    }
  }
  if (n == 0) n = 1;
  return std::min(n, std::max<std::size_t>(jobs, 1));
}

// Runs jobs [0, count) over a small thread pool. Exceptions propagate after
// all workers join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& job) {
  if (count == 0) return;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (first_error.empty()) first_error = e.what();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (!first_error.empty()) throw Error(first_error);
}

struct BaselineData {
  Model model;
  ClassBalanceProfile before;
  double recall_var = 0.0;
};

std::string profile_lines(const ClassBalanceProfile& p) {
  std::ostringstream out;
  out << "acc," << format_double(p.accuracy) << "\n";
  for (std::size_t c = 0; c < p.classes(); ++c)
    out << "class," << c << "," << format_double(p.recall[c]) << ","
        << format_double(p.balance[c]) << "," << format_double(p.normalized_balance[c]) << "\n";
  return out.str();
}

ClassBalanceProfile parse_profile_lines(std::istream& in, std::size_t classes) {
  ClassBalanceProfile p;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("baseline file: missing acc line");
  auto fields = csv_split(line);
  if (fields.size() != 2 || fields[0] != "acc") throw FormatError("baseline file: bad acc line");
  p.accuracy = parse_double_field(fields[1]);
  p.recall.resize(classes);
  p.balance.resize(classes);
  p.normalized_balance.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (!std::getline(in, line)) throw FormatError("baseline file: missing class line");
    fields = csv_split(line);
    if (fields.size() != 5 || fields[0] != "class")
      throw FormatError("baseline file: bad class line");
    const std::size_t idx = static_cast<std::size_t>(std::stoull(fields[1]));
    if (idx != c) throw FormatError("baseline file: class rows out of order");
    p.recall[c] = parse_double_field(fields[2]);
    p.balance[c] = parse_double_field(fields[3]);
    p.normalized_balance[c] = parse_double_field(fields[4]);
  }
  return p;
}

std::string record_file_text(const RunRecord& r, const std::string& hash) {
  std::ostringstream out;
  out << "prunelab-cell,v1\n";
  out << "hash," << hash << "\n";
  out << "status,ok\n";
  out << csv_join({"run", r.key.dataset, r.key.arch, r.key.method, format_double(r.key.ratio),
                   std::to_string(r.key.seed), format_double(r.acc_before),
                   format_double(r.acc_after), format_double(r.alpha_value),
                   format_double(r.recall_var_before), format_double(r.recall_var_after),
                   format_double(r.wall_seconds)})
      << "\n";
  for (std::size_t c = 0; c < r.before.classes(); ++c) {
    const double nb = r.before.normalized_balance[c];
    std::string ratio_field = "NA";
    if (nb != 0.0) ratio_field = format_double(r.after.normalized_balance[c] / nb);
    out << csv_join({"class", std::to_string(c), format_double(r.before.recall[c]),
                     format_double(r.after.recall[c]), format_double(r.before.balance[c]),
                     format_double(r.after.balance[c]), format_double(nb),
                     format_double(r.after.normalized_balance[c]), ratio_field})
        << "\n";
  }
  return out.str();
}

// Returns the stored record when the file is a completed cell with a
// matching hash. Failed or stale cells return nullopt and get recomputed.
std::optional<RunRecord> parse_record_file(const fs::path& path, const std::string& want_hash) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || csv_split(line) != std::vector<std::string>{"prunelab-cell", "v1"})
    return std::nullopt;
  if (!std::getline(in, line)) return std::nullopt;
  auto fields = csv_split(line);
  if (fields.size() != 2 || fields[0] != "hash" || fields[1] != want_hash) return std::nullopt;
  if (!std::getline(in, line)) return std::nullopt;
  fields = csv_split(line);
  if (fields.size() < 2 || fields[0] != "status" || fields[1] != "ok") return std::nullopt;

  RunRecord r;
  if (!std::getline(in, line)) return std::nullopt;
  fields = csv_split(line);
  if (fields.size() != 12 || fields[0] != "run") return std::nullopt;
  r.key.dataset = fields[1];
  r.key.arch = fields[2];
  r.key.method = fields[3];
  r.key.ratio = parse_double_field(fields[4]);
  r.key.seed = std::stoull(fields[5]);
  r.acc_before = parse_double_field(fields[6]);
  r.acc_after = parse_double_field(fields[7]);
  r.alpha_value = parse_double_field(fields[8]);
  r.recall_var_before = parse_double_field(fields[9]);
  r.recall_var_after = parse_double_field(fields[10]);
  r.wall_seconds = parse_double_field(fields[11]);
  r.before.accuracy = r.acc_before;
  r.after.accuracy = r.acc_after;
  while (std::getline(in, line)) {
    fields = csv_split(line);
    if (fields.size() != 9 || fields[0] != "class") return std::nullopt;
    r.before.recall.push_back(parse_double_field(fields[2]));
    r.after.recall.push_back(parse_double_field(fields[3]));
    r.before.balance.push_back(parse_double_field(fields[4]));
    r.after.balance.push_back(parse_double_field(fields[5]));
    r.before.normalized_balance.push_back(parse_double_field(fields[6]));
    r.after.normalized_balance.push_back(parse_double_field(fields[7]));
  }
  if (r.before.classes() < 2) return std::nullopt;
  return r;
}

void write_text_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_aggregates(const fs::path& dir, const std::vector<RunRecord>& records,
                      const std::vector<std::string>& failures) {
  std::ostringstream runs;
  runs << "dataset,arch,method,ratio,seed,acc_before,acc_after,alpha,recall_var_before,"
          "recall_var_after\n";
  std::ostringstream recalls;
  recalls << "dataset,arch,method,ratio,seed,class,recall_before,recall_after,balance_before,"
             "balance_after,normalized_balance_before,normalized_balance_after,"
             "intensification_or_NA\n";
  for (const auto& r : records) {
    const std::vector<std::string> key = {r.key.dataset, r.key.arch, r.key.method,
                                          format_double(r.key.ratio), std::to_string(r.key.seed)};
    std::vector<std::string> row = key;
    row.insert(row.end(), {format_double(r.acc_before), format_double(r.acc_after),
                           format_double(r.alpha_value), format_double(r.recall_var_before),
                           format_double(r.recall_var_after)});
    runs << csv_join(row) << "\n";
    for (std::size_t c = 0; c < r.before.classes(); ++c) {
      std::vector<std::string> crow = key;
      const bool defined = r.before.normalized_balance[c] != 0.0;
      crow.insert(crow.end(),
                  {std::to_string(c), format_double(r.before.recall[c]),
                   format_double(r.after.recall[c]), format_double(r.before.balance[c]),
                   format_double(r.after.balance[c]),
                   format_double(r.before.normalized_balance[c]),
                   format_double(r.after.normalized_balance[c]),
                   defined ? format_double(r.after.normalized_balance[c] /
                                           r.before.normalized_balance[c])
                           : std::string("NA")});
      recalls << csv_join(crow) << "\n";
    }
  }
  write_text_file(dir / "runs.csv", runs.str());
  write_text_file(dir / "recalls.csv", recalls.str());
  std::ostringstream fail;
  for (const auto& f : failures) fail << f << "\n";
  write_text_file(dir / "failures.txt", fail.str());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool resume, std::ostream* log) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  if (!resume && fs::exists(dir / "cells") && !fs::is_empty(dir / "cells"))
    throw UsageError("output directory already has records; use 'experiment resume' to continue");
  fs::create_directories(dir / "cells");
  fs::create_directories(dir / "baselines");
  fs::create_directories(dir / "models");

  std::mutex log_mutex;
  auto say = [&](const std::string& msg) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    (*log) << msg << std::endl;
  };

  const Dataset base = cfg.dataset.load();
  if (base.num_classes != cfg.architecture.num_classes)
    throw ConfigError("dataset has " + std::to_string(base.num_classes) +
                      " classes but the model emits " +
                      std::to_string(cfg.architecture.num_classes));
  const std::string arch_label = cfg.architecture.label();

  ExperimentResult result;
  std::mutex progress_mutex;

  // Phase 1: one trained baseline per seed, reused by every cell.
  std::vector<BaselineData> baselines(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), worker_count(cfg.seeds.size()), [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    const std::string hash = hash_hex(cfg.baseline_signature(seed));
    const fs::path model_path = dir / "models" / ("seed_" + std::to_string(seed) + ".plab");
    const fs::path profile_path = dir / "baselines" / ("seed_" + std::to_string(seed) + ".csv");

    if (fs::exists(model_path) && fs::exists(profile_path)) {
      std::ifstream in(profile_path);
      std::string line;
      if (in && std::getline(in, line) &&
          csv_split(line) == std::vector<std::string>{"prunelab-baseline", "v1", hash}) {
        BaselineData data;
        data.model = load_model(model_path);
        data.before = parse_profile_lines(in, base.num_classes);
        std::string var_line;
        if (std::getline(in, var_line)) {
          const auto fields = csv_split(var_line);
          if (fields.size() == 2 && fields[0] == "recall_var") {
            data.recall_var = parse_double_field(fields[1]);
            baselines[i] = std::move(data);
            std::lock_guard<std::mutex> lock(progress_mutex);
            ++result.progress.baselines_reused;
            say("baseline seed " + std::to_string(seed) + ": reused");
            return;
          }
        }
      }
    }

    Dataset ds = base;
    ds.carve_validation(cfg.dataset.validation_fraction, seed);
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    Model model = build_model(cfg.architecture, seed);
    TrainResult trained = train(model, ds, tc);

    BaselineData data;
    data.model = std::move(trained.model);
    data.before = profile(confusion(data.model, ds, Split::Test));
    data.recall_var = recall_variance(data.before);

    save_model(data.model, model_path);
    std::ostringstream text;
    text << "prunelab-baseline,v1," << hash << "\n"
         << profile_lines(data.before) << "recall_var," << format_double(data.recall_var) << "\n";
    write_text_file(profile_path, text.str());
    say("baseline seed " + std::to_string(seed) + ": trained (val acc " +
        std::to_string(trained.history[trained.best_epoch - 1].val_accuracy) + ")");
    baselines[i] = std::move(data);
    std::lock_guard<std::mutex> lock(progress_mutex);
    ++result.progress.baselines_trained;
  });

  // Phase 2: prune + fine-tune cells.
  struct Cell {
    std::size_t seed_index;
    PruneMethodKind method;
    double ratio;
  };
  std::vector<Cell> cells;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si)
    for (PruneMethodKind m : cfg.methods)
      for (double ratio : cfg.ratios) cells.push_back({si, m, ratio});

  std::vector<std::optional<RunRecord>> outcomes(cells.size());
  std::vector<std::string> failures(cells.size());

  parallel_for(cells.size(), worker_count(cells.size()), [&](std::size_t ci) {
    const Cell& cell = cells[ci];
    const std::uint64_t seed = cfg.seeds[cell.seed_index];
    PruneMethod method{cell.method, 0.0, 0};
    if (cell.method == PruneMethodKind::Undecayed) method = PruneMethod::undecayed(cfg.up_epsilon);
    if (cell.method == PruneMethodKind::Random) method = PruneMethod::random(seed);

    const std::string hash = hash_hex(cfg.cell_signature(cell.method, cell.ratio, seed));
    const std::string stem = method.name() + "_r" + ratio_tag(cell.ratio) + "_s" +
                             std::to_string(seed);
    const fs::path cell_path = dir / "cells" / (stem + ".csv");

    if (auto existing = parse_record_file(cell_path, hash)) {
      outcomes[ci] = std::move(existing);
      std::lock_guard<std::mutex> lock(progress_mutex);
      ++result.progress.cells_skipped;
      say("cell " + stem + ": reused");
      return;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
      const BaselineData& baseline = baselines[cell.seed_index];
      Dataset ds = base;
      ds.carve_validation(cfg.dataset.validation_fraction, seed);
      TrainConfig ft = cfg.finetune;
      ft.seed = derive_key(seed, "ft",
                           {static_cast<std::uint64_t>(method_rank(method.name())),
                            std::bit_cast<std::uint64_t>(cell.ratio)});

      Model pruned = prune_and_finetune(baseline.model, method, cell.ratio, ds, ft);

      RunRecord r;
      r.key = {ds.name, arch_label, method.name(), cell.ratio, seed};
      r.before = baseline.before;
      r.after = profile(confusion(pruned, ds, Split::Test));
      r.alpha_value = alpha(r.before, r.after);
      r.acc_before = r.before.accuracy;
      r.acc_after = r.after.accuracy;
      r.recall_var_before = baseline.recall_var;
      r.recall_var_after = recall_variance(r.after);
      r.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - started).count();

      write_text_file(cell_path, record_file_text(r, hash));
      outcomes[ci] = std::move(r);
      std::lock_guard<std::mutex> lock(progress_mutex);
      ++result.progress.cells_computed;
      say("cell " + stem + ": done");
    } catch (const std::exception& e) {
      std::ostringstream text;
      text << "prunelab-cell,v1\nhash," << hash << "\nstatus,failed\n"
           << csv_join({"error", e.what()}) << "\n";
      write_text_file(cell_path, text.str());
      failures[ci] = stem + ": " + e.what();
      std::lock_guard<std::mutex> lock(progress_mutex);
      ++result.progress.cells_failed;
      say("cell " + stem + ": FAILED (" + e.what() + ")");
    }
  });

  for (auto& o : outcomes)
    if (o) result.records.push_back(std::move(*o));
  for (auto& f : failures)
    if (!f.empty()) result.failures.push_back(f);
  sort_records(result.records);
  std::sort(result.failures.begin(), result.failures.end());
  write_aggregates(dir, result.records, result.failures);
  return result;
}

std::vector<RunRecord> load_records(const fs::path& records_dir) {
  const fs::path runs_path = records_dir / "runs.csv";
  const fs::path recalls_path = records_dir / "recalls.csv";
  std::ifstream runs(runs_path);
  if (!runs) throw IoError("cannot open " + runs_path.string() + " (run the experiment first)");
  std::ifstream recalls(recalls_path);
  if (!recalls) throw IoError("cannot open " + recalls_path.string());

  std::vector<RunRecord> records;
  std::map<std::tuple<std::string, std::string, std::string, double, std::uint64_t>, std::size_t>
      index;
  std::string line;
  std::getline(runs, line);  // header
  while (std::getline(runs, line)) {
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 10) throw FormatError("runs.csv: expected 10 fields per row");
    RunRecord r;
    r.key = {f[0], f[1], f[2], parse_double_field(f[3]),
             static_cast<std::uint64_t>(std::stoull(f[4]))};
    r.acc_before = parse_double_field(f[5]);
    r.acc_after = parse_double_field(f[6]);
    r.alpha_value = parse_double_field(f[7]);
    r.recall_var_before = parse_double_field(f[8]);
    r.recall_var_after = parse_double_field(f[9]);
    r.before.accuracy = r.acc_before;
    r.after.accuracy = r.acc_after;
    index[{f[0], f[1], f[2], r.key.ratio, r.key.seed}] = records.size();
    records.push_back(std::move(r));
  }
  std::getline(recalls, line);  // header
  while (std::getline(recalls, line)) {
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 13) throw FormatError("recalls.csv: expected 13 fields per row");
    const auto key = std::make_tuple(f[0], f[1], f[2], parse_double_field(f[3]),
                                     static_cast<std::uint64_t>(std::stoull(f[4])));
    const auto it = index.find(key);
    if (it == index.end()) throw FormatError("recalls.csv row without a matching runs.csv row");
    RunRecord& r = records[it->second];
    r.before.recall.push_back(parse_double_field(f[6]));
    r.after.recall.push_back(parse_double_field(f[7]));
    r.before.balance.push_back(parse_double_field(f[8]));
    r.after.balance.push_back(parse_double_field(f[9]));
    r.before.normalized_balance.push_back(parse_double_field(f[10]));
    r.after.normalized_balance.push_back(parse_double_field(f[11]));
  }
  for (const auto& r : records)
    if (r.before.classes() < 2)
      throw FormatError("record " + r.key.dataset + "/" + r.key.method +
                        " is missing recalls.csv rows");
  return records;
}

}  // namespace prunelab
