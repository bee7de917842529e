#include "prunelab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "prunelab/error.hpp"
#include "prunelab/idx.hpp"
#include "prunelab/synth.hpp"

namespace prunelab {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(strip(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!strip(cur).empty() || !parts.empty()) parts.push_back(strip(cur));
  return parts;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = strip(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any [section]");
    const std::string key = strip(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    auto& entries = cfg.sections_[section];
    if (entries.count(key))
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                        "' in [" + section + "]");
    entries[key] = Entry{strip(line.substr(eq + 1)), line_no, false};
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path.string());
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::optional<std::string> ConfigFile::take(const std::string& section, const std::string& key) {
  auto it = sections_.find(section);
  if (it == sections_.end()) return std::nullopt;
  auto jt = it->second.find(key);
  if (jt == it->second.end()) return std::nullopt;
  jt->second.consumed = true;
  return jt->second.value;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) {
  auto v = take(section, key);
  if (!v) throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
  return *v;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) {
  auto v = take(section, key);
  return v ? *v : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key) {
  const std::string v = get_string(section, key);
  try {
    std::size_t pos = 0;
    const std::int64_t out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + v + "' is not an integer");
  }
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) {
  return has(section, key) ? get_int(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) {
  const std::string v = get_string(section, key);
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + v + "' is not a number");
  }
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) {
  return has(section, key) ? get_double(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + v + "' is not a boolean");
}

std::vector<std::string> ConfigFile::get_list(const std::string& section, const std::string& key) {
  return split_commas(get_string(section, key));
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key) {
  std::vector<double> out;
  for (const auto& item : get_list(section, key)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": [" + section + "] " + key + " has non-numeric item '" +
                        item + "'");
    }
  }
  return out;
}

void ConfigFile::finish() const {
  std::vector<std::string> unknown;
  for (const auto& [section, entries] : sections_)
    for (const auto& [key, entry] : entries)
      if (!entry.consumed)
        unknown.push_back("[" + section + "] " + key + " (line " + std::to_string(entry.line) + ")");
  if (!unknown.empty()) {
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& u : unknown) msg += "\n  " + u;
    throw ConfigError(msg);
  }
}

std::vector<std::pair<std::size_t, double>> parse_schedule(const std::string& text) {
  std::vector<std::pair<std::size_t, double>> schedule;
  for (const auto& item : split_commas(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("schedule entry '" + item + "' must be epoch:rate");
    try {
      schedule.emplace_back(std::stoull(strip(item.substr(0, colon))),
                            std::stod(strip(item.substr(colon + 1))));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse schedule entry '" + item + "'");
    }
  }
  return schedule;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_commas(text)) {
    const auto range = item.find("..");
    try {
      if (range != std::string::npos) {
        const std::uint64_t lo = std::stoull(strip(item.substr(0, range)));
        const std::uint64_t hi = std::stoull(strip(item.substr(range + 2)));
        if (hi < lo) throw std::invalid_argument(item);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
      } else {
        seeds.push_back(std::stoull(item));
      }
    } catch (const std::exception&) {
      throw ConfigError("cannot parse seed list item '" + item + "'");
    }
  }
  return seeds;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Dataset DatasetConfig::load() const {
  if (kind == Kind::Synthetic) {
    // synth_balanced fills a validation split of its own; carve_validation
    // folds it back into train before carving the per-run split.
    Dataset ds = synth_balanced(classes, per_class, dim, separation, seed);
    ds.name = name;
    return ds;
  }
  IdxOptions opts;
  opts.name = name;
  opts.force_balance = force_balance;
  return load_idx({train_images, train_labels, test_images, test_labels}, opts);
}

namespace {

TrainConfig read_train_section(ConfigFile& cfg, const std::string& section) {
  TrainConfig tc;
  tc.epochs = static_cast<std::size_t>(cfg.get_int(section, "epochs"));
  tc.batch_size = static_cast<std::size_t>(cfg.get_int(section, "batch_size"));
  tc.schedule = parse_schedule(cfg.get_string(section, "schedule"));
  tc.weight_decay = cfg.get_double(section, "weight_decay", 0.0);
  tc.validate();
  return tc;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(ConfigFile& cfg,
                                               const std::filesystem::path& base_dir) {
  ExperimentConfig out;

  const std::string kind = cfg.get_string("dataset", "kind", "synthetic");
  if (kind == "idx") {
    out.dataset.kind = DatasetConfig::Kind::Idx;
    out.dataset.name = cfg.get_string("dataset", "name", "idx");
    out.dataset.train_images = resolve(base_dir, cfg.get_string("dataset", "train_images"));
    out.dataset.train_labels = resolve(base_dir, cfg.get_string("dataset", "train_labels"));
    out.dataset.test_images = resolve(base_dir, cfg.get_string("dataset", "test_images"));
    out.dataset.test_labels = resolve(base_dir, cfg.get_string("dataset", "test_labels"));
    out.dataset.force_balance = cfg.get_bool("dataset", "force_balance", true);
  } else if (kind == "synthetic") {
    out.dataset.kind = DatasetConfig::Kind::Synthetic;
    out.dataset.name = cfg.get_string("dataset", "name", "synthetic");
    out.dataset.classes = static_cast<std::size_t>(cfg.get_int("dataset", "classes", 2));
    out.dataset.per_class = static_cast<std::size_t>(cfg.get_int("dataset", "per_class", 200));
    out.dataset.dim = static_cast<std::size_t>(cfg.get_int("dataset", "dim", 8));
    out.dataset.separation = cfg.get_double("dataset", "separation", 6.0);
    out.dataset.seed = static_cast<std::uint64_t>(cfg.get_int("dataset", "seed", 1));
  } else {
    throw ConfigError("dataset kind must be 'idx' or 'synthetic', got '" + kind + "'");
  }
  out.dataset.validation_fraction = cfg.get_double("dataset", "validation_fraction", 0.1);

  std::string arch_text = "in=" + cfg.get_string("model", "input_shape");
  std::replace(arch_text.begin(), arch_text.end(), ' ', 'x');
  while (arch_text.find("xx") != std::string::npos)
    arch_text.erase(arch_text.find("xx"), 1);
  arch_text += ";classes=" + std::to_string(cfg.get_int("model", "classes"));
  arch_text += ";layers=" + cfg.get_string("model", "layers");
  out.architecture = ArchitectureSpec::parse(arch_text);
  out.architecture.name = cfg.get_string("model", "name", "");

  out.train = read_train_section(cfg, "train");
  out.finetune = read_train_section(cfg, "finetune");

  for (const auto& m : cfg.get_list("prune", "methods"))
    out.methods.push_back(PruneMethod::parse_kind(m));
  out.ratios = cfg.get_double_list("prune", "ratios");
  out.up_epsilon = cfg.get_double("prune", "up_epsilon", out.train.weight_decay);

  out.seeds = parse_seed_list(cfg.get_string("run", "seeds", "1..30"));
  out.output_dir = resolve(base_dir, cfg.get_string("run", "output_dir"));

  cfg.finish();
  out.validate();
  return out;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  ConfigFile cfg = ConfigFile::parse_file(path);
  return from_config(cfg, path.parent_path());
}

void ExperimentConfig::validate() const {
  architecture.validate();
  train.validate();
  finetune.validate();
  if (methods.empty()) throw ConfigError("method list is empty");
  if (ratios.empty()) throw ConfigError("ratio list is empty");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 1.0)) throw ConfigError("pruning ratios must be > 1");
    if (i && !(ratios[i] > ratios[i - 1]))
      throw ConfigError("pruning ratios must be strictly increasing");
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("seed list has duplicates");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
  if (!(up_epsilon >= 0.0)) throw ConfigError("up_epsilon must be >= 0");
}

namespace {

std::string train_signature(const TrainConfig& tc) {
  std::ostringstream out;
  out << "epochs=" << tc.epochs << ";bs=" << tc.batch_size << ";decay=" << tc.weight_decay
      << ";schedule=";
  for (const auto& [e, r] : tc.schedule) out << e << ":" << r << ",";
  return out.str();
}

std::string dataset_signature(const DatasetConfig& dc) {
  std::ostringstream out;
  if (dc.kind == DatasetConfig::Kind::Idx) {
    out << "idx;name=" << dc.name << ";balance=" << dc.force_balance;
  } else {
    out << "synth;name=" << dc.name << ";classes=" << dc.classes << ";per_class=" << dc.per_class
        << ";dim=" << dc.dim << ";sep=" << dc.separation << ";seed=" << dc.seed;
  }
  out << ";val=" << dc.validation_fraction;
  return out.str();
}

}  // namespace

std::string ExperimentConfig::baseline_signature(std::uint64_t seed) const {
  std::ostringstream out;
  out << "v1|" << dataset_signature(dataset) << "|" << architecture.layer_string() << "|train{"
      << train_signature(train) << "}|seed=" << seed;
  return out.str();
}

std::string ExperimentConfig::cell_signature(PruneMethodKind method, double ratio,
                                             std::uint64_t seed) const {
  std::ostringstream out;
  out << baseline_signature(seed) << "|ft{" << train_signature(finetune) << "}|method="
      << PruneMethod{method, 0, 0}.name() << "|up_eps=" << up_epsilon << "|ratio=" << ratio;
  return out.str();
}

}  // namespace prunelab
