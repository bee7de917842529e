#ifndef PRUNELAB_CONFIG_HPP
#define PRUNELAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prunelab/arch.hpp"
#include "prunelab/nn.hpp"
#include "prunelab/pruning.hpp"

namespace prunelab {

// Sectioned key-value file:
//
//   # comment
//   [section]
//   key = value
//
// Readers consume keys through the typed getters; finish() rejects anything
// left over, so misspelled keys fail loudly instead of silently using a
// default.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::filesystem::path& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key);
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  std::int64_t get_int(const std::string& section, const std::string& key);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback);
  double get_double(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key, double fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  std::vector<std::string> get_list(const std::string& section, const std::string& key);
  std::vector<double> get_double_list(const std::string& section, const std::string& key);

  // Throws ConfigError listing every unconsumed key.
  void finish() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  std::optional<std::string> take(const std::string& section, const std::string& key);
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

// Dataset source: either IDX files on disk or a synthetic task.
struct DatasetConfig {
  enum class Kind { Idx, Synthetic } kind = Kind::Synthetic;
  std::string name = "synthetic";
  // idx
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  bool force_balance = true;
  // synthetic
  std::size_t classes = 2, per_class = 200, dim = 8;
  double separation = 6.0;
  std::uint64_t seed = 1;

  double validation_fraction = 0.1;

  Dataset load() const;  // validation split left empty; carve per run seed
};

struct ExperimentConfig {
  DatasetConfig dataset;
  ArchitectureSpec architecture;
  TrainConfig train;     // seed field unused; run seeds take over
  TrainConfig finetune;  // likewise
  std::vector<PruneMethodKind> methods;
  std::vector<double> ratios;       // strictly increasing, all > 1
  std::vector<std::uint64_t> seeds;
  double up_epsilon = 0.0;          // defaults to train.weight_decay
  std::filesystem::path output_dir;

  void validate() const;
  // Canonical text form of one experiment cell; hashed for crash resume.
  std::string cell_signature(PruneMethodKind method, double ratio, std::uint64_t seed) const;
  std::string baseline_signature(std::uint64_t seed) const;

  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig from_config(ConfigFile& cfg,
                                      const std::filesystem::path& base_dir);
};

// Parses "1:0.1, 10:0.02" into a learning rate schedule.
std::vector<std::pair<std::size_t, double>> parse_schedule(const std::string& text);
// Parses "1..30" or "1, 2, 5".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace prunelab

#endif
