#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace srlproj::pipeline {

struct PipelineConfig {
  // Inputs.
  std::string pairs;          // source <TAB> target per line
  std::string source_conllu;  // parsed source sentences, ids pair-<line>
  std::string target_conllu;
  std::string frames;         // source-side frames JSONL
  std::string langid_model;
  std::string frame_index;
  std::string labels;         // curation labels TSV; defaults to <out_dir>/labels.tsv
  std::string quality_model;  // fitted classifier; defaults to the fit-quality output
  std::string out_dir = "out";

  // Language filter.
  std::string lang_src = "en";
  std::string lang_tgt = "he";
  double tau_lang = 0.5;

  // Aligner.
  int iterations = 5;
  double lambda = 4.0;
  double p_null = 0.08;
  double prune = 1e-7;
  bool optimize_lambda = false;

  // Quality filter.
  double tau = 0.80;
  int min_tokens = 5;
  int min_depth = 2;
  double bin_width = 0.1;

  // Mapping and split.
  std::string numbering = "dense";
  double ratio_train = 0.8;
  double ratio_dev = 0.1;
  double ratio_test = 0.1;

  std::uint64_t seed = 13;
  bool strict = false;
  unsigned workers = 1;

  // Sets one field from its textual form. Throws ConfigError on unknown keys
  // or malformed values.
  void set(std::string_view key, std::string_view value);

  // Range checks on every parameter; does not touch the filesystem.
  void validate() const;

  std::filesystem::path out(std::string_view name) const;
  std::filesystem::path labels_path() const;
  std::filesystem::path quality_model_path() const;

  nlohmann::ordered_json to_json() const;
};

std::vector<std::string> config_keys();

// `key = value` lines; `#` starts a comment; values may be double-quoted.
// Relative paths are resolved against the file's directory.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

// Throws ConfigError naming the first missing path.
void require_exists(const std::string& path, std::string_view what);

}  // namespace srlproj::pipeline
