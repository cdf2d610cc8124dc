#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "srlproj/error.hpp"
#include "srlproj/pipeline/config.hpp"

namespace srlproj::pipeline {

// A stage was run before the stage that produces its input.
class PrerequisiteError : public ConfigError {
 public:
  PrerequisiteError(const std::string& artifact, const std::string& stage)
      : ConfigError("missing artifact " + artifact + "; run '" + stage + "' first"), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

inline constexpr const char* kStages[] = {"filter-lang", "align", "project", "fit-quality",
                                          "score",       "map",   "split",   "stats"};

struct StageReport {
  std::string stage;
  bool cached = false;
  std::string input_hash;
  long long inputs = 0;
  long long outputs = 0;
  std::map<std::string, long long> drops;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  std::map<std::string, std::string> artifacts;  // file name -> content hash
  std::uint64_t seed = 0;
  double wall_ms = 0.0;

  nlohmann::ordered_json to_json() const;
  static StageReport from_json(const nlohmann::ordered_json& j);
};

// Runs one stage, or returns its previous report with cached=true when the
// inputs, parameters and artifacts are unchanged.
StageReport run_stage(const PipelineConfig& config, std::string_view stage);

struct FunnelEntry {
  std::string stage;
  long long count = 0;
};

struct Manifest {
  nlohmann::ordered_json config;
  std::vector<StageReport> stages;
  std::vector<std::string> skipped;  // stages not run because an earlier one emptied the corpus
  std::vector<FunnelEntry> funnel;   // raw, lang-filtered, projected, thresholded, core-only
  std::vector<std::string> outputs;
  std::string generated_at;

  nlohmann::ordered_json to_json() const;
};

// Runs every stage in order and writes <out_dir>/manifest.json.
Manifest run_all(const PipelineConfig& config);

// 64-bit FNV-1a, hex-encoded.
std::string content_hash(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and a rename.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace srlproj::pipeline
