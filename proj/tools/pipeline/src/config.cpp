#include "srlproj/pipeline/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "srlproj/error.hpp"
#include "srlproj/io.hpp"

namespace srlproj::pipeline {

namespace fs = std::filesystem;

namespace {

const char* const kPathKeys[] = {"pairs",       "source_conllu", "target_conllu", "frames",  "langid_model",
                                 "frame_index", "labels",        "quality_model", "out_dir"};

bool is_path_key(std::string_view key) {
  for (const char* k : kPathKeys) {
    if (key == k) return true;
  }
  return false;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

long long to_integer(std::string_view key, std::string_view v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  const std::string v(value);
  if (key == "pairs") pairs = v;
  else if (key == "source_conllu") source_conllu = v;
  else if (key == "target_conllu") target_conllu = v;
  else if (key == "frames") frames = v;
  else if (key == "langid_model") langid_model = v;
  else if (key == "frame_index") frame_index = v;
  else if (key == "labels") labels = v;
  else if (key == "quality_model") quality_model = v;
  else if (key == "out_dir") out_dir = v;
  else if (key == "lang_src") lang_src = v;
  else if (key == "lang_tgt") lang_tgt = v;
  else if (key == "tau_lang") tau_lang = to_double(key, value);
  else if (key == "iterations") iterations = static_cast<int>(to_integer(key, value));
  else if (key == "lambda") lambda = to_double(key, value);
  else if (key == "p_null") p_null = to_double(key, value);
  else if (key == "prune") prune = to_double(key, value);
  else if (key == "optimize_lambda") optimize_lambda = to_bool(key, value);
  else if (key == "tau") tau = to_double(key, value);
  else if (key == "min_tokens") min_tokens = static_cast<int>(to_integer(key, value));
  else if (key == "min_depth") min_depth = static_cast<int>(to_integer(key, value));
  else if (key == "bin_width") bin_width = to_double(key, value);
  else if (key == "numbering") numbering = v;
  else if (key == "ratio_train") ratio_train = to_double(key, value);
  else if (key == "ratio_dev") ratio_dev = to_double(key, value);
  else if (key == "ratio_test") ratio_test = to_double(key, value);
  else if (key == "seed") {
    const long long s = to_integer(key, value);
    check(s >= 0, "seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "strict") strict = to_bool(key, value);
  else if (key == "workers") {
    const long long w = to_integer(key, value);
    check(w >= 1 && w <= 256, "workers must be in [1, 256]");
    workers = static_cast<unsigned>(w);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void PipelineConfig::validate() const {
  check(!out_dir.empty(), "out_dir must be set");
  check(!lang_src.empty() && !lang_tgt.empty() && lang_src != lang_tgt,
        "lang_src and lang_tgt must be distinct, non-empty codes");
  check(tau_lang >= 0.0 && tau_lang <= 1.0, "tau_lang must be in [0, 1]");
  check(iterations >= 1, "iterations must be >= 1");
  check(lambda >= 0.0, "lambda must be >= 0");
  check(p_null >= 0.0 && p_null < 1.0, "p_null must be in [0, 1)");
  check(prune >= 0.0 && prune < 1.0, "prune must be in [0, 1)");
  check(tau >= 0.0 && tau <= 1.0, "tau must be in [0, 1]");
  check(min_tokens >= 0, "min_tokens must be >= 0");
  check(min_depth >= 0, "min_depth must be >= 0");
  const double bins = 1.0 / bin_width;
  check(bin_width > 0.0 && bin_width <= 1.0 && std::abs(bins - std::round(bins)) < 1e-9,
        "bin_width must divide 1");
  check(numbering == "dense" || numbering == "positional", "numbering must be dense or positional");
  check(ratio_train > 0.0 && ratio_dev > 0.0 && ratio_test > 0.0, "split ratios must be positive");
  check(std::abs(ratio_train + ratio_dev + ratio_test - 1.0) < 1e-9, "split ratios must sum to 1");
}

fs::path PipelineConfig::out(std::string_view name) const { return fs::path(out_dir) / name; }

fs::path PipelineConfig::labels_path() const { return labels.empty() ? out("labels.tsv") : fs::path(labels); }

fs::path PipelineConfig::quality_model_path() const {
  return quality_model.empty() ? out("quality_model.json") : fs::path(quality_model);
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  return {
      {"pairs", pairs},
      {"source_conllu", source_conllu},
      {"target_conllu", target_conllu},
      {"frames", frames},
      {"langid_model", langid_model},
      {"frame_index", frame_index},
      {"labels", labels},
      {"quality_model", quality_model},
      {"out_dir", out_dir},
      {"lang_src", lang_src},
      {"lang_tgt", lang_tgt},
      {"tau_lang", tau_lang},
      {"iterations", iterations},
      {"lambda", lambda},
      {"p_null", p_null},
      {"prune", prune},
      {"optimize_lambda", optimize_lambda},
      {"tau", tau},
      {"min_tokens", min_tokens},
      {"min_depth", min_depth},
      {"bin_width", bin_width},
      {"numbering", numbering},
      {"ratio_train", ratio_train},
      {"ratio_dev", ratio_dev},
      {"ratio_test", ratio_test},
      {"seed", seed},
      {"strict", strict},
      {"workers", workers},
  };
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  const nlohmann::ordered_json defaults = PipelineConfig{}.to_json();
  for (const auto& [k, _] : defaults.items()) keys.push_back(k);
  return keys;
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  PipelineConfig config;
  int line_no = 0;
  for (std::string_view raw : io::split(text, '\n')) {
    ++line_no;
    std::string_view line = io::trim(io::strip_cr(raw));
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const std::string_view key = io::trim(line.substr(0, eq));
    std::string_view value = io::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string_view::npos) throw ParseError("unterminated quoted value", line_no);
      const std::string_view rest = io::trim(value.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') throw ParseError("trailing text after quoted value", line_no);
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find(" #"); hash != std::string_view::npos) {
      value = io::trim(value.substr(0, hash));
    }
    if (key.empty()) throw ParseError("empty key", line_no);
    try {
      if (is_path_key(key) && !value.empty() && !base_dir.empty() && fs::path(value).is_relative()) {
        config.set(key, (base_dir / fs::path(value)).lexically_normal().string());
      } else {
        config.set(key, value);
      }
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), fs::path(path).parent_path());
}

void require_exists(const std::string& path, std::string_view what) {
  if (path.empty()) throw ConfigError(std::string(what) + " is not configured");
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

}  // namespace srlproj::pipeline
