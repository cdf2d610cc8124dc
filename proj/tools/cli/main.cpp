// srlproj: command-line driver for the projection pipeline.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srlproj/error.hpp"
#include "srlproj/langid.hpp"
#include "srlproj/pipeline/config.hpp"
#include "srlproj/pipeline/service.hpp"
#include "srlproj/pipeline/stages.hpp"

namespace {

using namespace srlproj;
using namespace srlproj::pipeline;

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2 };

CurationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int train_langid_main(const std::vector<std::string>& inputs, int order, const std::string& output) {
  std::map<std::string, std::vector<std::string>> corpora;
  for (const std::string& arg : inputs) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--train expects LANG=PATH, got " + arg);
    std::ifstream in(arg.substr(eq + 1), std::ios::binary);
    if (!in) throw ConfigError("cannot read " + arg.substr(eq + 1));
    auto& lines = corpora[arg.substr(0, eq)];
    for (std::string line; std::getline(in, line);) {
      std::string cleaned = langid::clean_text(line);
      if (!cleaned.empty()) lines.push_back(std::move(cleaned));
    }
  }
  const langid::LangIdModel model = langid::train_langid(corpora, order);
  model.save(output);
  std::cout << "langid model: " << model.languages().size() << " languages, " << model.vocabulary_size()
            << " n-grams -> " << output << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annotation projection pipeline for SRL dataset bootstrapping"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);

  // Flag -> config key. Flags override the config file.
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--pairs", "pairs"},
      {"--src-conllu", "source_conllu"},
      {"--tgt-conllu", "target_conllu"},
      {"--frames", "frames"},
      {"--langid-model", "langid_model"},
      {"--frame-index", "frame_index"},
      {"--labels", "labels"},
      {"--quality-model", "quality_model"},
      {"-o,--out", "out_dir"},
      {"--lang-src", "lang_src"},
      {"--lang-tgt", "lang_tgt"},
      {"--tau-lang", "tau_lang"},
      {"--iters", "iterations"},
      {"--lambda", "lambda"},
      {"--p-null", "p_null"},
      {"--prune", "prune"},
      {"--optimize-lambda", "optimize_lambda"},
      {"--tau", "tau"},
      {"--min-tokens", "min_tokens"},
      {"--min-depth", "min_depth"},
      {"--bin-width", "bin_width"},
      {"--numbering", "numbering"},
      {"--ratio-train", "ratio_train"},
      {"--ratio-dev", "ratio_dev"},
      {"--ratio-test", "ratio_test"},
      {"--seed", "seed"},
      {"--strict", "strict"},
      {"--workers", "workers"},
  };
  std::map<std::string, std::string> overrides;
  for (const auto& [flag, key] : flags) {
    app.add_option(flag, overrides[key], "config key " + key)->group("Pipeline overrides");
  }

  std::vector<CLI::App*> stage_cmds;
  for (const char* stage : kStages) {
    stage_cmds.push_back(app.add_subcommand(stage, std::string("run the ") + stage + " stage"));
  }
  CLI::App* run_all_cmd = app.add_subcommand("run-all", "run every stage and write manifest.json");

  CLI::App* serve_cmd = app.add_subcommand("serve", "serve the curation HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "port")->check(CLI::Range(0, 65535));

  CLI::App* langid_cmd = app.add_subcommand("train-langid", "train the character n-gram language identifier");
  std::vector<std::string> train_inputs;
  int order = 3;
  std::string model_out;
  langid_cmd->add_option("--train", train_inputs, "LANG=PATH, one sentence per line")->required();
  langid_cmd->add_option("--order", order, "n-gram order")->check(CLI::Range(1, 8));
  langid_cmd->add_option("--model-out", model_out, "output model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (langid_cmd->parsed()) return train_langid_main(train_inputs, order, model_out);

    PipelineConfig config = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    for (const auto& [flag, key] : flags) {
      const std::string& v = overrides[key];
      if (app.count(flag.substr(flag.rfind(',') == std::string::npos ? 0 : flag.rfind(',') + 1)) > 0) {
        config.set(key, v);
      }
    }
    config.validate();

    if (run_all_cmd->parsed()) {
      const Manifest m = run_all(config);
      for (const FunnelEntry& f : m.funnel) std::cout << f.stage << '\t' << f.count << '\n';
      return kOk;
    }
    if (serve_cmd->parsed()) {
      CurationService service(config);
      CurationServer server(service);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << service.size() << " pairs on http://" << host << ':' << port << '\n';
      server.listen(host, port);
      g_server = nullptr;
      return kOk;
    }
    for (CLI::App* cmd : stage_cmds) {
      if (cmd->parsed()) {
        const StageReport r = run_stage(config, cmd->get_name());
        std::cout << r.to_json().dump(2) << '\n';
        return kOk;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
