#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "srlproj/error.hpp"
#include "srlproj/io.hpp"
#include "srlproj/pipeline/config.hpp"
#include "srlproj/pipeline/stages.hpp"

using namespace srlproj;
using namespace srlproj::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path data(const std::string& name) { return fs::path(SRLPROJ_TEST_DATA) / name; }

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

// The 500-pair corpus is shared by every test in this file; it is built once.
const testing::MiniCorpusFiles& mini() {
  static const testing::MiniCorpusFiles files = testing::write_mini_corpus(testing::temp_dir("pipeline"), 13, 300);
  return files;
}

// Two Commerce_buy pairs with the mini corpus language model.
PipelineConfig commerce_config(const fs::path& out) {
  PipelineConfig c;
  c.pairs = data("commerce_buy.pairs.tsv").string();
  c.source_conllu = data("commerce_buy.source.conllu").string();
  c.target_conllu = data("commerce_buy.target.conllu").string();
  c.frames = data("commerce_buy.frames.jsonl").string();
  c.frame_index = data("frame_index.json").string();
  c.langid_model = mini().langid_model.string();
  c.out_dir = out.string();
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n"
      "pairs = in/pairs.tsv\n"
      "tau = 0.7   # inline\n"
      "lang_tgt = \"he\"\n"
      "\n"
      "optimize_lambda = true\n"
      "seed = 99\n",
      "/data");
  CHECK(c.pairs == "/data/in/pairs.tsv");
  CHECK(c.tau == 0.7);
  CHECK(c.lang_tgt == "he");
  CHECK(c.optimize_lambda);
  CHECK(c.seed == 99);
  CHECK(c.iterations == 5);

  try {
    parse_config("tau = 0.5\nbogus = 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_config("tau\n"), ParseError);
  CHECK_THROWS_AS(parse_config("iterations = five\n"), ParseError);

  PipelineConfig bad;
  bad.tau = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.ratio_train = 0.9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.bin_width = 0.3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.numbering = "sparse";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_NOTHROW(PipelineConfig{}.validate());

  const auto keys = config_keys();
  CHECK(std::find(keys.begin(), keys.end(), "tau") != keys.end());
  CHECK(PipelineConfig{}.to_json().size() == keys.size());
}

TEST_CASE("stages refuse to run before their prerequisites") {
  const fs::path out = testing::temp_dir("prereq");
  const PipelineConfig c = commerce_config(out);
  try {
    run_stage(c, "project");
    FAIL("expected PrerequisiteError");
  } catch (const PrerequisiteError& e) {
    CHECK(e.stage() == "align");
  }
  try {
    run_stage(c, "align");
    FAIL("expected PrerequisiteError");
  } catch (const PrerequisiteError& e) {
    CHECK(e.stage() == "filter-lang");
  }
  CHECK_THROWS_AS(run_stage(c, "bogus"), ConfigError);
}

TEST_CASE("align on the two-pair fixture, then cached reruns") {
  const fs::path out = testing::temp_dir("align");
  const PipelineConfig c = commerce_config(out);
  const StageReport lang = run_stage(c, "filter-lang");
  CHECK(lang.inputs == 2);
  CHECK(lang.outputs == 2);
  const StageReport a = run_stage(c, "align");
  CHECK_FALSE(a.cached);
  CHECK(a.extra.at("pairs") == 2);
  CHECK(count_lines(out / "alignments.pharaoh") == 2);
  CHECK(fs::exists(out / "reports" / "align.json"));

  const StageReport again = run_stage(c, "align");
  CHECK(again.cached);
  CHECK(again.input_hash == a.input_hash);
  CHECK(again.outputs == a.outputs);

  PipelineConfig changed = c;
  changed.lambda = 2.0;
  CHECK_FALSE(run_stage(changed, "align").cached);

  // a tampered artifact invalidates the cache
  std::ofstream(out / "alignments.pharaoh", std::ios::app) << "0-0\n";
  CHECK_FALSE(run_stage(changed, "align").cached);

  CHECK(StageReport::from_json(a.to_json()).to_json() == a.to_json());
}

TEST_CASE("empty input runs to a zero manifest") {
  const fs::path dir = testing::temp_dir("empty");
  std::ofstream(dir / "pairs.tsv").close();
  PipelineConfig c = commerce_config(dir / "out");
  c.pairs = (dir / "pairs.tsv").string();
  c.quality_model = (dir / "none.json").string();
  std::ofstream(c.quality_model) << "{}";
  const Manifest m = run_all(c);
  CHECK(m.stages.empty());
  for (const auto& f : m.funnel) CHECK(f.count == 0);
  CHECK(m.outputs.empty());
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK_FALSE(fs::exists(dir / "out" / "train.conll09"));
}

TEST_CASE("invalid tau is rejected before anything runs") {
  const fs::path out = testing::temp_dir("tau");
  PipelineConfig c = commerce_config(out / "o");
  c.tau = 1.5;
  CHECK_THROWS_AS(run_all(c), ConfigError);
  CHECK_FALSE(fs::exists(out / "o"));
}

TEST_CASE("missing inputs are named") {
  PipelineConfig c = commerce_config(testing::temp_dir("missing"));
  c.frames = "/nonexistent/frames.jsonl";
  try {
    run_all(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("frames") != std::string::npos);
  }
  c.frames = "internal";
  CHECK_THROWS_AS(run_all(c), ConfigError);
}

TEST_CASE("run_all on the mini corpus") {
  const auto& files = mini();
  const PipelineConfig c = load_config(files.config.string());
  CHECK(c.out_dir == (files.dir / "out").string());
  const Manifest m = run_all(c);
  CHECK(m.skipped.empty());
  REQUIRE(m.funnel.size() == 5);
  CHECK(m.funnel[0].count == files.n_pairs);
  for (std::size_t k = 1; k < m.funnel.size(); ++k) CHECK(m.funnel[k].count <= m.funnel[k - 1].count);
  CHECK(m.funnel[4].count >= 10);

  const fs::path out = files.dir / "out";
  for (const char* name : {"train.conll09", "dev.conll09", "test.conll09", "stats.tsv", "histogram.csv",
                           "frame_stats_pre.tsv", "frame_stats_post.tsv", "manifest.json", "quality_model.json"}) {
    CHECK_MESSAGE(fs::exists(out / name), name);
  }
  std::size_t total = 0;
  for (const char* fold : {"train.conll09", "dev.conll09", "test.conll09"}) {
    const std::string text = read_file(out / fold);
    const auto parsed = io::parse_conll2009(text);
    CHECK(io::write_conll2009(parsed) == text);
    total += parsed.size();
  }
  CHECK(static_cast<long long>(total) == m.funnel[4].count);

  // second run is served from the cache
  const Manifest again = run_all(c);
  for (const auto& r : again.stages) CHECK_MESSAGE(r.cached, r.stage);
}
