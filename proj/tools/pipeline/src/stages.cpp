#include "srlproj/pipeline/stages.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "srlproj/aligner.hpp"
#include "srlproj/io.hpp"
#include "srlproj/langid.hpp"
#include "srlproj/projector.hpp"
#include "srlproj/propbank.hpp"
#include "srlproj/quality.hpp"
#include "srlproj/utf8.hpp"
#include "srlproj/pipeline/workspace.hpp"

namespace srlproj::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

ordered_json StageReport::to_json() const {
  ordered_json j;
  j["stage"] = stage;
  j["cached"] = cached;
  j["input_hash"] = input_hash;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["drops"] = ordered_json::object();
  for (const auto& [k, v] : drops) j["drops"][k] = v;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  j["artifacts"] = ordered_json::object();
  for (const auto& [k, v] : artifacts) j["artifacts"][k] = v;
  j["wall_ms"] = wall_ms;
  return j;
}

StageReport StageReport::from_json(const ordered_json& j) {
  static const std::set<std::string> known = {"stage", "cached",    "input_hash", "seed",   "inputs",
                                              "outputs", "drops",   "artifacts",  "wall_ms"};
  StageReport r;
  r.stage = j.at("stage").get<std::string>();
  r.cached = j.at("cached").get<bool>();
  r.input_hash = j.at("input_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.inputs = j.at("inputs").get<long long>();
  r.outputs = j.at("outputs").get<long long>();
  for (const auto& [k, v] : j.at("drops").items()) r.drops[k] = v.get<long long>();
  for (const auto& [k, v] : j.at("artifacts").items()) r.artifacts[k] = v.get<std::string>();
  r.wall_ms = j.at("wall_ms").get<double>();
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) r.extra[k] = v;
  }
  return r;
}

namespace {

struct Plan {
  std::vector<fs::path> inputs;
  std::string params;
};

using Outputs = std::vector<std::pair<std::string, std::string>>;  // file name, content

fs::path need(const PipelineConfig& cfg, const char* artifact, const char* producer) {
  fs::path p = cfg.out(artifact);
  if (!fs::exists(p)) throw PrerequisiteError(artifact, producer);
  return p;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  const std::string text = read_file(path);
  for (std::string_view l : io::split(text, '\n')) {
    if (!l.empty()) lines.emplace_back(l);
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) out += l + '\n';
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- filter-lang

Plan plan_filter_lang(const PipelineConfig& cfg) {
  require_exists(cfg.pairs, "pairs");
  require_exists(cfg.langid_model, "langid_model");
  return {{cfg.pairs, cfg.langid_model}, cfg.lang_src + '|' + cfg.lang_tgt + '|' + fmt(cfg.tau_lang)};
}

void exec_filter_lang(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  const io::PairsResult pairs = io::read_pairs_tsv(read_file(cfg.pairs));
  report.inputs = static_cast<long long>(pairs.pairs.size() + pairs.skipped_columns + pairs.skipped_encoding);
  if (pairs.skipped_columns) report.drops["malformed-line"] = static_cast<long long>(pairs.skipped_columns);
  if (pairs.skipped_encoding) report.drops["invalid-utf8"] = static_cast<long long>(pairs.skipped_encoding);

  langid::FilterResult result;
  if (!pairs.pairs.empty()) {
    const langid::LangIdModel model = langid::LangIdModel::load(cfg.langid_model);
    result = langid::filter_pairs(model, pairs.pairs, {cfg.lang_src, cfg.lang_tgt, cfg.tau_lang, cfg.workers});
  }
  std::string kept, rejected;
  for (const io::RawPair& p : result.kept) kept += p.id + '\t' + p.source + '\t' + p.target + '\n';
  for (const langid::Rejection& r : result.rejected) {
    rejected += r.pair_id + '\t' + langid::to_string(r.reason) + '\t' + r.detected.language + '\t' +
                fmt(r.detected.posterior) + '\n';
    ++report.drops[langid::to_string(r.reason)];
  }
  report.outputs = static_cast<long long>(result.kept.size());
  outputs = {{"lang_filtered.tsv", kept}, {"lang_rejections.tsv", rejected}};
}

// ---------------------------------------------------------------------- align

Plan plan_align(const PipelineConfig& cfg) {
  const fs::path filtered = need(cfg, "lang_filtered.tsv", "filter-lang");
  require_exists(cfg.source_conllu, "source_conllu");
  require_exists(cfg.target_conllu, "target_conllu");
  return {{filtered, cfg.source_conllu, cfg.target_conllu},
          std::to_string(cfg.iterations) + '|' + fmt(cfg.lambda) + '|' + fmt(cfg.p_null) + '|' + fmt(cfg.prune) +
              '|' + (cfg.optimize_lambda ? "opt" : "fixed") + '|' + (cfg.strict ? "strict" : "lenient")};
}

void exec_align(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  Workspace ws(cfg);
  std::vector<std::string> ids;
  for (const std::string& line : read_lines(cfg.out("lang_filtered.tsv"))) {
    ids.push_back(line.substr(0, line.find('\t')));
  }
  report.inputs = static_cast<long long>(ids.size());

  std::vector<std::string> kept;
  std::vector<align::TokenizedPair> corpus;
  for (const std::string& id : ids) {
    const AnnotatedSentence* src = ws.source(id);
    const AnnotatedSentence* tgt = ws.target(id);
    if (!src) {
      ++report.drops["missing-source-parse"];
    } else if (!tgt) {
      ++report.drops["missing-target-parse"];
    } else {
      kept.push_back(id);
      corpus.push_back({tokenize(*src), tokenize(*tgt)});
    }
  }
  ws.record_parse_drops(report.drops);

  align::AlignerOptions opts;
  opts.iterations = cfg.iterations;
  opts.lambda = cfg.lambda;
  opts.p_null = cfg.p_null;
  opts.prune = cfg.prune;
  opts.optimize_lambda = cfg.optimize_lambda;
  opts.workers = cfg.workers;
  align::TrainingTrace trace;
  const align::AlignmentModel model = align::em_train(corpus, opts, &trace);
  const std::vector<Alignment> links = align::viterbi_decode_all(model, corpus, cfg.workers);

  std::string pharaoh;
  for (const Alignment& a : links) pharaoh += io::format_pharaoh(a) + '\n';
  report.outputs = static_cast<long long>(kept.size());
  report.extra["pairs"] = report.outputs;
  report.extra["lambda"] = model.lambda();
  report.extra["log_likelihood"] = trace.log_likelihood.empty() ? 0.0 : trace.log_likelihood.back();
  outputs = {{"alignments.pharaoh", pharaoh}, {"alignments.ids", join_lines(kept)}, {"model.align.json", model.to_json()}};
}

// -------------------------------------------------------------------- project

Plan plan_project(const PipelineConfig& cfg) {
  const fs::path ph = need(cfg, "alignments.pharaoh", "align");
  const fs::path ids = need(cfg, "alignments.ids", "align");
  require_exists(cfg.frames, "frames");
  return {{ph, ids, cfg.source_conllu, cfg.target_conllu, cfg.frames}, cfg.strict ? "strict" : "lenient"};
}

void exec_project(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  Workspace ws(cfg);
  const std::vector<SentencePair> pairs = ws.aligned_pairs();
  report.inputs = static_cast<long long>(pairs.size());

  std::vector<project::PairProjection> results;
  std::string projected;
  project::ProjectionSummary summary;
  for (const SentencePair& p : pairs) {
    project::PairProjection r = project::project_pair(p);
    summary.add(r);
    if (r.retained) {
      std::vector<FrameAnnotation> frames;
      for (const project::ProjectedFrame& f : r.frames) frames.push_back(f.annotation());
      projected += io::format_frames_record(p.id, frames) + '\n';
    }
    results.push_back(std::move(r));
  }
  for (const auto& [reason, n] : summary.frame_skips) report.drops[std::string("frame:") + to_string(reason)] = n;
  for (const project::PairProjection& r : results) {
    if (r.drop_reason) ++report.drops[std::string("pair:") + to_string(*r.drop_reason)];
  }
  report.outputs = summary.retained;
  report.extra["frames_in"] = summary.frames_in;
  report.extra["frames_projected"] = summary.frames_projected;
  outputs = {{"projected.jsonl", projected}, {"projection_skips.tsv", project::format_skip_log(results)}};
}

// ---------------------------------------------------------------- fit-quality

Plan plan_fit_quality(const PipelineConfig& cfg) {
  const fs::path ph = need(cfg, "alignments.pharaoh", "align");
  const fs::path ids = need(cfg, "alignments.ids", "align");
  require_exists(cfg.labels_path().string(), "labels");
  return {{ph, ids, cfg.source_conllu, cfg.target_conllu, cfg.frames, cfg.labels_path()},
          std::to_string(cfg.seed)};
}

void exec_fit_quality(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  Workspace ws(cfg);
  std::ifstream in(cfg.labels_path(), std::ios::binary);
  const auto labels = quality::read_labels_tsv(in);
  report.inputs = static_cast<long long>(labels.size());

  std::map<std::string, const SentencePair*> by_id;
  for (const SentencePair& p : ws.aligned_pairs()) by_id.emplace(p.id, &p);
  std::vector<quality::LabeledExample> examples;
  for (const auto& [id, label] : labels) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      ++report.drops["unknown-pair"];
      continue;
    }
    examples.push_back({quality::extract_features(*it->second), label});
  }
  quality::TrainingOptions opts;
  opts.seed = cfg.seed;
  const quality::LinearClassifier model = quality::fit(examples, opts);
  report.outputs = static_cast<long long>(examples.size());
  outputs = {{"quality_model.json", model.to_json()}};
}

// ---------------------------------------------------------------------- score

Plan plan_score(const PipelineConfig& cfg) {
  const fs::path projected = need(cfg, "projected.jsonl", "project");
  Plan plan{{projected, cfg.out("alignments.pharaoh"), cfg.out("alignments.ids"), cfg.source_conllu,
             cfg.target_conllu, cfg.frames},
            std::to_string(cfg.min_tokens) + '|' + std::to_string(cfg.min_depth) + '|' + fmt(cfg.tau) + '|' +
                fmt(cfg.bin_width)};
  if (fs::file_size(projected) > 0) {
    const fs::path model = cfg.quality_model_path();
    if (!fs::exists(model)) {
      if (cfg.quality_model.empty()) throw PrerequisiteError("quality_model.json", "fit-quality");
      require_exists(cfg.quality_model, "quality_model");
    }
    plan.inputs.push_back(model);
  }
  return plan;
}

void exec_score(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  Workspace ws(cfg);
  const std::vector<SentencePair> pairs = ws.projected_pairs();
  report.inputs = static_cast<long long>(pairs.size());

  std::vector<quality::ScoredPair> scored;
  if (!pairs.empty()) {
    const quality::LinearClassifier model = quality::LinearClassifier::load(cfg.quality_model_path().string());
    const quality::PrefilterOptions pre{cfg.min_tokens, cfg.min_depth};
    for (const SentencePair& p : pairs) {
      if (!quality::structural_prefilter(p, pre)) {
        ++report.drops["prefilter"];
        continue;
      }
      scored.push_back({p.id, model.score(quality::extract_features(p)), p.target.size()});
    }
  }
  std::string tsv;
  for (const quality::ScoredPair& s : scored) tsv += s.id + '\t' + fmt(s.score) + '\t' + std::to_string(s.target_length) + '\n';
  report.outputs = static_cast<long long>(scored.size());
  report.extra["thresholded"] = static_cast<long long>(quality::threshold_filter(scored, cfg.tau).size());
  outputs = {{"scores.tsv", tsv},
             {"histogram.csv", quality::format_histogram_csv(quality::score_histogram(scored, cfg.bin_width))}};
}

// ------------------------------------------------------------------------ map

Plan plan_map(const PipelineConfig& cfg) {
  const fs::path scores = need(cfg, "scores.tsv", "score");
  require_exists(cfg.frame_index, "frame_index");
  return {{scores, cfg.out("projected.jsonl"), cfg.target_conllu, cfg.frame_index},
          fmt(cfg.tau) + '|' + cfg.numbering + '|' + (cfg.strict ? "strict" : "lenient")};
}

void exec_map(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  Workspace ws(cfg);
  std::vector<quality::ScoredPair> scored;
  for (const std::string& line : read_lines(cfg.out("scores.tsv"))) {
    const auto cols = io::split(line, '\t');
    if (cols.size() != 3) throw ParseError("scores.tsv: expected 3 columns");
    quality::ScoredPair s;
    s.id = std::string(cols[0]);
    s.score = std::stod(std::string(cols[1]));
    io::parse_int(cols[2], s.target_length);
    scored.push_back(std::move(s));
  }
  report.inputs = static_cast<long long>(scored.size());
  const std::vector<quality::ScoredPair> kept = quality::threshold_filter(scored, cfg.tau);
  if (scored.size() > kept.size()) report.drops["below-threshold"] = static_cast<long long>(scored.size() - kept.size());
  report.extra["thresholded"] = static_cast<long long>(kept.size());

  std::vector<AnnotatedSentence> sentences;
  for (const quality::ScoredPair& s : kept) sentences.push_back(ws.projected_target(s.id));
  const propbank::FrameIndex index = propbank::FrameIndex::load(cfg.frame_index);
  const propbank::CoreOnlyResult result = propbank::core_only_filter(
      sentences, index, cfg.numbering == "positional" ? propbank::ArgNumbering::Positional
                                                      : propbank::ArgNumbering::Dense);
  std::string rejections;
  for (const propbank::SentenceRejection& r : result.rejected) {
    rejections += r.id + '\t' + r.frame + '\t' + propbank::to_string(r.reason) + '\n';
    ++report.drops[propbank::to_string(r.reason)];
  }
  std::vector<std::string> ids;
  for (const io::Conll09Sentence& s : result.kept) ids.push_back(s.sentence.id);
  report.outputs = static_cast<long long>(result.kept.size());
  outputs = {{"propbank.conll09", io::write_conll2009(result.kept)},
             {"propbank.ids", join_lines(ids)},
             {"map_rejections.tsv", rejections}};
}

// ---------------------------------------------------------------------- split

Plan plan_split(const PipelineConfig& cfg) {
  return {{need(cfg, "propbank.conll09", "map"), need(cfg, "propbank.ids", "map")},
          fmt(cfg.ratio_train) + '|' + fmt(cfg.ratio_dev) + '|' + fmt(cfg.ratio_test) + '|' + std::to_string(cfg.seed)};
}

void exec_split(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  const std::vector<io::Conll09Sentence> sentences = io::parse_conll2009(read_file(cfg.out("propbank.conll09")));
  const std::vector<std::string> ids = read_lines(cfg.out("propbank.ids"));
  if (ids.size() != sentences.size()) throw Error("propbank.ids does not match propbank.conll09");
  report.inputs = static_cast<long long>(sentences.size());

  const propbank::SplitIndices folds =
      propbank::split(sentences.size(), {cfg.ratio_train, cfg.ratio_dev, cfg.ratio_test}, cfg.seed);
  const std::pair<const char*, const std::vector<std::size_t>*> named[] = {
      {"train", &folds.train}, {"dev", &folds.dev}, {"test", &folds.test}};
  for (const auto& [name, idx] : named) {
    std::vector<io::Conll09Sentence> part;
    std::vector<std::string> part_ids;
    for (std::size_t i : *idx) {
      part.push_back(sentences[i]);
      part_ids.push_back(ids[i]);
    }
    report.extra[name] = static_cast<long long>(part.size());
    outputs.emplace_back(std::string(name) + ".conll09", io::write_conll2009(part));
    outputs.emplace_back(std::string(name) + ".ids", join_lines(part_ids));
  }
  report.outputs = report.inputs;
}

// ---------------------------------------------------------------------- stats

Plan plan_stats(const PipelineConfig& cfg) {
  Plan plan{{need(cfg, "propbank.ids", "map"), need(cfg, "projected.jsonl", "project"), cfg.out("alignments.pharaoh"),
             cfg.out("alignments.ids"), cfg.source_conllu, cfg.target_conllu},
            cfg.strict ? "strict" : "lenient"};
  for (const char* fold : {"train.ids", "dev.ids", "test.ids"}) {
    if (fs::exists(cfg.out(fold))) plan.inputs.push_back(cfg.out(fold));
  }
  return plan;
}

void exec_stats(const PipelineConfig& cfg, StageReport& report, Outputs& outputs) {
  Workspace ws(cfg);
  std::vector<std::pair<std::string, propbank::CorpusStats>> rows;
  auto fold_sentences = [&](const fs::path& ids_path) {
    std::vector<AnnotatedSentence> out;
    for (const std::string& id : read_lines(ids_path)) out.push_back(ws.projected_target(id));
    return out;
  };
  for (const char* fold : {"train", "dev", "test"}) {
    const fs::path p = cfg.out(std::string(fold) + ".ids");
    if (fs::exists(p)) rows.emplace_back(fold, propbank::corpus_stats(fold_sentences(p)));
  }
  const std::vector<AnnotatedSentence> post = fold_sentences(cfg.out("propbank.ids"));
  rows.emplace_back("all", propbank::corpus_stats(post));

  std::vector<AnnotatedSentence> pre;
  for (const SentencePair& p : ws.projected_pairs()) pre.push_back(p.target);

  std::vector<align::TokenizedPair> tokens;
  std::vector<Alignment> links;
  for (const SentencePair& p : ws.aligned_pairs()) {
    tokens.push_back({tokenize(p.source), tokenize(p.target)});
    links.push_back(p.alignment);
  }
  const align::AlignmentStats a = align::alignment_stats(tokens, links);
  std::string astats = "statistic\tvalue\n";
  astats += "total_links\t" + std::to_string(a.total_links) + '\n';
  astats += "one_to_one\t" + std::to_string(a.one_to_one) + '\n';
  astats += "one_to_many\t" + std::to_string(a.one_to_many) + '\n';
  astats += "many_covered_links\t" + std::to_string(a.many_covered_links) + '\n';
  astats += "other_links\t" + std::to_string(a.other_links) + '\n';
  astats += "aligned_sources\t" + std::to_string(a.aligned_sources) + '\n';
  astats += "distinct_pairs\t" + std::to_string(a.distinct_pairs) + '\n';
  astats += "mean_targets_per_aligned_source\t" + fmt(a.mean_targets_per_aligned_source) + '\n';

  report.inputs = static_cast<long long>(post.size());
  report.outputs = report.inputs;
  outputs = {{"stats.tsv", propbank::format_stats_tsv(rows)},
             {"frame_stats_pre.tsv", propbank::format_frame_stats_tsv(propbank::frame_stats(pre))},
             {"frame_stats_post.tsv", propbank::format_frame_stats_tsv(propbank::frame_stats(post))},
             {"alignment_stats.tsv", astats}};
}

struct StageImpl {
  const char* name;
  Plan (*plan)(const PipelineConfig&);
  void (*exec)(const PipelineConfig&, StageReport&, Outputs&);
};

const StageImpl kImpls[] = {
    {"filter-lang", plan_filter_lang, exec_filter_lang}, {"align", plan_align, exec_align},
    {"project", plan_project, exec_project},             {"fit-quality", plan_fit_quality, exec_fit_quality},
    {"score", plan_score, exec_score},                   {"map", plan_map, exec_map},
    {"split", plan_split, exec_split},                   {"stats", plan_stats, exec_stats},
};

std::string hash_inputs(std::string_view stage, const Plan& plan) {
  std::string acc(stage);
  acc += '\n' + plan.params + '\n';
  for (const fs::path& p : plan.inputs) acc += content_hash(read_file(p)) + '\n';
  return content_hash(acc);
}

std::optional<StageReport> cached_report(const PipelineConfig& cfg, std::string_view stage, const std::string& hash) {
  const fs::path path = cfg.out("reports") / (std::string(stage) + ".json");
  if (!fs::exists(path)) return std::nullopt;
  StageReport r;
  try {
    r = StageReport::from_json(ordered_json::parse(read_file(path)));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (r.input_hash != hash || r.seed != cfg.seed) return std::nullopt;
  for (const auto& [name, h] : r.artifacts) {
    const fs::path a = cfg.out(name);
    if (!fs::exists(a) || content_hash(read_file(a)) != h) return std::nullopt;
  }
  r.cached = true;
  return r;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

StageReport run_stage(const PipelineConfig& cfg, std::string_view stage) {
  cfg.validate();
  const StageImpl* impl = nullptr;
  for (const StageImpl& s : kImpls) {
    if (stage == s.name) impl = &s;
  }
  if (!impl) throw ConfigError("unknown stage '" + std::string(stage) + "'");

  const auto start = std::chrono::steady_clock::now();
  const Plan plan = impl->plan(cfg);
  const std::string hash = hash_inputs(stage, plan);
  if (auto cached = cached_report(cfg, stage, hash)) return *cached;

  StageReport report;
  report.stage = impl->name;
  report.input_hash = hash;
  report.seed = cfg.seed;
  Outputs outputs;
  impl->exec(cfg, report, outputs);
  for (const auto& [name, content] : outputs) {
    write_file(cfg.out(name), content);
    report.artifacts[name] = content_hash(content);
  }
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_file(cfg.out("reports") / (report.stage + ".json"), report.to_json().dump(2) + '\n');
  return report;
}

ordered_json Manifest::to_json() const {
  ordered_json j;
  j["tool"] = "srlproj";
  j["generated_at"] = generated_at;
  j["seed"] = config.value("seed", 0ULL);
  j["config"] = config;
  j["funnel"] = ordered_json::array();
  for (const FunnelEntry& f : funnel) j["funnel"].push_back({{"stage", f.stage}, {"count", f.count}});
  j["stages"] = ordered_json::array();
  for (const StageReport& r : stages) j["stages"].push_back(r.to_json());
  j["skipped"] = skipped;
  j["outputs"] = outputs;
  return j;
}

Manifest run_all(const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.frames == "internal") {
    throw ConfigError("frames = internal is not supported; supply source frames as JSONL");
  }
  for (const auto& [path, what] : {std::pair{cfg.pairs, "pairs"}, {cfg.source_conllu, "source_conllu"},
                                   {cfg.target_conllu, "target_conllu"}, {cfg.frames, "frames"},
                                   {cfg.langid_model, "langid_model"}, {cfg.frame_index, "frame_index"}}) {
    require_exists(path, what);
  }
  const bool fit_needed = cfg.quality_model.empty();
  if (fit_needed) {
    require_exists(cfg.labels_path().string(), "labels (needed to fit the quality model)");
  } else {
    require_exists(cfg.quality_model, "quality_model");
  }

  Manifest m;
  m.config = cfg.to_json();
  fs::create_directories(cfg.out_dir);

  const io::PairsResult raw = io::read_pairs_tsv(read_file(cfg.pairs));
  const bool empty = raw.pairs.empty() && raw.skipped_columns == 0 && raw.skipped_encoding == 0;

  std::map<std::string, StageReport> done;
  bool stop = empty;
  for (const char* stage : kStages) {
    const std::string s = stage;
    if (s == "fit-quality" && !fit_needed) continue;
    if (s == "split" && !stop && done.at("map").outputs < 3) {
      m.skipped.push_back(s);
      continue;
    }
    if (stop) {
      m.skipped.push_back(s);
      continue;
    }
    StageReport r = run_stage(cfg, s);
    if (s != "fit-quality" && s != "stats" && r.outputs == 0) stop = true;
    m.stages.push_back(r);
    done.emplace(s, std::move(r));
  }

  auto count = [&](const char* stage, auto get) -> long long {
    auto it = done.find(stage);
    return it == done.end() ? 0 : get(it->second);
  };
  m.funnel = {
      {"raw", empty ? 0 : count("filter-lang", [](const StageReport& r) { return r.inputs; })},
      {"lang-filtered", count("filter-lang", [](const StageReport& r) { return r.outputs; })},
      {"projected", count("project", [](const StageReport& r) { return r.outputs; })},
      {"thresholded", count("score", [](const StageReport& r) { return r.extra.value("thresholded", 0LL); })},
      {"core-only", count("map", [](const StageReport& r) { return r.outputs; })},
  };
  for (const StageReport& r : m.stages) {
    for (const auto& [name, _] : r.artifacts) m.outputs.push_back(name);
  }
  m.generated_at = utc_now();
  write_file(cfg.out("manifest.json"), m.to_json().dump(2) + '\n');
  return m;
}

}  // namespace srlproj::pipeline
