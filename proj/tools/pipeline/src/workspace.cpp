#include "srlproj/pipeline/workspace.hpp"

#include "srlproj/error.hpp"
#include "srlproj/pipeline/stages.hpp"
#include "srlproj/utf8.hpp"

namespace srlproj::pipeline {

namespace {

std::map<std::string, AnnotatedSentence> load_treebank(const std::string& path, const std::string& lang, bool strict,
                                                       std::size_t& skipped) {
  io::ConlluOptions opts;
  opts.mode = strict ? io::ParseMode::Strict : io::ParseMode::Lenient;
  opts.lang = lang;
  io::ConlluResult parsed = io::parse_conllu(read_file(path), opts);
  skipped = parsed.skipped;
  std::map<std::string, AnnotatedSentence> out;
  for (AnnotatedSentence& s : parsed.sentences) {
    std::string id = s.id;
    if (!out.emplace(id, std::move(s)).second) throw ParseError(path + ": duplicate sentence id " + id);
  }
  return out;
}

}  // namespace

void Workspace::load_source() {
  if (source_) return;
  source_ = load_treebank(config_.source_conllu, config_.lang_src, config_.strict, source_skipped_);
  if (config_.frames.empty()) return;
  std::map<std::string, int> lengths;
  for (const auto& [id, s] : *source_) lengths[id] = s.size();
  io::FramesOptions opts;
  opts.mode = config_.strict ? io::ParseMode::Strict : io::ParseMode::Lenient;
  opts.sentence_lengths = &lengths;
  io::FramesResult frames = io::parse_frames_jsonl(read_file(config_.frames), opts);
  frames_dropped_ = frames.dropped;
  for (auto& [id, list] : frames.frames) {
    auto it = source_->find(id);
    if (it != source_->end()) it->second.frames = std::move(list);
  }
}

void Workspace::load_target() {
  if (!target_) target_ = load_treebank(config_.target_conllu, config_.lang_tgt, config_.strict, target_skipped_);
}

const AnnotatedSentence* Workspace::source(const std::string& id) {
  load_source();
  auto it = source_->find(id);
  return it == source_->end() ? nullptr : &it->second;
}

const AnnotatedSentence* Workspace::target(const std::string& id) {
  load_target();
  auto it = target_->find(id);
  return it == target_->end() ? nullptr : &it->second;
}

const std::vector<SentencePair>& Workspace::aligned_pairs() {
  if (aligned_) return *aligned_;
  const std::string ids = read_file(config_.out("alignments.ids"));
  const std::string links = read_file(config_.out("alignments.pharaoh"));
  const auto id_lines = io::split(ids, '\n');
  const auto link_lines = io::split(links, '\n');
  if (id_lines.size() != link_lines.size()) throw Error("alignments.ids and alignments.pharaoh differ in length");
  aligned_.emplace();
  for (std::size_t k = 0; k < id_lines.size(); ++k) {
    if (id_lines[k].empty()) continue;
    const std::string id(id_lines[k]);
    const AnnotatedSentence* src = source(id);
    const AnnotatedSentence* tgt = target(id);
    if (!src || !tgt) throw Error("aligned pair " + id + " is missing from the treebanks");
    SentencePair p;
    p.id = id;
    p.source = *src;
    p.target = *tgt;
    p.alignment = io::parse_pharaoh(link_lines[k], src->size(), tgt->size());
    p.status = PairStatus::Aligned;
    aligned_->push_back(std::move(p));
  }
  return *aligned_;
}

const io::FramesResult& Workspace::projected_frames() {
  if (!projected_) {
    load_target();
    std::map<std::string, int> lengths;
    for (const auto& [id, s] : *target_) lengths[id] = s.size();
    io::FramesOptions opts;
    opts.mode = io::ParseMode::Strict;
    opts.sentence_lengths = &lengths;
    projected_ = io::parse_frames_jsonl(read_file(config_.out("projected.jsonl")), opts);
  }
  return *projected_;
}

std::vector<SentencePair> Workspace::projected_pairs() {
  const io::FramesResult& frames = projected_frames();
  std::map<std::string, const SentencePair*> by_id;
  for (const SentencePair& p : aligned_pairs()) by_id.emplace(p.id, &p);
  std::vector<SentencePair> out;
  for (const std::string& id : frames.order) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("projected pair " + id + " is not among the aligned pairs");
    SentencePair p = *it->second;
    p.target.frames = frames.frames.at(id);
    p.status = PairStatus::Projected;
    out.push_back(std::move(p));
  }
  return out;
}

AnnotatedSentence Workspace::projected_target(const std::string& id) {
  const io::FramesResult& frames = projected_frames();
  const AnnotatedSentence* t = target(id);
  auto it = frames.frames.find(id);
  if (!t || it == frames.frames.end()) throw Error("no projected sentence " + id);
  AnnotatedSentence s = *t;
  s.frames = it->second;
  return s;
}

void Workspace::record_parse_drops(std::map<std::string, long long>& drops) const {
  if (source_skipped_) drops["source-parse-skipped"] = static_cast<long long>(source_skipped_);
  if (target_skipped_) drops["target-parse-skipped"] = static_cast<long long>(target_skipped_);
  if (frames_dropped_) drops["frames-dropped"] = static_cast<long long>(frames_dropped_);
}

std::vector<std::string> tokenize(const AnnotatedSentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const Token& t : s.tokens) out.push_back(utf8::to_lower_ascii(t.form));
  return out;
}

}  // namespace srlproj::pipeline
