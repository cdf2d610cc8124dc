#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srlproj/io.hpp"
#include "srlproj/pipeline/config.hpp"
#include "srlproj/types.hpp"

namespace srlproj::pipeline {

// Lazily loaded inputs and intermediate artifacts of one output directory.
class Workspace {
 public:
  explicit Workspace(const PipelineConfig& config) : config_(config) {}

  const AnnotatedSentence* source(const std::string& id);  // with source frames attached
  const AnnotatedSentence* target(const std::string& id);

  // Pairs listed in alignments.ids, in file order, with source frames.
  const std::vector<SentencePair>& aligned_pairs();
  // Retained projections, in projected.jsonl order; target frames are the
  // projected ones.
  std::vector<SentencePair> projected_pairs();
  AnnotatedSentence projected_target(const std::string& id);
  const io::FramesResult& projected_frames();

  // Sentences skipped by lenient parsing, keyed as drop reasons.
  void record_parse_drops(std::map<std::string, long long>& drops) const;

 private:
  void load_source();
  void load_target();

  const PipelineConfig& config_;
  std::optional<std::map<std::string, AnnotatedSentence>> source_;
  std::optional<std::map<std::string, AnnotatedSentence>> target_;
  std::size_t source_skipped_ = 0;
  std::size_t target_skipped_ = 0;
  std::size_t frames_dropped_ = 0;
  std::optional<std::vector<SentencePair>> aligned_;
  std::optional<io::FramesResult> projected_;
};

// Lower-cased word forms, as fed to the aligner.
std::vector<std::string> tokenize(const AnnotatedSentence& s);

}  // namespace srlproj::pipeline
