#pragma once

// Readers and writers for every external format the pipeline touches:
// CoNLL-U trees, frame annotations as JSON lines, Pharaoh alignments,
// CoNLL-2009 PropBank output and two-column pair TSV.

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srlproj/types.hpp"

namespace srlproj::io {

// Strict aborts on the first bad record; lenient drops it and counts it.
enum class ParseMode { Strict, Lenient };

struct ConlluOptions {
  ParseMode mode = ParseMode::Strict;
  std::string lang;
  // Ids for sentences without `# sent_id` are prefix + 1-based file position.
  std::string id_prefix = "pair-";
};

struct ConlluResult {
  std::vector<AnnotatedSentence> sentences;
  std::size_t skipped = 0;
  std::vector<std::string> errors;
};

ConlluResult parse_conllu(std::istream& in, const ConlluOptions& opts = {});
ConlluResult parse_conllu(std::string_view text, const ConlluOptions& opts = {});

void write_conllu(std::ostream& out, const AnnotatedSentence& s);
std::string write_conllu(std::span<const AnnotatedSentence> sentences);

// ---------------------------------------------------------------------------
// Frames JSONL: {"id":..., "frames":[{"frame", "target":{start,end}, "lu",
//                "elements":[{"name","start","end","core"}]}]}
// Spans are 0-based inclusive token indices.

struct FramesOptions {
  ParseMode mode = ParseMode::Lenient;
  // When set, spans are range-checked against the sentence length by id.
  const std::map<std::string, int>* sentence_lengths = nullptr;
};

struct FramesResult {
  std::map<std::string, std::vector<FrameAnnotation>> frames;
  std::vector<std::string> order;  // ids in input order
  std::size_t dropped = 0;
  std::vector<std::string> errors;
};

FramesResult parse_frames_jsonl(std::istream& in, const FramesOptions& opts = {});
FramesResult parse_frames_jsonl(std::string_view text, const FramesOptions& opts = {});

std::string format_frames_record(const std::string& id, std::span<const FrameAnnotation> frames);

// ---------------------------------------------------------------------------
// Pharaoh "i-j" links, source index first.

Alignment parse_pharaoh(std::string_view line, int src_len, int tgt_len);
std::string format_pharaoh(const Alignment& a);

// ---------------------------------------------------------------------------
// CoNLL-2009: 14 fixed columns plus one APRED column per predicate.
//
// Arguments are marked on their head row. Reading reconstructs each argument
// span as the head's subtree yield with the predicate trimmed off an edge,
// which is exactly the span shape the projector emits.

struct Conll09Sentence {
  AnnotatedSentence sentence;
  std::vector<PropBankInstance> predicates;
};

void write_conll2009(std::ostream& out, const Conll09Sentence& s);
std::string write_conll2009(std::span<const Conll09Sentence> sentences);

std::vector<Conll09Sentence> parse_conll2009(std::istream& in);
std::vector<Conll09Sentence> parse_conll2009(std::string_view text);

// ---------------------------------------------------------------------------
// Two-column UTF-8 TSV of raw sentence pairs.

struct RawPair {
  std::string id;  // pair-<line number>
  std::string source;
  std::string target;

  friend bool operator==(const RawPair&, const RawPair&) = default;
};

struct PairsResult {
  std::vector<RawPair> pairs;
  std::size_t skipped_columns = 0;
  std::size_t skipped_encoding = 0;
};

PairsResult read_pairs_tsv(std::istream& in);
PairsResult read_pairs_tsv(std::string_view text);

// Small helpers shared by the line-oriented formats.
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::string_view strip_cr(std::string_view s);
std::string_view trim(std::string_view s);
bool parse_int(std::string_view s, int& out);

}  // namespace srlproj::io
