#pragma once

// Conversion of projected FrameNet annotations into PropBank-style
// predicate/argument instances, plus the dataset split and corpus
// statistics computed over the result.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "srlproj/io.hpp"
#include "srlproj/projector.hpp"
#include "srlproj/types.hpp"

namespace srlproj::propbank {

// frame name -> core FE names in frame-definition order.
class FrameIndex {
 public:
  FrameIndex() = default;
  explicit FrameIndex(std::map<std::string, std::vector<std::string>> core);

  // nullptr for unknown frames.
  const std::vector<std::string>* core_elements(const std::string& frame) const;
  std::size_t size() const { return core_.size(); }

  // {"Commerce_buy": ["Buyer", "Goods"], ...}
  static FrameIndex from_json(std::string_view text);
  static FrameIndex load(const std::string& path);

 private:
  std::map<std::string, std::vector<std::string>> core_;
};

// Dense: present core FEs are numbered ARG0.. in definition order with no
// gaps. Positional: ARGk with k the FE's definition position.
enum class ArgNumbering { Dense, Positional };

enum class MapRejection {
  UnknownFrame,
  PeripheralElement,
  UnknownElement,
  NoCoreArgs,
  ArgOverflow,
  AmbiguousPredicate,
  SpanConflict,
  DuplicatePredicate,
};

const char* to_string(MapRejection r);

inline constexpr int kMaxArgs = 6;  // ARG0..ARG5

using MapOutcome = std::variant<PropBankInstance, MapRejection>;

// `frame` is annotated on `sentence` (the target side).
MapOutcome map_to_propbank(const FrameAnnotation& frame, const AnnotatedSentence& sentence, const FrameIndex& index,
                           ArgNumbering numbering = ArgNumbering::Dense);
MapOutcome map_to_propbank(const project::ProjectedFrame& frame, const AnnotatedSentence& sentence,
                           const FrameIndex& index, ArgNumbering numbering = ArgNumbering::Dense);

struct SentenceRejection {
  std::string id;
  std::string frame;
  MapRejection reason;
};

struct CoreOnlyResult {
  std::vector<io::Conll09Sentence> kept;
  std::vector<SentenceRejection> rejected;  // first failing frame of each dropped sentence
};

// Keeps a sentence iff every frame on it maps; kept sentences retain their
// frames so the filter can be reapplied.
CoreOnlyResult core_only_filter(std::span<const AnnotatedSentence> sentences, const FrameIndex& index,
                                ArgNumbering numbering = ArgNumbering::Dense);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

// Seeded shuffle; dev and test get round(ratio * n) (at least 1), train the
// rest. Each fold lists indices in ascending order. Throws ConfigError when n < 3 or the
// ratios are invalid.
SplitIndices split(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

template <class T>
struct Folds {
  std::vector<T> train;
  std::vector<T> dev;
  std::vector<T> test;
};

template <class T>
Folds<T> split(std::span<const T> items, const SplitRatios& ratios, std::uint64_t seed) {
  SplitIndices idx = split(items.size(), ratios, seed);
  Folds<T> out;
  for (std::size_t i : idx.train) out.train.push_back(items[i]);
  for (std::size_t i : idx.dev) out.dev.push_back(items[i]);
  for (std::size_t i : idx.test) out.test.push_back(items[i]);
  return out;
}

// Surface tokens with every multiword span collapsed to its surface form.
std::vector<std::string> unsegment(const AnnotatedSentence& sentence);

struct CorpusStats {
  long long n_sentences = 0;
  long long n_tokens_seg = 0;
  long long n_types_seg = 0;
  double asl_seg = 0.0;
  long long n_tokens_unseg = 0;
  long long n_types_unseg = 0;
  double asl_unseg = 0.0;
};

CorpusStats corpus_stats(std::span<const AnnotatedSentence> sentences);

// Header plus one row per fold, mirroring the usual dataset-statistics table.
std::string format_stats_tsv(const std::vector<std::pair<std::string, CorpusStats>>& folds);

struct FrameStats {
  // Descending by count, ties by name.
  std::vector<std::pair<std::string, long long>> frames;
  std::vector<std::pair<std::string, long long>> elements;
};

FrameStats frame_stats(std::span<const AnnotatedSentence> sentences);
std::string format_frame_stats_tsv(const FrameStats& stats);

}  // namespace srlproj::propbank
