#pragma once

// Projection of source-side frame annotations onto the target sentence:
// find the head of each annotated span, follow its single alignment link,
// and take the dependency subtree under the aligned target token.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "srlproj/tree.hpp"
#include "srlproj/types.hpp"

namespace srlproj::project {

enum class SkipReason { NonVerbalLU, HeadUnaligned, HeadMultiAligned, SubtreeConflict, EmptyProjection };

inline constexpr SkipReason kAllSkipReasons[] = {SkipReason::NonVerbalLU, SkipReason::HeadUnaligned,
                                                 SkipReason::HeadMultiAligned, SkipReason::SubtreeConflict,
                                                 SkipReason::EmptyProjection};

const char* to_string(SkipReason r);
std::optional<SkipReason> parse_skip_reason(std::string_view s);

struct ProjectedFrame {
  std::string frame_name;
  std::string lu;
  Span target_span;  // the aligned predicate token
  std::vector<FrameElement> elements;
  int source_frame = 0;  // index into the source sentence's frames

  FrameAnnotation annotation() const { return {frame_name, target_span, lu, elements}; }
};

// Head of `span` in `sentence`, or nullopt if several tokens attach outside
// it. Throws ConfigError on an invalid span.
std::optional<int> span_head(const AnnotatedSentence& sentence, const Span& span);

// min..max of the subtree under `token`; nullopt when the yield has gaps.
// Throws ConfigError on an invalid index.
std::optional<Span> subtree_yield(const AnnotatedSentence& sentence, int token);

// A frame counts as verbal when its LU ends in ".v"; LUs without a POS
// suffix fall back to the coarse POS of the source target head.
bool is_verbal(const FrameAnnotation& frame, const AnnotatedSentence& source);

using FrameOutcome = std::variant<ProjectedFrame, SkipReason>;

// Precomputed per-pair state so that projecting several frames of one pair
// builds the trees and link tables once.
class PairProjector {
 public:
  explicit PairProjector(const SentencePair& pair);

  FrameOutcome project(const FrameAnnotation& frame, int frame_index = 0) const;

 private:
  // Target tokens linked to source token i.
  const std::vector<int>& links(int i) const { return links_.at(i); }

  const SentencePair& pair_;
  DependencyTree source_tree_;
  DependencyTree target_tree_;
  std::vector<std::vector<int>> links_;
};

FrameOutcome project_frame(const SentencePair& pair, const FrameAnnotation& frame);

struct FrameSkip {
  std::string pair_id;
  int frame_index = 0;
  std::string frame;
  SkipReason reason;
};

struct PairProjection {
  // Copy of the input with target.frames replaced by the projected frames.
  SentencePair pair;
  std::vector<ProjectedFrame> frames;
  std::vector<FrameSkip> skips;
  bool retained = false;
  // Set when the pair is dropped: no frame projected in full.
  std::optional<SkipReason> drop_reason;
};

// Keeps the pair iff at least one frame projects fully (target and every
// element); the kept pair carries only fully projected frames.
PairProjection project_pair(const SentencePair& pair);

struct ProjectionSummary {
  long long pairs_in = 0;
  long long retained = 0;
  long long dropped = 0;
  long long frames_in = 0;
  long long frames_projected = 0;
  std::map<SkipReason, long long> frame_skips;

  void add(const PairProjection& p);
};

// TSV: pair id, frame name ("*" for pair-level drops), reason.
std::string format_skip_log(const std::vector<PairProjection>& results);

}  // namespace srlproj::project
