#include "srlproj/projector.hpp"

#include <algorithm>

#include "srlproj/error.hpp"

namespace srlproj::project {

const char* to_string(SkipReason r) {
  switch (r) {
    case SkipReason::NonVerbalLU: return "NonVerbalLU";
    case SkipReason::HeadUnaligned: return "HeadUnaligned";
    case SkipReason::HeadMultiAligned: return "HeadMultiAligned";
    case SkipReason::SubtreeConflict: return "SubtreeConflict";
    case SkipReason::EmptyProjection: return "EmptyProjection";
  }
  return "Unknown";
}

std::optional<SkipReason> parse_skip_reason(std::string_view s) {
  for (SkipReason r : kAllSkipReasons) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

std::optional<int> span_head(const AnnotatedSentence& sentence, const Span& span) {
  if (!sentence.valid_span(span)) throw ConfigError("span_head: span out of range in " + sentence.id);
  return DependencyTree(sentence).span_head(span);
}

std::optional<Span> subtree_yield(const AnnotatedSentence& sentence, int token) {
  if (token < 0 || token >= sentence.size()) throw ConfigError("subtree_yield: token out of range in " + sentence.id);
  return DependencyTree(sentence).yield(token);
}

bool is_verbal(const FrameAnnotation& frame, const AnnotatedSentence& source) {
  const auto dot = frame.lu.rfind('.');
  if (dot != std::string::npos && dot + 1 < frame.lu.size()) return frame.lu.substr(dot + 1) == "v";
  if (!source.valid_span(frame.target)) return false;
  auto head = DependencyTree(source).span_head(frame.target);
  return head && source.tokens[*head].upos == "VERB";
}

PairProjector::PairProjector(const SentencePair& pair)
    : pair_(pair), source_tree_(pair.source), target_tree_(pair.target), links_(pair.source.tokens.size()) {
  for (const AlignmentLink& l : pair.alignment) {
    if (l.source < 0 || l.source >= pair.source.size() || l.target < 0 || l.target >= pair.target.size()) {
      throw ConfigError("pair " + pair.id + ": alignment link out of range");
    }
    auto& v = links_[l.source];
    if (std::find(v.begin(), v.end(), l.target) == v.end()) v.push_back(l.target);
  }
}

FrameOutcome PairProjector::project(const FrameAnnotation& frame, int frame_index) const {
  if (!is_verbal(frame, pair_.source)) return SkipReason::NonVerbalLU;

  // Aligned target token of the head of a source span, or the skip reason.
  auto follow = [&](const Span& span) -> std::variant<int, SkipReason> {
    if (!pair_.source.valid_span(span)) return SkipReason::SubtreeConflict;
    auto head = source_tree_.span_head(span);
    if (!head) return SkipReason::SubtreeConflict;
    const auto& aligned = links(*head);
    if (aligned.empty()) return SkipReason::HeadUnaligned;
    if (aligned.size() > 1) return SkipReason::HeadMultiAligned;
    return aligned.front();
  };

  auto pred = follow(frame.target);
  if (auto* r = std::get_if<SkipReason>(&pred)) return *r;
  const int predicate = std::get<int>(pred);

  ProjectedFrame out;
  out.frame_name = frame.frame;
  out.lu = frame.lu;
  out.target_span = {predicate, predicate};
  out.source_frame = frame_index;

  for (const FrameElement& fe : frame.elements) {
    auto anchor = follow(fe.span);
    if (auto* r = std::get_if<SkipReason>(&anchor)) return *r;
    auto yield = target_tree_.yield(std::get<int>(anchor));
    if (!yield) return SkipReason::SubtreeConflict;
    // The predicate may hang below an argument (e.g. relative clauses); it is
    // cut off when it sits on the edge of the yield.
    auto span = trim_edge(*yield, predicate);
    if (!span) return SkipReason::SubtreeConflict;
    out.elements.push_back({fe.name, *span, fe.core});
  }

  for (std::size_t a = 0; a < out.elements.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (out.elements[a].span.overlaps(out.elements[b].span)) return SkipReason::SubtreeConflict;
    }
  }
  return out;
}

FrameOutcome project_frame(const SentencePair& pair, const FrameAnnotation& frame) {
  return PairProjector(pair).project(frame);
}

PairProjection project_pair(const SentencePair& pair) {
  PairProjection result;
  result.pair = pair;
  result.pair.target.frames.clear();

  if (pair.source.frames.empty()) {
    result.drop_reason = SkipReason::EmptyProjection;
    result.pair.status = PairStatus::Dropped;
    return result;
  }

  PairProjector projector(pair);
  for (std::size_t k = 0; k < pair.source.frames.size(); ++k) {
    const FrameAnnotation& frame = pair.source.frames[k];
    FrameOutcome outcome = projector.project(frame, static_cast<int>(k));
    if (auto* pf = std::get_if<ProjectedFrame>(&outcome)) {
      result.pair.target.frames.push_back(pf->annotation());
      result.frames.push_back(std::move(*pf));
    } else {
      result.skips.push_back({pair.id, static_cast<int>(k), frame.frame, std::get<SkipReason>(outcome)});
    }
  }
  result.retained = !result.frames.empty();
  if (result.retained) {
    result.pair.status = PairStatus::Projected;
  } else {
    result.drop_reason = SkipReason::EmptyProjection;
    result.pair.status = PairStatus::Dropped;
  }
  return result;
}

void ProjectionSummary::add(const PairProjection& p) {
  ++pairs_in;
  if (p.retained) {
    ++retained;
  } else {
    ++dropped;
  }
  frames_in += static_cast<long long>(p.frames.size() + p.skips.size());
  frames_projected += static_cast<long long>(p.frames.size());
  for (const FrameSkip& s : p.skips) ++frame_skips[s.reason];
}

std::string format_skip_log(const std::vector<PairProjection>& results) {
  std::string out;
  for (const PairProjection& r : results) {
    for (const FrameSkip& s : r.skips) {
      out += s.pair_id + '\t' + s.frame + '\t' + to_string(s.reason) + '\n';
    }
    if (r.drop_reason) out += r.pair.id + "\t*\t" + to_string(*r.drop_reason) + '\n';
  }
  return out;
}

}  // namespace srlproj::project
