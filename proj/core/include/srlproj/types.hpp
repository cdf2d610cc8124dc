#pragma once

// Core data model shared by every stage of the projection pipeline.
//
// All token indices are 0-based. Spans are inclusive on both ends and index
// segmented (syntactic-word) tokens. 1-based external conventions are confined
// to the (de)serializers.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srlproj {

inline constexpr int kRoot = -1;

struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool contains(int i) const { return start <= i && i <= end; }
  bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
  bool overlaps(const Span& o) const { return start <= o.end && o.start <= end; }

  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Token {
  int index = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  int head = kRoot;
  std::string deprel;
  std::string deps;
  std::string misc;

  friend bool operator==(const Token&, const Token&) = default;
};

// A surface token that was segmented into several syntactic words, e.g.
// "babayit" -> be ha bayit.
struct MultiWordSpan {
  int start = 0;
  int end = 0;
  std::string surface;

  Span span() const { return {start, end}; }
  friend bool operator==(const MultiWordSpan&, const MultiWordSpan&) = default;
};

struct FrameElement {
  std::string name;
  Span span;
  bool core = false;

  friend bool operator==(const FrameElement&, const FrameElement&) = default;
};

struct FrameAnnotation {
  std::string frame;
  Span target;
  std::string lu;  // lemma.pos, e.g. "buy.v"
  std::vector<FrameElement> elements;

  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

struct AnnotatedSentence {
  std::string id;
  std::string lang;
  std::vector<Token> tokens;
  std::vector<MultiWordSpan> mwt;
  std::vector<FrameAnnotation> frames;

  int size() const { return static_cast<int>(tokens.size()); }
  bool valid_span(const Span& s) const { return 0 <= s.start && s.start <= s.end && s.end < size(); }

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

// One source->target link; `source` indexes the source (English) side.
struct AlignmentLink {
  int source = 0;
  int target = 0;

  friend auto operator<=>(const AlignmentLink&, const AlignmentLink&) = default;
};

// Sorted, duplicate-free set of links.
using Alignment = std::vector<AlignmentLink>;

// Sort and deduplicate in place.
void normalize(Alignment& a);

enum class PairStatus : std::uint8_t {
  Raw,
  LangFiltered,
  Aligned,
  Projected,
  Scored,
  Thresholded,
  Mapped,
  Dropped,
};

const char* to_string(PairStatus s);

struct SentencePair {
  std::string id;
  AnnotatedSentence source;
  AnnotatedSentence target;
  Alignment alignment;
  std::optional<double> score;
  PairStatus status = PairStatus::Raw;
};

struct PropBankArgument {
  int number = 0;  // k in ARGk
  Span span;

  std::string label() const { return "ARG" + std::to_string(number); }
  friend bool operator==(const PropBankArgument&, const PropBankArgument&) = default;
};

struct PropBankInstance {
  int predicate = 0;
  std::string sense;  // lemma.01
  std::vector<PropBankArgument> args;

  friend bool operator==(const PropBankInstance&, const PropBankInstance&) = default;
};

// Throws ParseError if the token list violates the data-model invariants:
// contiguous indices, heads in range and not self-referential, exactly one
// root, acyclic. Also checks mwt and frame spans.
void validate(const AnnotatedSentence& s);

// Throws ConfigError if any link lies outside the two sentences.
void validate(const SentencePair& p);

}  // namespace srlproj
