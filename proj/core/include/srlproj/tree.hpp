#pragma once

#include <optional>
#include <span>
#include <vector>

#include "srlproj/types.hpp"

namespace srlproj {

// Read-only adjacency view over the head column of a validated sentence.
class DependencyTree {
 public:
  explicit DependencyTree(const AnnotatedSentence& s);

  int size() const { return static_cast<int>(heads_.size()); }
  int root() const { return root_; }
  int head(int i) const { return heads_.at(i); }
  std::span<const int> children(int i) const { return children_.at(i); }

  // Tokens reachable from `i` by child edges, `i` included, ascending.
  std::vector<int> descendants(int i) const;

  // min..max of descendants(i); nullopt when the yield has gaps
  // (non-projective attachment).
  std::optional<Span> yield(int i) const;

  // The unique token of `s` whose head lies outside `s` (or is the root).
  // nullopt when several tokens attach outside the span.
  std::optional<int> span_head(const Span& s) const;

  // Edges on the longest root-to-leaf path; 0 for a single token.
  int depth() const;

 private:
  std::vector<int> heads_;
  std::vector<std::vector<int>> children_;
  int root_ = kRoot;
};

// Removes `token` from `s` when it sits on an edge. Returns `s` unchanged if
// `token` is outside it, nullopt if `token` is interior or `s` is just `token`.
std::optional<Span> trim_edge(const Span& s, int token);

}  // namespace srlproj
