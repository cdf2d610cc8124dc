#include "srlproj/tree.hpp"

#include <algorithm>

namespace srlproj {

DependencyTree::DependencyTree(const AnnotatedSentence& s) {
  heads_.reserve(s.tokens.size());
  children_.resize(s.tokens.size());
  for (const Token& t : s.tokens) {
    heads_.push_back(t.head);
    if (t.head == kRoot) {
      root_ = t.index;
    } else {
      children_.at(t.head).push_back(t.index);
    }
  }
}

std::vector<int> DependencyTree::descendants(int i) const {
  std::vector<int> out;
  std::vector<int> stack{i};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (int c : children_.at(u)) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Span> DependencyTree::yield(int i) const {
  std::vector<int> d = descendants(i);
  Span s{d.front(), d.back()};
  if (static_cast<int>(d.size()) != s.width()) return std::nullopt;
  return s;
}

std::optional<int> DependencyTree::span_head(const Span& s) const {
  std::optional<int> found;
  for (int i = s.start; i <= s.end; ++i) {
    const int h = heads_.at(i);
    if (h == kRoot || !s.contains(h)) {
      if (found) return std::nullopt;
      found = i;
    }
  }
  return found;
}

int DependencyTree::depth() const {
  if (root_ == kRoot) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [u, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (int c : children_[u]) stack.emplace_back(c, d + 1);
  }
  return best;
}

std::optional<Span> trim_edge(const Span& s, int token) {
  if (!s.contains(token)) return s;
  if (s.width() == 1) return std::nullopt;
  if (token == s.start) return Span{s.start + 1, s.end};
  if (token == s.end) return Span{s.start, s.end - 1};
  return std::nullopt;
}

}  // namespace srlproj
