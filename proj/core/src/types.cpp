#include "srlproj/types.hpp"

#include <algorithm>
#include <set>

#include "srlproj/error.hpp"

namespace srlproj {

void normalize(Alignment& a) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
}

const char* to_string(PairStatus s) {
  switch (s) {
    case PairStatus::Raw: return "raw";
    case PairStatus::LangFiltered: return "lang-filtered";
    case PairStatus::Aligned: return "aligned";
    case PairStatus::Projected: return "projected";
    case PairStatus::Scored: return "scored";
    case PairStatus::Thresholded: return "thresholded";
    case PairStatus::Mapped: return "mapped";
    case PairStatus::Dropped: return "dropped";
  }
  return "unknown";
}

void validate(const AnnotatedSentence& s) {
  const int n = s.size();
  const std::string where = s.id.empty() ? std::string("sentence") : "sentence " + s.id;
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.index != i) throw ParseError(where + ": token indices are not contiguous");
    if (t.head == kRoot) {
      ++roots;
    } else if (t.head < 0 || t.head >= n) {
      throw ParseError(where + ": head of token " + std::to_string(i) + " out of range");
    } else if (t.head == i) {
      throw ParseError(where + ": token " + std::to_string(i) + " is its own head");
    }
  }
  if (n > 0 && roots != 1) {
    throw ParseError(where + ": expected exactly one root, found " + std::to_string(roots));
  }
  // Acyclic: every walk up the head chain reaches the root within n steps.
  std::vector<char> state(n, 0);  // 0 unseen, 1 on current path, 2 known good
  for (int i = 0; i < n; ++i) {
    std::vector<int> path;
    int u = i;
    while (u != kRoot && state[u] == 0) {
      state[u] = 1;
      path.push_back(u);
      u = s.tokens[u].head;
    }
    if (u != kRoot && state[u] == 1) throw ParseError(where + ": dependency cycle");
    for (int v : path) state[v] = 2;
  }

  Span prev{-1, -1};
  std::vector<MultiWordSpan> mwt = s.mwt;
  std::sort(mwt.begin(), mwt.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  for (const MultiWordSpan& m : mwt) {
    if (!s.valid_span(m.span())) throw ParseError(where + ": multiword span out of range");
    if (m.start <= prev.end) throw ParseError(where + ": overlapping multiword spans");
    prev = m.span();
  }

  for (const FrameAnnotation& f : s.frames) {
    if (!s.valid_span(f.target)) throw ParseError(where + ": frame " + f.frame + " target out of range");
    std::set<std::string> names;
    for (const FrameElement& e : f.elements) {
      if (!s.valid_span(e.span)) {
        throw ParseError(where + ": element " + e.name + " of frame " + f.frame + " out of range");
      }
      if (!names.insert(e.name).second) {
        throw ParseError(where + ": duplicate element " + e.name + " in frame " + f.frame);
      }
    }
  }
}

void validate(const SentencePair& p) {
  for (const AlignmentLink& l : p.alignment) {
    if (l.source < 0 || l.source >= p.source.size() || l.target < 0 || l.target >= p.target.size()) {
      throw ConfigError("pair " + p.id + ": alignment link " + std::to_string(l.source) + "-" +
                        std::to_string(l.target) + " out of range");
    }
  }
  if (p.score && (*p.score < 0.0 || *p.score > 1.0)) {
    throw ConfigError("pair " + p.id + ": score outside [0,1]");
  }
}

}  // namespace srlproj
