#include "oracles.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace srlproj::oracle {

namespace {

// Calls fn(a) for every a in {0..m-1}^n.
template <class Fn>
void for_each_alignment(std::size_t m, std::size_t n, Fn fn) {
  std::vector<std::size_t> a(n, 0);
  while (true) {
    fn(a);
    std::size_t j = 0;
    while (j < n && ++a[j] == m) a[j++] = 0;
    if (j == n) return;
  }
}

}  // namespace

BruteForceModel1::BruteForceModel1(std::vector<align::TokenizedPair> corpus) : corpus_(std::move(corpus)) {
  std::set<std::string> targets;
  for (const auto& p : corpus_) targets.insert(p.target.begin(), p.target.end());
  init_ = 1.0 / static_cast<double>(targets.size());
}

double BruteForceModel1::t(const std::string& e, const std::string& f) const {
  if (t_.empty()) return init_;
  auto it = t_.find({e, f});
  return it == t_.end() ? 0.0 : it->second;
}

std::vector<std::vector<double>> BruteForceModel1::posteriors(const align::TokenizedPair& pair) const {
  const std::size_t m = pair.source.size();
  const std::size_t n = pair.target.size();
  std::vector<std::vector<double>> post(n, std::vector<double>(m, 0.0));
  double z = 0.0;
  for_each_alignment(m, n, [&](const std::vector<std::size_t>& a) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j) p *= t(pair.source[a[j]], pair.target[j]) / static_cast<double>(m);
    z += p;
    for (std::size_t j = 0; j < n; ++j) post[j][a[j]] += p;
  });
  for (auto& row : post) {
    for (double& v : row) v /= z;
  }
  return post;
}

void BruteForceModel1::iterate() {
  std::map<std::pair<std::string, std::string>, double> counts;
  std::map<std::string, double> totals;
  for (const auto& pair : corpus_) {
    const auto post = posteriors(pair);
    for (std::size_t j = 0; j < pair.target.size(); ++j) {
      for (std::size_t i = 0; i < pair.source.size(); ++i) {
        counts[{pair.source[i], pair.target[j]}] += post[j][i];
        totals[pair.source[i]] += post[j][i];
      }
    }
  }
  t_.clear();
  for (const auto& [key, c] : counts) t_[key] = c / totals[key.first];
}

double BruteForceModel1::log_likelihood() const {
  double ll = 0.0;
  for (const auto& pair : corpus_) {
    double z = 0.0;
    for_each_alignment(pair.source.size(), pair.target.size(), [&](const std::vector<std::size_t>& a) {
      double p = 1.0;
      for (std::size_t j = 0; j < pair.target.size(); ++j) {
        p *= t(pair.source[a[j]], pair.target[j]) / static_cast<double>(pair.source.size());
      }
      z += p;
    });
    ll += std::log(z);
  }
  return ll;
}

// ------------------------------------------------------------------ projection

namespace {

bool dominates(const AnnotatedSentence& s, int ancestor, int k) {
  for (int u = k; u != kRoot; u = s.tokens[u].head) {
    if (u == ancestor) return true;
  }
  return false;
}

// The unique token of [a,b] whose head lies outside [a,b], or -1.
int head_of(const AnnotatedSentence& s, int a, int b) {
  if (a < 0 || b >= s.size() || a > b) return -1;
  int found = -1;
  int count = 0;
  for (int i = a; i <= b; ++i) {
    const int h = s.tokens[i].head;
    if (h < a || h > b) {
      found = i;
      ++count;
    }
  }
  return count == 1 ? found : -1;
}

// Contiguous yield of token h as [lo,hi], or {-1,-1}.
std::pair<int, int> yield_of(const AnnotatedSentence& s, int h) {
  int lo = s.size(), hi = -1, count = 0;
  for (int k = 0; k < s.size(); ++k) {
    if (dominates(s, h, k)) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
      ++count;
    }
  }
  if (count != hi - lo + 1) return {-1, -1};
  return {lo, hi};
}

std::set<int> targets_of(const SentencePair& p, int i) {
  std::set<int> out;
  for (const AlignmentLink& l : p.alignment) {
    if (l.source == i) out.insert(l.target);
  }
  return out;
}

}  // namespace

PairResult project(const SentencePair& pair) {
  PairResult result;
  const AnnotatedSentence& src = pair.source;
  const AnnotatedSentence& tgt = pair.target;
  for (const FrameAnnotation& f : src.frames) {
    FrameResult fr;
    auto skip = [&](const char* why) { fr.outcome = std::string(why); };

    bool verbal;
    const auto dot = f.lu.rfind('.');
    if (dot != std::string::npos && dot + 1 < f.lu.size()) {
      verbal = f.lu.substr(dot + 1) == "v";
    } else {
      const int h = head_of(src, f.target.start, f.target.end);
      verbal = h >= 0 && src.tokens[h].upos == "VERB";
    }
    if (!verbal) {
      skip("NonVerbalLU");
      result.frames.push_back(fr);
      continue;
    }

    // 0: ok, otherwise the skip reason.
    auto anchor = [&](const Span& span, int& out) -> const char* {
      const int h = head_of(src, span.start, span.end);
      if (h < 0) return "SubtreeConflict";
      const std::set<int> t = targets_of(pair, h);
      if (t.empty()) return "HeadUnaligned";
      if (t.size() > 1) return "HeadMultiAligned";
      out = *t.begin();
      return nullptr;
    };

    int pred = -1;
    if (const char* why = anchor(f.target, pred)) {
      skip(why);
      result.frames.push_back(fr);
      continue;
    }
    FrameAnnotation projected{f.frame, {pred, pred}, f.lu, {}};
    const char* failure = nullptr;
    for (const FrameElement& e : f.elements) {
      int a = -1;
      if ((failure = anchor(e.span, a))) break;
      auto [lo, hi] = yield_of(tgt, a);
      if (lo < 0) {
        failure = "SubtreeConflict";
        break;
      }
      if (lo <= pred && pred <= hi) {
        if (lo == hi) {
          failure = "SubtreeConflict";
          break;
        }
        if (pred == lo) {
          ++lo;
        } else if (pred == hi) {
          --hi;
        } else {
          failure = "SubtreeConflict";
          break;
        }
      }
      projected.elements.push_back({e.name, {lo, hi}, e.core});
    }
    if (!failure) {
      for (std::size_t x = 0; x < projected.elements.size() && !failure; ++x) {
        for (std::size_t y = x + 1; y < projected.elements.size(); ++y) {
          const Span& p = projected.elements[x].span;
          const Span& q = projected.elements[y].span;
          if (!(p.end < q.start || q.end < p.start)) {
            failure = "SubtreeConflict";
            break;
          }
        }
      }
    }
    if (failure) {
      skip(failure);
    } else {
      fr.outcome = projected;
      result.retained = true;
    }
    result.frames.push_back(fr);
  }
  if (!result.retained) result.drop_reason = "EmptyProjection";
  return result;
}

// ----------------------------------------------------------------- recounting

CorpusCounts recount_conllu(std::string_view text) {
  CorpusCounts c;
  std::set<std::string> seg_types, unseg_types;
  std::istringstream in{std::string(text)};
  std::string line;
  bool in_sentence = false;
  int skip_until = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      in_sentence = false;
      skip_until = 0;
      continue;
    }
    if (line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string col; std::getline(ls, col, '\t');) cols.push_back(col);
    const std::string& id = cols[0];
    if (id.find('.') != std::string::npos) continue;
    if (!in_sentence) {
      ++c.sentences;
      in_sentence = true;
    }
    const auto dash = id.find('-');
    if (dash != std::string::npos) {
      ++c.tokens_unseg;
      unseg_types.insert(cols[1]);
      skip_until = std::stoi(id.substr(dash + 1));
      continue;
    }
    ++c.tokens_seg;
    seg_types.insert(cols[1]);
    if (std::stoi(id) > skip_until) {
      ++c.tokens_unseg;
      unseg_types.insert(cols[1]);
    }
  }
  c.types_seg = static_cast<long long>(seg_types.size());
  c.types_unseg = static_cast<long long>(unseg_types.size());
  return c;
}

LinkCounts recount_links(const std::vector<align::TokenizedPair>& pairs, const std::vector<Alignment>& links) {
  LinkCounts c;
  std::set<std::pair<std::string, std::string>> types;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    std::set<std::pair<int, int>> uniq;
    for (const AlignmentLink& l : links[k]) uniq.insert({l.source, l.target});
    for (const auto& [s, t] : uniq) {
      ++c.total;
      int sdeg = 0, tdeg = 0;
      for (const auto& [s2, t2] : uniq) {
        sdeg += s2 == s;
        tdeg += t2 == t;
      }
      if (sdeg == 1 && tdeg == 1) ++c.one_to_one;
      if (sdeg >= 2) ++c.many_links;
      types.insert({pairs[k].source[s], pairs[k].target[t]});
    }
    for (int s = 0; s < static_cast<int>(pairs[k].source.size()); ++s) {
      int deg = 0;
      for (const auto& [s2, t2] : uniq) deg += s2 == s;
      if (deg > 0) ++c.aligned_sources;
      if (deg >= 2) ++c.one_to_many_sources;
    }
  }
  c.distinct_pairs = static_cast<long long>(types.size());
  return c;
}

}  // namespace srlproj::oracle
