#pragma once

// Deliberately naive re-implementations used to cross-check the library.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "srlproj/aligner.hpp"
#include "srlproj/types.hpp"

namespace srlproj::oracle {

// IBM Model 1 without a null word, trained by enumerating every alignment of
// every pair. Initial t is uniform over the target vocabulary.
class BruteForceModel1 {
 public:
  explicit BruteForceModel1(std::vector<align::TokenizedPair> corpus);
  void iterate();
  // posterior[j][i] = P(a_j = i | pair)
  std::vector<std::vector<double>> posteriors(const align::TokenizedPair& pair) const;
  double log_likelihood() const;

 private:
  double t(const std::string& e, const std::string& f) const;
  std::vector<align::TokenizedPair> corpus_;
  std::map<std::pair<std::string, std::string>, double> t_;
  double init_ = 0.0;
};

struct FrameResult {
  std::variant<FrameAnnotation, std::string> outcome;  // projected frame or skip reason name
};

struct PairResult {
  bool retained = false;
  std::vector<FrameResult> frames;
  std::string drop_reason;  // empty when retained
};

PairResult project(const SentencePair& pair);

struct CorpusCounts {
  long long sentences = 0;
  long long tokens_seg = 0;
  long long types_seg = 0;
  long long tokens_unseg = 0;
  long long types_unseg = 0;
};

// Counts straight from CoNLL-U text, without the library parser.
CorpusCounts recount_conllu(std::string_view text);

struct LinkCounts {
  long long total = 0;
  long long one_to_one = 0;
  long long one_to_many_sources = 0;
  long long many_links = 0;
  long long aligned_sources = 0;
  long long distinct_pairs = 0;
};

LinkCounts recount_links(const std::vector<align::TokenizedPair>& pairs, const std::vector<Alignment>& links);

}  // namespace srlproj::oracle
