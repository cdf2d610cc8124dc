#pragma once

// Directional word aligner with the diagonal-favouring reparameterization of
// IBM Model 2 (as in fast_align).
//
// Each target token f_j chooses one source position a_j in {0 (null), 1..m}:
//   p(a_j = 0)        = p_null
//   p(a_j = i), i > 0 = (1 - p_null) * exp(-lambda |i/m - j/n|) / Z_j
// and is emitted with probability t(f_j | e_{a_j}). Rows of t are normalized
// per source word. With lambda = 0 and p_null = 0 this is IBM Model 1.

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "srlproj/types.hpp"

namespace srlproj::align {

struct TokenizedPair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

struct AlignerOptions {
  int iterations = 5;
  double lambda = 4.0;
  double p_null = 0.08;
  bool optimize_lambda = false;
  double prune = 1e-7;
  unsigned workers = 1;
};

void validate(const AlignerOptions& opts);

class AlignmentModel {
 public:
  static constexpr int kNull = 0;

  double lambda() const { return lambda_; }
  double p_null() const { return p_null_; }

  // t(target | source); 0 for unknown words or pruned entries.
  double t(const std::string& source, const std::string& target) const;
  double t_null(const std::string& target) const;

  // Sum of the t row of `source` (1 after every M-step).
  double row_sum(const std::string& source) const;
  std::vector<std::string> source_words() const;
  std::size_t entries() const;

  int source_id(const std::string& w) const;  // -1 if unknown
  int target_id(const std::string& w) const;  // -1 if unknown
  double t_by_id(int source, int target) const;

  std::string to_json() const;
  static AlignmentModel from_json(std::string_view text);
  void save(const std::string& path) const;
  static AlignmentModel load(const std::string& path);

 private:
  friend class Trainer;

  double lambda_ = 4.0;
  double p_null_ = 0.08;
  std::unordered_map<std::string, int> source_ids_;  // ids start at 1
  std::unordered_map<std::string, int> target_ids_;  // ids start at 0
  std::vector<std::string> source_words_;            // [0] is the null word
  std::vector<std::string> target_words_;
  std::vector<std::unordered_map<int, double>> rows_;
};

// exp(-lambda |i/m - j/n|) for 1-based positions. Throws ConfigError on
// out-of-range arguments.
double diagonal_prior(int i, int j, int m, int n, double lambda);

struct TrainingTrace {
  // Corpus log-likelihood under the parameters entering each iteration.
  std::vector<double> log_likelihood;
  std::vector<double> lambda;
};

AlignmentModel em_train(std::span<const TokenizedPair> corpus, const AlignerOptions& opts = {},
                        TrainingTrace* trace = nullptr);

// Corpus log-likelihood under `model`.
double log_likelihood(const AlignmentModel& model, std::span<const TokenizedPair> corpus);

// posterior[j][i]: probability that target j links to source i-1, with i = 0
// standing for null. Rows sum to 1 unless every option has zero mass.
std::vector<std::vector<double>> link_posteriors(const AlignmentModel& model, const TokenizedPair& pair);

// Per target token, the most probable source position; null links omitted.
// Ties go to null, then to the smaller source position.
Alignment viterbi_decode(const AlignmentModel& model, const TokenizedPair& pair);

std::vector<Alignment> viterbi_decode_all(const AlignmentModel& model, std::span<const TokenizedPair> corpus,
                                          unsigned workers = 1);

struct AlignmentStats {
  long long total_links = 0;
  long long one_to_one = 0;          // links whose source and target both have degree 1
  long long one_to_many = 0;         // source tokens with >= 2 links
  long long many_covered_links = 0;  // links of those source tokens
  long long other_links = 0;         // remainder: degree-1 source, shared target
  long long aligned_sources = 0;
  long long distinct_pairs = 0;      // distinct (source word, target word) types
  double mean_targets_per_aligned_source = 0.0;
};

AlignmentStats alignment_stats(std::span<const TokenizedPair> pairs, std::span<const Alignment> alignments);

// 1 - 2|A ∩ G| / (|A| + |G|), pooled over the corpus (sure = possible = gold).
double alignment_error_rate(std::span<const Alignment> predicted, std::span<const Alignment> gold);

}  // namespace srlproj::align
