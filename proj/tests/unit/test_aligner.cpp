#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "srlproj/aligner.hpp"
#include "srlproj/error.hpp"

using namespace srlproj;
using namespace srlproj::align;

namespace {

TokenizedPair tp(std::vector<std::string> s, std::vector<std::string> t) { return {std::move(s), std::move(t)}; }

AlignerOptions model1(int iterations) {
  AlignerOptions o;
  o.iterations = iterations;
  o.lambda = 0.0;
  o.p_null = 0.0;
  o.prune = 0.0;
  return o;
}

}  // namespace

TEST_CASE("diagonal_prior") {
  CHECK(diagonal_prior(1, 1, 2, 2, 4.0) == 1.0);
  CHECK(diagonal_prior(2, 4, 3, 6, 7.5) == doctest::Approx(std::exp(-7.5 * std::abs(2.0 / 3 - 4.0 / 6))));
  for (int j = 1; j <= 5; ++j) CHECK(diagonal_prior(1, j, 3, 5, 0.0) == 1.0);
  CHECK(diagonal_prior(1, 2, 2, 2, 4.0) == doctest::Approx(0.1353352832366127).epsilon(1e-12));
  CHECK_THROWS_AS(diagonal_prior(0, 1, 2, 2, 1.0), ConfigError);
  CHECK_THROWS_AS(diagonal_prior(1, 3, 2, 2, 1.0), ConfigError);
  CHECK_THROWS_AS(diagonal_prior(1, 1, 2, 2, -1.0), ConfigError);
}

TEST_CASE("options are validated") {
  AlignerOptions o;
  o.iterations = 0;
  CHECK_THROWS_AS(validate(o), ConfigError);
  o = {};
  o.p_null = 1.0;
  CHECK_THROWS_AS(validate(o), ConfigError);
  std::vector<TokenizedPair> empty;
  CHECK_THROWS_AS(em_train(empty), ConfigError);
}

TEST_CASE("single candidate gets all the mass in one iteration") {
  std::vector<TokenizedPair> corpus(10, tp({"dog"}, {"kelev"}));
  AlignerOptions o;
  o.iterations = 1;
  const AlignmentModel m = em_train(corpus, o);
  CHECK(m.t("dog", "kelev") == 1.0);
  CHECK(m.t("dog", "other") == 0.0);
}

TEST_CASE("two-sentence corpus agrees with brute-force Model 1") {
  std::vector<TokenizedPair> corpus = {tp({"the", "dog"}, {"ha", "kelev"}), tp({"the", "cat"}, {"ha", "khatul"})};
  const AlignmentModel m = em_train(corpus, model1(5));
  CHECK(m.t("the", "ha") > m.t("the", "kelev"));

  oracle::BruteForceModel1 oracle(corpus);
  for (int k = 0; k < 5; ++k) oracle.iterate();
  for (const auto& pair : corpus) {
    const auto got = link_posteriors(m, pair);
    const auto want = oracle.posteriors(pair);
    for (std::size_t j = 0; j < want.size(); ++j) {
      for (std::size_t i = 0; i < want[j].size(); ++i) CHECK(got[j][i + 1] == doctest::Approx(want[j][i]).epsilon(1e-9));
    }
  }
  CHECK(viterbi_decode(m, corpus[0]) == Alignment{{0, 0}, {1, 1}});
  CHECK(viterbi_decode(m, corpus[1]) == Alignment{{0, 0}, {1, 1}});
}

TEST_CASE("Model 1 posteriors match enumeration on random 3-token corpora") {
  std::mt19937_64 rng(77);
  for (int c = 0; c < 10; ++c) {
    std::vector<TokenizedPair> corpus;
    for (int k = 0; k < 4; ++k) {
      TokenizedPair p;
      for (int i = 0; i < 3; ++i) p.source.push_back("s" + std::to_string(rng() % 4));
      for (int j = 0; j < 3; ++j) p.target.push_back("t" + std::to_string(rng() % 4));
      corpus.push_back(p);
    }
    TrainingTrace trace;
    const AlignmentModel m = em_train(corpus, model1(4), &trace);
    oracle::BruteForceModel1 oracle(corpus);
    for (int k = 0; k < 4; ++k) {
      CHECK(trace.log_likelihood[k] == doctest::Approx(oracle.log_likelihood()).epsilon(1e-9));
      oracle.iterate();
    }
    for (const auto& pair : corpus) {
      const auto got = link_posteriors(m, pair);
      const auto want = oracle.posteriors(pair);
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(got[j][0] == 0.0);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[j][i + 1] - want[j][i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("fixed-lambda log-likelihood never decreases") {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 25; ++c) {
    const auto corpus = testing::random_corpus(rng, 30, 8, 6);
    AlignerOptions o;
    o.iterations = 10;
    o.lambda = 0.5 * static_cast<double>(c % 9);
    o.prune = 0.0;
    TrainingTrace trace;
    const AlignmentModel m = em_train(corpus, o, &trace);
    REQUIRE(trace.log_likelihood.size() == 10);
    for (std::size_t k = 1; k < trace.log_likelihood.size(); ++k) {
      const double prev = trace.log_likelihood[k - 1];
      CHECK(trace.log_likelihood[k] >= prev - 1e-9 * std::abs(prev));
    }
    CHECK(log_likelihood(m, corpus) >= trace.log_likelihood.back() - 1e-9 * std::abs(trace.log_likelihood.back()));
  }
}

TEST_CASE("rows of t sum to one") {
  std::mt19937_64 rng(8);
  const auto corpus = testing::random_corpus(rng, 40, 10, 7);
  for (int iters : {1, 2, 5}) {
    AlignerOptions o;
    o.iterations = iters;
    const AlignmentModel m = em_train(corpus, o);
    for (const auto& w : m.source_words()) CHECK(m.row_sum(w) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("uniform table and a sharp prior decode the diagonal") {
  std::vector<TokenizedPair> corpus = {tp({"a", "b", "c", "d"}, {"w", "x", "y", "z"})};
  AlignerOptions o;
  o.iterations = 1;
  o.lambda = 50.0;
  o.p_null = 0.0;
  const AlignmentModel m = em_train(corpus, o);
  CHECK(viterbi_decode(m, corpus[0]) == Alignment{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
}

TEST_CASE("words the model never saw stay unaligned") {
  std::vector<TokenizedPair> corpus(5, tp({"dog"}, {"kelev"}));
  const AlignmentModel m = em_train(corpus);
  CHECK(viterbi_decode(m, tp({"dog", "cat"}, {"kelev", "khatul"})) == Alignment{{0, 0}});
  CHECK(viterbi_decode(m, tp({}, {"kelev"})).empty());
}

TEST_CASE("target words explained only by null are not linked") {
  // "um" appears with many different source words, so null explains it best.
  std::vector<TokenizedPair> corpus;
  for (int k = 0; k < 30; ++k) corpus.push_back(tp({"w" + std::to_string(k)}, {"v" + std::to_string(k), "um"}));
  AlignerOptions o;
  o.p_null = 0.5;
  o.iterations = 10;
  const AlignmentModel m = em_train(corpus, o);
  const Alignment a = viterbi_decode(m, corpus[3]);
  CHECK(a == Alignment{{0, 0}});
}

TEST_CASE("decoding and training are independent of the worker count") {
  const auto dict = testing::dictionary_corpus(4, 3000, 50);
  AlignerOptions one, many;
  many.workers = 4;
  const AlignmentModel a = em_train(dict.pairs, one);
  const AlignmentModel b = em_train(dict.pairs, many);
  CHECK(a.to_json() == b.to_json());
  CHECK(viterbi_decode_all(a, dict.pairs, 1) == viterbi_decode_all(a, dict.pairs, 4));
}

TEST_CASE("dictionary corpus reaches low AER") {
  const auto dict = testing::dictionary_corpus(1, 1000, 50);
  const AlignmentModel m = em_train(dict.pairs);
  const double aer = alignment_error_rate(viterbi_decode_all(m, dict.pairs), dict.gold);
  CHECK(aer <= 0.10);
}

TEST_CASE("lambda optimisation stays in range and improves a bad start") {
  const auto dict = testing::dictionary_corpus(2, 500, 30);
  AlignerOptions o;
  o.lambda = 0.0;
  o.optimize_lambda = true;
  TrainingTrace trace;
  const AlignmentModel m = em_train(dict.pairs, o, &trace);
  CHECK(m.lambda() > 0.0);
  CHECK(std::isfinite(m.lambda()));
}

TEST_CASE("model json round trip") {
  const auto dict = testing::dictionary_corpus(3, 100, 20);
  const AlignmentModel m = em_train(dict.pairs);
  const AlignmentModel back = AlignmentModel::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
  CHECK(viterbi_decode_all(back, dict.pairs) == viterbi_decode_all(m, dict.pairs));
  CHECK_THROWS_AS(AlignmentModel::from_json("[]"), ParseError);
}

TEST_CASE("alignment_stats") {
  std::vector<TokenizedPair> pairs = {tp({"a", "b"}, {"x", "y"})};
  std::vector<Alignment> links = {{{0, 0}, {1, 1}}};
  auto s = alignment_stats(pairs, links);
  CHECK(s.one_to_one == 2);
  CHECK(s.one_to_many == 0);

  links = {{{0, 0}, {0, 1}}};
  s = alignment_stats(pairs, links);
  CHECK(s.one_to_many == 1);
  CHECK(s.many_covered_links == 2);
  CHECK(s.mean_targets_per_aligned_source == 2.0);

  std::mt19937_64 rng(200);
  const auto corpus = testing::random_corpus(rng, 200, 6, 8);
  const AlignmentModel m = em_train(corpus);
  const auto decoded = viterbi_decode_all(m, corpus);
  s = alignment_stats(corpus, decoded);
  const auto want = oracle::recount_links(corpus, decoded);
  CHECK(s.total_links == want.total);
  CHECK(s.one_to_one == want.one_to_one);
  CHECK(s.one_to_many == want.one_to_many_sources);
  CHECK(s.many_covered_links == want.many_links);
  CHECK(s.aligned_sources == want.aligned_sources);
  CHECK(s.distinct_pairs == want.distinct_pairs);
  CHECK(s.one_to_one + s.many_covered_links + s.other_links == s.total_links);
}

TEST_CASE("alignment_error_rate") {
  std::vector<Alignment> gold = {{{0, 0}, {1, 1}}};
  CHECK(alignment_error_rate(gold, gold) == 0.0);
  std::vector<Alignment> half = {{{0, 0}, {1, 0}}};
  CHECK(alignment_error_rate(half, gold) == doctest::Approx(0.5));
  std::vector<Alignment> none = {{}};
  CHECK(alignment_error_rate(none, gold) == 1.0);
}
