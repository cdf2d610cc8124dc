#pragma once

// Seeded synthetic data for tests, the acceptance suite and benchmarks.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "srlproj/aligner.hpp"
#include "srlproj/quality.hpp"
#include "srlproj/types.hpp"

namespace srlproj::testing {

// Projective tree over n tokens with forms w0..w{n-1}; the root is a VERB.
AnnotatedSentence random_projective_tree(std::mt19937_64& rng, int n, const std::string& id = "s");

struct DictionaryCorpus {
  std::vector<align::TokenizedPair> pairs;
  std::vector<Alignment> gold;
};

// Word-for-word translations through a one-to-one dictionary with occasional
// adjacent swaps on the target side. Gold links follow the translation.
DictionaryCorpus dictionary_corpus(std::uint64_t seed, int n_pairs = 1000, int dict_size = 50);

// Random token sequences over small vocabularies.
std::vector<align::TokenizedPair> random_corpus(std::mt19937_64& rng, int n_pairs, int vocab, int max_len);

// A tree self-paired under the identity alignment, with one verbal frame
// whose elements are disjoint subtrees not containing the predicate.
SentencePair identity_pair(std::mt19937_64& rng, int max_tokens, const std::string& id);

// Pairs mixing unaligned and multiply aligned heads, non-verbal LUs,
// non-constituent spans and colliding projections.
std::vector<SentencePair> adversarial_projection_pairs(std::uint64_t seed, int n = 200);

// Linearly separable Good / non-Good examples.
std::vector<quality::LabeledExample> separable_examples(std::mt19937_64& rng, int n);

struct MiniCorpusFiles {
  std::filesystem::path dir;
  std::filesystem::path pairs;
  std::filesystem::path source_conllu;
  std::filesystem::path target_conllu;
  std::filesystem::path frames;
  std::filesystem::path frame_index;
  std::filesystem::path labels;
  std::filesystem::path langid_model;
  std::filesystem::path config;  // key = value file referencing the above
  int n_pairs = 0;
};

// Writes a synthetic English/Hebrew-script parallel corpus with parses,
// source frames, a frame index, curation labels, and a trained language
// identifier into `dir`. out_dir in the config is `<dir>/out`.
MiniCorpusFiles write_mini_corpus(const std::filesystem::path& dir, std::uint64_t seed, int n_pairs = 500);

// <stem>.source.conllu, <stem>.target.conllu, <stem>.frames.jsonl and
// <stem>.pharaoh from `dir`, joined in file order.
std::vector<SentencePair> load_fixture_pairs(const std::filesystem::path& dir, const std::string& stem);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace srlproj::testing
