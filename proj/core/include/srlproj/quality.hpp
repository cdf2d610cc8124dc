#pragma once

// Pair-quality scoring: a structural prefilter, eight shallow features per
// pair, and a logistic classifier trained on human labels that estimates the
// probability that a pair is "Good".

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srlproj/types.hpp"

namespace srlproj::quality {

enum class QualityLabel { SentAlignError, PoorTranslation, WordAlignError, PoorSyntax, PoorFrameParse, Good };

inline constexpr QualityLabel kAllLabels[] = {QualityLabel::SentAlignError, QualityLabel::PoorTranslation,
                                              QualityLabel::WordAlignError, QualityLabel::PoorSyntax,
                                              QualityLabel::PoorFrameParse, QualityLabel::Good};

// The label identifiers used in labels files and the curation API.
const char* to_string(QualityLabel l);
// Human-readable name, e.g. "Error in word alignment".
const char* description(QualityLabel l);
// Accepts the identifier or the human-readable name.
std::optional<QualityLabel> parse_label(std::string_view s);

// Problems of the corpus itself that better tools cannot fix.
constexpr bool dataset_inherent(QualityLabel l) {
  return l == QualityLabel::SentAlignError || l == QualityLabel::PoorTranslation;
}

int tree_depth(const AnnotatedSentence& s);

struct PrefilterOptions {
  int min_tokens = 5;
  int min_depth = 2;
};

// Keeps pairs whose target has at least min_tokens words and depth >= min_depth.
bool structural_prefilter(const SentencePair& pair, const PrefilterOptions& opts = {});

inline constexpr std::size_t kNumFeatures = 8;

struct FeatureVector {
  double len_src = 0;
  double len_tgt = 0;
  double len_ratio = 0;  // len_src / len_tgt
  double n_frames = 0;   // frames on the source sentence
  double n_one_to_one = 0;
  double n_one_to_many = 0;  // source tokens with >= 2 links
  double depth_src = 0;
  double depth_tgt = 0;

  std::array<double, kNumFeatures> values() const;
  static FeatureVector from_values(const std::array<double, kNumFeatures>& v);
  static const std::array<const char*, kNumFeatures>& names();
};

// Throws ConfigError if the target sentence is empty.
FeatureVector extract_features(const SentencePair& pair);

struct LabeledExample {
  FeatureVector features;
  QualityLabel label;
};

struct TrainingOptions {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
  bool resample = true;
  std::uint64_t seed = 13;
};

class LinearClassifier {
 public:
  std::array<double, kNumFeatures> weights{};
  double bias = 0.0;
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> stddev{};
  std::uint64_t seed = 0;

  LinearClassifier() { stddev.fill(1.0); }

  // Standardized affine form w . (x - mean) / stddev + b.
  double margin(const FeatureVector& x) const;
  // Probability of Good; strictly inside (0,1) for finite inputs.
  double score(const FeatureVector& x) const;

  std::string to_json() const;
  static LinearClassifier from_json(std::string_view text);
  void save(const std::string& path) const;
  static LinearClassifier load(const std::string& path);
};

// Logistic regression (Good vs. everything else) by full-batch gradient
// descent on standardized features. With resampling the minority class is
// bootstrap-oversampled to parity using `seed`.
LinearClassifier fit(std::span<const LabeledExample> labeled, const TrainingOptions& opts = {});

double score(const LinearClassifier& model, const FeatureVector& x);

struct ScoredPair {
  std::string id;
  double score = 0.0;
  int target_length = 0;
};

// Keeps pairs with score strictly above tau.
std::vector<ScoredPair> threshold_filter(std::span<const ScoredPair> pairs, double tau = 0.80);

struct HistogramRow {
  double lo = 0.0;
  double hi = 0.0;
  long long count = 0;
  // Pairs scoring strictly above `lo`, and their mean target length.
  long long above_count = 0;
  double above_mean_length = 0.0;
};

// `bin_width` must divide 1. Bins are [lo, hi) except the last, which is
// closed at 1.
std::vector<HistogramRow> score_histogram(std::span<const ScoredPair> pairs, double bin_width = 0.1);
std::string format_histogram_csv(const std::vector<HistogramRow>& rows);

// Labels TSV: pair_id <TAB> label string. Later rows for the same id win;
// ids keep the order of their first appearance.
std::vector<std::pair<std::string, QualityLabel>> read_labels_tsv(std::istream& in);
std::string format_labels_tsv(const std::vector<std::pair<std::string, QualityLabel>>& labels);

}  // namespace srlproj::quality
