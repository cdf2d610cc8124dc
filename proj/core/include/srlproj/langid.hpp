#pragma once

// Subtitle noise stripping and character n-gram language identification,
// used to keep only pairs whose two sides are in the expected languages.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srlproj/io.hpp"

namespace srlproj::langid {

// Drops musical-note symbols, control and invisible formatting characters and
// `<...>` subtitle tags, then collapses whitespace runs and trims. Total and
// idempotent.
std::string clean_text(std::string_view s);

struct Detection {
  std::string language;
  double posterior = 0.0;
};

// Anything that can label a cleaned string with a language.
class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  // Throws ConfigError on an empty string.
  virtual Detection detect(std::string_view cleaned) const = 0;
  // Posterior of `language` for `cleaned`; 0 if the detector does not know it.
  virtual double posterior(std::string_view cleaned, std::string_view language) const = 0;
};

// Multinomial naive Bayes over character n-grams with add-one smoothing.
//
// The sequence B^(n-1) s E is scanned with a window of n code points; windows
// made only of padding are ignored. N-grams never seen in training carry no
// evidence and are skipped, so a string made of unseen characters gets the
// class priors as its posterior.
class LangIdModel final : public LanguageDetector {
 public:
  static constexpr char32_t kBegin = U'\u0002';
  static constexpr char32_t kEnd = U'\u0003';

  LangIdModel() = default;

  Detection detect(std::string_view cleaned) const override;
  double posterior(std::string_view cleaned, std::string_view language) const override;

  // Posteriors for every language, in languages() order.
  std::vector<double> posteriors(std::string_view cleaned) const;

  int order() const { return order_; }
  const std::vector<std::string>& languages() const { return languages_; }
  const std::vector<double>& log_priors() const { return log_priors_; }
  // Per-language log probabilities of `ngram`, or nullptr if unseen.
  const std::vector<double>* log_probs(const std::u32string& ngram) const;
  std::size_t vocabulary_size() const { return loglik_.size(); }

  std::string to_json() const;
  static LangIdModel from_json(std::string_view text);
  void save(const std::string& path) const;
  static LangIdModel load(const std::string& path);

 private:
  friend LangIdModel train_langid(const std::map<std::string, std::vector<std::string>>& corpora, int order);

  int order_ = 3;
  std::vector<std::string> languages_;
  std::vector<double> log_priors_;
  std::unordered_map<std::u32string, std::vector<double>> loglik_;
};

// Requires at least two languages with at least 100 lines each.
LangIdModel train_langid(const std::map<std::string, std::vector<std::string>>& corpora, int order = 3);

// The n-grams scored for `cleaned` (lowercased ASCII, padded), in order.
std::vector<std::u32string> extract_ngrams(std::string_view cleaned, int order);

Detection detect(const LanguageDetector& model, std::string_view cleaned);

// Detector backed by a fixed text -> language table, for corpora that were
// labelled by an external tool.
class LabelTableDetector final : public LanguageDetector {
 public:
  explicit LabelTableDetector(std::unordered_map<std::string, std::string> labels) : labels_(std::move(labels)) {}
  Detection detect(std::string_view cleaned) const override;
  double posterior(std::string_view cleaned, std::string_view language) const override;

 private:
  std::unordered_map<std::string, std::string> labels_;
};

enum class RejectReason { EmptySource, EmptyTarget, SourceLanguage, TargetLanguage };

const char* to_string(RejectReason r);

struct Rejection {
  std::string pair_id;
  RejectReason reason;
  Detection detected;  // of the failing side; empty for the Empty* reasons
};

struct FilterOptions {
  std::string source_lang = "en";
  std::string target_lang = "he";
  double tau = 0.5;
  unsigned workers = 1;
};

struct FilterResult {
  std::vector<io::RawPair> kept;  // text already cleaned
  std::vector<Rejection> rejected;
};

// Keeps a pair iff the cleaned source side is detected as the source language
// and the cleaned target side as the target language, each as the argmax with
// posterior >= tau. Every rejected pair carries exactly one reason, checked in
// RejectReason order.
FilterResult filter_pairs(const LanguageDetector& model, const std::vector<io::RawPair>& pairs,
                          const FilterOptions& opts = {});

}  // namespace srlproj::langid
