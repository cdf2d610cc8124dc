#include "srlproj/langid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "srlproj/error.hpp"
#include "srlproj/parallel.hpp"
#include "srlproj/utf8.hpp"

namespace srlproj::langid {

namespace {

bool is_music(char32_t c) { return (c >= 0x2669 && c <= 0x266F) || (c >= 0x1D100 && c <= 0x1D1FF); }

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_invisible(char32_t c) {
  return c < 0x20 || (c >= 0x7F && c <= 0x9F) || c == 0xAD || (c >= 0x200B && c <= 0x200F) ||
         (c >= 0x202A && c <= 0x202E) || (c >= 0x2060 && c <= 0x2064) || (c >= 0x2066 && c <= 0x2069) ||
         c == 0xFEFF || c == 0xFFFD;
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

std::string clean_text(std::string_view s) {
  std::u32string cps = utf8::decode_lossy(s);

  std::u32string kept;
  kept.reserve(cps.size());
  for (char32_t c : cps) {
    if (is_space(c)) {
      kept.push_back(U' ');
    } else if (!is_music(c) && !is_invisible(c)) {
      kept.push_back(c);
    }
  }

  std::u32string untagged;
  untagged.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] == U'<') {
      const std::size_t close = kept.find(U'>', i + 1);
      if (close != std::u32string::npos) {
        untagged.push_back(U' ');
        i = close;
        continue;
      }
    }
    untagged.push_back(kept[i]);
  }

  std::u32string out;
  out.reserve(untagged.size());
  for (char32_t c : untagged) {
    if (c == U' ' && (out.empty() || out.back() == U' ')) continue;
    out.push_back(c);
  }
  if (!out.empty() && out.back() == U' ') out.pop_back();
  return utf8::encode(out);
}

std::vector<std::u32string> extract_ngrams(std::string_view cleaned, int order) {
  std::u32string seq(static_cast<std::size_t>(order - 1), LangIdModel::kBegin);
  seq += utf8::decode_lossy(utf8::to_lower_ascii(cleaned));
  const std::size_t real_end = seq.size();
  seq.push_back(LangIdModel::kEnd);

  std::vector<std::u32string> out;
  const std::size_t first_real = static_cast<std::size_t>(order - 1);
  if (real_end == first_real) return out;
  for (std::size_t i = 0; i + order <= seq.size(); ++i) {
    // Window [i, i+order) must contain a real character.
    if (i + order <= first_real || i >= real_end) continue;
    out.push_back(seq.substr(i, order));
  }
  return out;
}

LangIdModel train_langid(const std::map<std::string, std::vector<std::string>>& corpora, int order) {
  if (corpora.size() < 2) throw ConfigError("language identification needs at least two languages");
  if (order < 1 || order > 8) throw ConfigError("n-gram order must be in 1..8");
  for (const auto& [lang, lines] : corpora) {
    if (lines.size() < 100) {
      throw ConfigError("language " + lang + " has " + std::to_string(lines.size()) +
                        " training lines; at least 100 are required");
    }
  }

  LangIdModel model;
  model.order_ = order;
  const std::size_t k = corpora.size();
  std::unordered_map<std::u32string, std::vector<long long>> counts;
  std::vector<long long> totals(k, 0);
  std::vector<std::size_t> lines_per_lang;
  std::size_t total_lines = 0;

  std::size_t li = 0;
  for (const auto& [lang, lines] : corpora) {  // std::map: sorted languages
    model.languages_.push_back(lang);
    lines_per_lang.push_back(lines.size());
    total_lines += lines.size();
    for (const std::string& line : lines) {
      for (auto& g : extract_ngrams(clean_text(line), order)) {
        auto [it, inserted] = counts.try_emplace(std::move(g), std::vector<long long>(k, 0));
        ++it->second[li];
        ++totals[li];
      }
    }
    ++li;
  }

  const double vocab = static_cast<double>(counts.size());
  for (std::size_t l = 0; l < k; ++l) {
    model.log_priors_.push_back(std::log(static_cast<double>(lines_per_lang[l]) / static_cast<double>(total_lines)));
  }
  model.loglik_.reserve(counts.size());
  for (const auto& [g, c] : counts) {
    std::vector<double> lp(k);
    for (std::size_t l = 0; l < k; ++l) {
      lp[l] = std::log((static_cast<double>(c[l]) + 1.0) / (static_cast<double>(totals[l]) + vocab));
    }
    model.loglik_.emplace(g, std::move(lp));
  }
  return model;
}

const std::vector<double>* LangIdModel::log_probs(const std::u32string& ngram) const {
  auto it = loglik_.find(ngram);
  return it == loglik_.end() ? nullptr : &it->second;
}

std::vector<double> LangIdModel::posteriors(std::string_view cleaned) const {
  if (cleaned.empty()) throw ConfigError("cannot detect the language of an empty string");
  std::vector<double> score = log_priors_;
  for (const auto& g : extract_ngrams(cleaned, order_)) {
    if (const auto* lp = log_probs(g)) {
      for (std::size_t l = 0; l < score.size(); ++l) score[l] += (*lp)[l];
    }
  }
  const double z = log_sum_exp(score);
  for (double& s : score) s = std::exp(s - z);
  return score;
}

Detection LangIdModel::detect(std::string_view cleaned) const {
  std::vector<double> post = posteriors(cleaned);
  const auto best = static_cast<std::size_t>(std::max_element(post.begin(), post.end()) - post.begin());
  return {languages_[best], post[best]};
}

double LangIdModel::posterior(std::string_view cleaned, std::string_view language) const {
  auto it = std::find(languages_.begin(), languages_.end(), language);
  if (it == languages_.end()) return 0.0;
  return posteriors(cleaned)[static_cast<std::size_t>(it - languages_.begin())];
}

std::string LangIdModel::to_json() const {
  nlohmann::json j;
  j["format"] = "srlproj-langid";
  j["version"] = 1;
  j["order"] = order_;
  j["languages"] = languages_;
  j["log_priors"] = log_priors_;
  nlohmann::json table = nlohmann::json::object();
  for (const auto& [g, lp] : loglik_) table[utf8::encode(g)] = lp;
  j["ngrams"] = std::move(table);
  return j.dump();
}

LangIdModel LangIdModel::from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "srlproj-langid") {
    throw ParseError("not a language-id model file");
  }
  if (j.value("version", 0) != 1) throw ParseError("unsupported language-id model version");
  try {
    LangIdModel m;
    m.order_ = j.at("order").get<int>();
    m.languages_ = j.at("languages").get<std::vector<std::string>>();
    m.log_priors_ = j.at("log_priors").get<std::vector<double>>();
    if (m.languages_.size() < 2 || m.log_priors_.size() != m.languages_.size()) {
      throw ParseError("language-id model has inconsistent class tables");
    }
    for (const auto& [key, value] : j.at("ngrams").items()) {
      auto lp = value.get<std::vector<double>>();
      if (lp.size() != m.languages_.size()) throw ParseError("language-id model has a ragged n-gram row");
      m.loglik_.emplace(utf8::decode_lossy(key), std::move(lp));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("language-id model: ") + e.what());
  }
}

void LangIdModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << '\n';
}

LangIdModel LangIdModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read language-id model " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

Detection detect(const LanguageDetector& model, std::string_view cleaned) { return model.detect(cleaned); }

Detection LabelTableDetector::detect(std::string_view cleaned) const {
  if (cleaned.empty()) throw ConfigError("cannot detect the language of an empty string");
  auto it = labels_.find(std::string(cleaned));
  if (it == labels_.end()) return {"und", 0.0};
  return {it->second, 1.0};
}

double LabelTableDetector::posterior(std::string_view cleaned, std::string_view language) const {
  auto d = detect(cleaned);
  return d.language == language ? d.posterior : 0.0;
}

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::EmptySource: return "empty-source";
    case RejectReason::EmptyTarget: return "empty-target";
    case RejectReason::SourceLanguage: return "source-not-source-language";
    case RejectReason::TargetLanguage: return "target-not-target-language";
  }
  return "unknown";
}

FilterResult filter_pairs(const LanguageDetector& model, const std::vector<io::RawPair>& pairs,
                          const FilterOptions& opts) {
  if (!(opts.tau >= 0.0 && opts.tau <= 1.0)) throw ConfigError("tau-lang must lie in [0,1]");

  struct Outcome {
    io::RawPair cleaned;
    std::optional<Rejection> rejection;
  };
  std::vector<Outcome> outcomes(pairs.size());

  constexpr std::size_t kChunk = 512;
  const std::size_t chunks = (pairs.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, opts.workers, [&](std::size_t c) {
    const std::size_t end = std::min(pairs.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const io::RawPair& p = pairs[i];
      Outcome& o = outcomes[i];
      o.cleaned = {p.id, clean_text(p.source), clean_text(p.target)};
      if (o.cleaned.source.empty()) {
        o.rejection = Rejection{p.id, RejectReason::EmptySource, {}};
        continue;
      }
      if (o.cleaned.target.empty()) {
        o.rejection = Rejection{p.id, RejectReason::EmptyTarget, {}};
        continue;
      }
      Detection src = model.detect(o.cleaned.source);
      if (src.language != opts.source_lang || src.posterior < opts.tau) {
        o.rejection = Rejection{p.id, RejectReason::SourceLanguage, src};
        continue;
      }
      Detection tgt = model.detect(o.cleaned.target);
      if (tgt.language != opts.target_lang || tgt.posterior < opts.tau) {
        o.rejection = Rejection{p.id, RejectReason::TargetLanguage, tgt};
      }
    }
  });

  FilterResult result;
  for (Outcome& o : outcomes) {
    if (o.rejection) {
      result.rejected.push_back(std::move(*o.rejection));
    } else {
      result.kept.push_back(std::move(o.cleaned));
    }
  }
  return result;
}

}  // namespace srlproj::langid
