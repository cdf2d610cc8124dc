#include "srlproj/quality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "srlproj/error.hpp"
#include "srlproj/io.hpp"
#include "srlproj/tree.hpp"

namespace srlproj::quality {

const char* to_string(QualityLabel l) {
  switch (l) {
    case QualityLabel::SentAlignError: return "SentAlignError";
    case QualityLabel::PoorTranslation: return "PoorTranslation";
    case QualityLabel::WordAlignError: return "WordAlignError";
    case QualityLabel::PoorSyntax: return "PoorSyntax";
    case QualityLabel::PoorFrameParse: return "PoorFrameParse";
    case QualityLabel::Good: return "Good";
  }
  return "";
}

const char* description(QualityLabel l) {
  switch (l) {
    case QualityLabel::SentAlignError: return "Error in sentence alignment";
    case QualityLabel::PoorTranslation: return "Poor translation";
    case QualityLabel::WordAlignError: return "Error in word alignment";
    case QualityLabel::PoorSyntax: return "Poor syntactic parsing";
    case QualityLabel::PoorFrameParse: return "Poor frame parsing";
    case QualityLabel::Good: return "Good";
  }
  return "";
}

std::optional<QualityLabel> parse_label(std::string_view s) {
  for (QualityLabel l : kAllLabels) {
    if (s == to_string(l) || s == description(l)) return l;
  }
  return std::nullopt;
}

int tree_depth(const AnnotatedSentence& s) { return s.tokens.empty() ? 0 : DependencyTree(s).depth(); }

bool structural_prefilter(const SentencePair& pair, const PrefilterOptions& opts) {
  return pair.target.size() >= opts.min_tokens && tree_depth(pair.target) >= opts.min_depth;
}

std::array<double, kNumFeatures> FeatureVector::values() const {
  return {len_src, len_tgt, len_ratio, n_frames, n_one_to_one, n_one_to_many, depth_src, depth_tgt};
}

FeatureVector FeatureVector::from_values(const std::array<double, kNumFeatures>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

const std::array<const char*, kNumFeatures>& FeatureVector::names() {
  static const std::array<const char*, kNumFeatures> kNames = {
      "len_src", "len_tgt", "len_ratio", "n_frames", "n_one_to_one", "n_one_to_many", "depth_src", "depth_tgt"};
  return kNames;
}

FeatureVector extract_features(const SentencePair& pair) {
  if (pair.target.size() == 0) throw ConfigError("pair " + pair.id + ": empty target sentence");
  FeatureVector f;
  f.len_src = pair.source.size();
  f.len_tgt = pair.target.size();
  f.len_ratio = f.len_src / f.len_tgt;
  f.n_frames = static_cast<double>(pair.source.frames.size());

  std::map<int, int> src_deg, tgt_deg;
  for (const AlignmentLink& l : pair.alignment) {
    ++src_deg[l.source];
    ++tgt_deg[l.target];
  }
  for (const AlignmentLink& l : pair.alignment) {
    if (src_deg[l.source] == 1 && tgt_deg[l.target] == 1) f.n_one_to_one += 1;
  }
  for (const auto& [i, d] : src_deg) {
    if (d >= 2) f.n_one_to_many += 1;
  }
  f.depth_src = tree_depth(pair.source);
  f.depth_tgt = tree_depth(pair.target);
  return f;
}

// ---------------------------------------------------------------------------

namespace {

double sigmoid(double z) {
  const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

}  // namespace

double LinearClassifier::margin(const FeatureVector& x) const {
  const auto v = x.values();
  double z = bias;
  for (std::size_t k = 0; k < kNumFeatures; ++k) z += weights[k] * (v[k] - mean[k]) / stddev[k];
  return z;
}

double LinearClassifier::score(const FeatureVector& x) const { return sigmoid(margin(x)); }

double score(const LinearClassifier& model, const FeatureVector& x) { return model.score(x); }

std::string LinearClassifier::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "srlproj-quality";
  j["version"] = 1;
  j["features"] = FeatureVector::names();
  j["weights"] = weights;
  j["bias"] = bias;
  j["mean"] = mean;
  j["stddev"] = stddev;
  j["seed"] = seed;
  return j.dump(2);
}

LinearClassifier LinearClassifier::from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "srlproj-quality") {
    throw ParseError("not a quality classifier file");
  }
  try {
    LinearClassifier c;
    c.weights = j.at("weights").get<std::array<double, kNumFeatures>>();
    c.bias = j.at("bias").get<double>();
    c.mean = j.at("mean").get<std::array<double, kNumFeatures>>();
    c.stddev = j.at("stddev").get<std::array<double, kNumFeatures>>();
    c.seed = j.value("seed", std::uint64_t{0});
    for (double s : c.stddev) {
      if (!(s > 0.0)) throw ParseError("quality classifier has a non-positive stddev");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("quality classifier: ") + e.what());
  }
}

void LinearClassifier::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << '\n';
}

LinearClassifier LinearClassifier::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read quality classifier " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

LinearClassifier fit(std::span<const LabeledExample> labeled, const TrainingOptions& opts) {
  if (opts.epochs < 0 || !(opts.learning_rate > 0.0) || opts.l2 < 0.0) {
    throw ConfigError("invalid classifier training options");
  }
  std::vector<std::array<double, kNumFeatures>> xs;
  std::vector<double> ys;
  for (const LabeledExample& e : labeled) {
    xs.push_back(e.features.values());
    ys.push_back(e.label == QualityLabel::Good ? 1.0 : 0.0);
  }
  const auto positives = std::count(ys.begin(), ys.end(), 1.0);
  if (positives == 0 || positives == static_cast<long>(ys.size())) {
    throw ConfigError("classifier training needs both Good and non-Good examples");
  }

  LinearClassifier model;
  model.seed = opts.seed;
  const double n = static_cast<double>(xs.size());
  for (std::size_t k = 0; k < kNumFeatures; ++k) {
    double m = 0.0;
    for (const auto& x : xs) m += x[k];
    m /= n;
    double var = 0.0;
    for (const auto& x : xs) var += (x[k] - m) * (x[k] - m);
    const double sd = std::sqrt(var / n);
    // A constant feature standardizes to 0 and keeps a zero weight.
    model.mean[k] = m;
    model.stddev[k] = sd > 1e-12 * std::max(1.0, std::abs(m)) ? sd : 1.0;
  }

  std::vector<std::size_t> rows(xs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  if (opts.resample) {
    const bool minority_good = positives * 2 < static_cast<long>(ys.size());
    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if ((ys[i] == 1.0) == minority_good) minority.push_back(i);
    }
    const std::size_t majority = ys.size() - minority.size();
    std::mt19937_64 rng(opts.seed);
    for (std::size_t extra = minority.size(); extra < majority; ++extra) {
      rows.push_back(minority[rng() % minority.size()]);
    }
  }

  std::vector<std::array<double, kNumFeatures>> z(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t k = 0; k < kNumFeatures; ++k) z[i][k] = (xs[i][k] - model.mean[k]) / model.stddev[k];
  }

  const double batch = static_cast<double>(rows.size());
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::array<double, kNumFeatures> grad{};
    double grad_b = 0.0;
    for (std::size_t r : rows) {
      double m = model.bias;
      for (std::size_t k = 0; k < kNumFeatures; ++k) m += model.weights[k] * z[r][k];
      const double err = sigmoid(m) - ys[r];
      for (std::size_t k = 0; k < kNumFeatures; ++k) grad[k] += err * z[r][k];
      grad_b += err;
    }
    for (std::size_t k = 0; k < kNumFeatures; ++k) {
      model.weights[k] -= opts.learning_rate * (grad[k] / batch + opts.l2 * model.weights[k]);
    }
    model.bias -= opts.learning_rate * grad_b / batch;
  }
  return model;
}

// ---------------------------------------------------------------------------

std::vector<ScoredPair> threshold_filter(std::span<const ScoredPair> pairs, double tau) {
  std::vector<ScoredPair> out;
  for (const ScoredPair& p : pairs) {
    if (p.score > tau) out.push_back(p);
  }
  return out;
}

std::vector<HistogramRow> score_histogram(std::span<const ScoredPair> pairs, double bin_width) {
  if (!(bin_width > 0.0) || bin_width > 1.0) throw ConfigError("histogram bin width must lie in (0,1]");
  const double bins_real = 1.0 / bin_width;
  const long bins = std::lround(bins_real);
  if (std::abs(bins_real - static_cast<double>(bins)) > 1e-9 * bins_real) {
    throw ConfigError("histogram bin width must divide 1");
  }
  std::vector<HistogramRow> rows(static_cast<std::size_t>(bins));
  for (long k = 0; k < bins; ++k) {
    rows[k].lo = static_cast<double>(k) / static_cast<double>(bins);
    rows[k].hi = static_cast<double>(k + 1) / static_cast<double>(bins);
  }
  for (const ScoredPair& p : pairs) {
    long k = static_cast<long>(std::floor(std::clamp(p.score, 0.0, 1.0) * static_cast<double>(bins)));
    k = std::clamp(k, 0L, bins - 1);
    ++rows[k].count;
  }
  for (HistogramRow& row : rows) {
    double length = 0.0;
    for (const ScoredPair& p : pairs) {
      if (p.score > row.lo) {
        ++row.above_count;
        length += p.target_length;
      }
    }
    row.above_mean_length = row.above_count == 0 ? 0.0 : length / static_cast<double>(row.above_count);
  }
  return rows;
}

std::string format_histogram_csv(const std::vector<HistogramRow>& rows) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count,above_count,above_mean_tgt_len\n";
  out.setf(std::ios::fixed);
  for (const HistogramRow& r : rows) {
    out.precision(4);
    out << r.lo << ',' << r.hi << ',' << r.count << ',' << r.above_count << ',';
    out.precision(4);
    out << r.above_mean_length << '\n';
  }
  return out.str();
}

std::vector<std::pair<std::string, QualityLabel>> read_labels_tsv(std::istream& in) {
  std::vector<std::pair<std::string, QualityLabel>> out;
  std::map<std::string, std::size_t> where;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = io::strip_cr(raw);
    if (io::trim(line).empty()) continue;
    auto cols = io::split(line, '\t');
    if (cols.size() != 2) throw ParseError("labels file: expected pair_id<TAB>label", line_no);
    auto label = parse_label(cols[1]);
    if (!label) throw ParseError("labels file: unknown label '" + std::string(cols[1]) + "'", line_no);
    std::string id(cols[0]);
    if (auto it = where.find(id); it != where.end()) {
      out[it->second].second = *label;
    } else {
      where.emplace(id, out.size());
      out.emplace_back(std::move(id), *label);
    }
  }
  return out;
}

std::string format_labels_tsv(const std::vector<std::pair<std::string, QualityLabel>>& labels) {
  std::string out;
  for (const auto& [id, label] : labels) out += id + '\t' + to_string(label) + '\n';
  return out;
}

}  // namespace srlproj::quality
