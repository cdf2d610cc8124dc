#include "srlproj/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "srlproj/error.hpp"
#include "srlproj/parallel.hpp"

namespace srlproj::align {

namespace {

constexpr std::size_t kShardPairs = 256;
constexpr double kMaxLambda = 50.0;

struct EncodedPair {
  std::vector<int> source;  // ids >= 1
  std::vector<int> target;
};

double feature(int i, int j, int m, int n) {
  return -std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n);
}

std::uint64_t key(int e, int f) { return (static_cast<std::uint64_t>(e) << 32) | static_cast<std::uint32_t>(f); }

// Normalized diagonal prior over source positions 1..m for target position j.
void prior_row(int j, int m, int n, double lambda, std::vector<double>& out) {
  out.resize(m);
  double z = 0.0;
  for (int i = 1; i <= m; ++i) {
    out[i - 1] = std::exp(lambda * feature(i, j, m, n));
    z += out[i - 1];
  }
  for (double& w : out) w /= z;
}

double lookup(const std::unordered_map<int, double>& row, int f) {
  auto it = row.find(f);
  return it == row.end() ? 0.0 : it->second;
}

// Unnormalized option masses for target position j (1-based): [0] null,
// [i] source position i.
void option_masses(const std::vector<std::unordered_map<int, double>>& rows, double p_null, double lambda,
                   const std::vector<int>& source, int f, int j, int n, std::vector<double>& prior,
                   std::vector<double>& out) {
  const int m = static_cast<int>(source.size());
  prior_row(j, m, n, lambda, prior);
  out.assign(m + 1, 0.0);
  if (f >= 0) {
    out[0] = p_null > 0.0 ? p_null * lookup(rows[AlignmentModel::kNull], f) : 0.0;
    for (int i = 1; i <= m; ++i) {
      const int e = source[i - 1];
      if (e > 0) out[i] = (1.0 - p_null) * prior[i - 1] * lookup(rows[e], f);
    }
  }
}

struct ShardStats {
  double log_likelihood = 0.0;
  std::unordered_map<std::uint64_t, double> counts;
  double empirical_feature = 0.0;
  std::map<std::pair<int, int>, std::vector<double>> aligned_mass;  // (m, n) -> mass by j
};

}  // namespace

void validate(const AlignerOptions& opts) {
  if (opts.iterations < 1) throw ConfigError("aligner iterations must be >= 1");
  if (!(opts.lambda >= 0.0) || !std::isfinite(opts.lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(opts.p_null >= 0.0 && opts.p_null < 1.0)) throw ConfigError("p-null must lie in [0,1)");
  if (!(opts.prune >= 0.0 && opts.prune < 1.0)) throw ConfigError("prune threshold must lie in [0,1)");
}

double diagonal_prior(int i, int j, int m, int n, double lambda) {
  if (m < 1 || n < 1 || i < 1 || i > m || j < 1 || j > n) {
    throw ConfigError("diagonal_prior: position out of range");
  }
  if (lambda < 0.0) throw ConfigError("diagonal_prior: lambda must be >= 0");
  return std::exp(lambda * feature(i, j, m, n));
}

// ---------------------------------------------------------------------------

double AlignmentModel::t(const std::string& source, const std::string& target) const {
  return t_by_id(source_id(source), target_id(target));
}

double AlignmentModel::t_null(const std::string& target) const { return t_by_id(kNull, target_id(target)); }

double AlignmentModel::t_by_id(int source, int target) const {
  if (source < 0 || target < 0 || source >= static_cast<int>(rows_.size())) return 0.0;
  return lookup(rows_[source], target);
}

int AlignmentModel::source_id(const std::string& w) const {
  auto it = source_ids_.find(w);
  return it == source_ids_.end() ? -1 : it->second;
}

int AlignmentModel::target_id(const std::string& w) const {
  auto it = target_ids_.find(w);
  return it == target_ids_.end() ? -1 : it->second;
}

double AlignmentModel::row_sum(const std::string& source) const {
  const int e = source_id(source);
  if (e < 0) return 0.0;
  double s = 0.0;
  for (const auto& [f, p] : rows_[e]) s += p;
  return s;
}

std::vector<std::string> AlignmentModel::source_words() const {
  return {source_words_.begin() + 1, source_words_.end()};
}

std::size_t AlignmentModel::entries() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

std::string AlignmentModel::to_json() const {
  nlohmann::json j;
  j["format"] = "srlproj-align";
  j["version"] = 1;
  j["lambda"] = lambda_;
  j["p_null"] = p_null_;
  auto row_json = [&](const std::unordered_map<int, double>& row) {
    nlohmann::json r = nlohmann::json::object();
    for (const auto& [f, p] : row) r[target_words_[f]] = p;
    return r;
  };
  j["null_row"] = row_json(rows_[kNull]);
  nlohmann::json table = nlohmann::json::object();
  for (std::size_t e = 1; e < rows_.size(); ++e) table[source_words_[e]] = row_json(rows_[e]);
  j["ttable"] = std::move(table);
  return j.dump();
}

AlignmentModel AlignmentModel::from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "srlproj-align") {
    throw ParseError("not an alignment model file");
  }
  if (j.value("version", 0) != 1) throw ParseError("unsupported alignment model version");
  try {
    AlignmentModel m;
    m.lambda_ = j.at("lambda").get<double>();
    m.p_null_ = j.at("p_null").get<double>();
    m.source_words_.emplace_back();
    m.rows_.emplace_back();
    auto target = [&](const std::string& w) {
      auto [it, inserted] = m.target_ids_.try_emplace(w, static_cast<int>(m.target_words_.size()));
      if (inserted) m.target_words_.push_back(w);
      return it->second;
    };
    for (const auto& [f, p] : j.at("null_row").items()) m.rows_[kNull][target(f)] = p.get<double>();
    for (const auto& [e, row] : j.at("ttable").items()) {
      const int id = static_cast<int>(m.source_words_.size());
      m.source_ids_.emplace(e, id);
      m.source_words_.push_back(e);
      m.rows_.emplace_back();
      for (const auto& [f, p] : row.items()) m.rows_[id][target(f)] = p.get<double>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("alignment model: ") + e.what());
  }
}

void AlignmentModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << '\n';
}

AlignmentModel AlignmentModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read alignment model " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

// ---------------------------------------------------------------------------

class Trainer {
 public:
  Trainer(std::span<const TokenizedPair> corpus, const AlignerOptions& opts) : opts_(opts) {
    model_.lambda_ = opts.lambda;
    model_.p_null_ = opts.p_null;
    model_.source_words_.emplace_back();
    encoded_.reserve(corpus.size());
    for (const TokenizedPair& p : corpus) {
      EncodedPair e;
      for (const auto& w : p.source) {
        auto [it, inserted] = model_.source_ids_.try_emplace(w, static_cast<int>(model_.source_words_.size()));
        if (inserted) model_.source_words_.push_back(w);
        e.source.push_back(it->second);
      }
      for (const auto& w : p.target) {
        auto [it, inserted] = model_.target_ids_.try_emplace(w, static_cast<int>(model_.target_words_.size()));
        if (inserted) model_.target_words_.push_back(w);
        e.target.push_back(it->second);
      }
      encoded_.push_back(std::move(e));
    }
    initialize();
  }

  AlignmentModel run(TrainingTrace* trace) {
    for (int it = 0; it < opts_.iterations; ++it) {
      std::vector<ShardStats> shards = e_step();
      double ll = 0.0;
      for (const auto& s : shards) ll += s.log_likelihood;
      if (trace) {
        trace->log_likelihood.push_back(ll);
        trace->lambda.push_back(model_.lambda_);
      }
      m_step(shards);
      if (opts_.optimize_lambda) update_lambda(shards);
    }
    return std::move(model_);
  }

 private:
  void initialize() {
    const double uniform = 1.0 / static_cast<double>(std::max<std::size_t>(1, model_.target_words_.size()));
    model_.rows_.assign(model_.source_words_.size(), {});
    for (std::size_t f = 0; f < model_.target_words_.size(); ++f) {
      model_.rows_[AlignmentModel::kNull][static_cast<int>(f)] = uniform;
    }
    for (const EncodedPair& p : encoded_) {
      for (int e : p.source) {
        auto& row = model_.rows_[e];
        for (int f : p.target) row.try_emplace(f, uniform);
      }
    }
  }

  std::vector<ShardStats> e_step() const {
    const std::size_t n_shards = (encoded_.size() + kShardPairs - 1) / kShardPairs;
    std::vector<ShardStats> shards(n_shards);
    const double lambda = model_.lambda_;
    const double p_null = model_.p_null_;
    parallel_for(n_shards, opts_.workers, [&](std::size_t s) {
      ShardStats& out = shards[s];
      std::vector<double> prior, mass;
      const std::size_t end = std::min(encoded_.size(), (s + 1) * kShardPairs);
      for (std::size_t k = s * kShardPairs; k < end; ++k) {
        const EncodedPair& p = encoded_[k];
        const int m = static_cast<int>(p.source.size());
        const int n = static_cast<int>(p.target.size());
        if (m == 0 || n == 0) continue;
        std::vector<double>* by_j = nullptr;
        if (opts_.optimize_lambda) {
          auto& v = out.aligned_mass[{m, n}];
          v.resize(n, 0.0);
          by_j = &v;
        }
        for (int j = 1; j <= n; ++j) {
          const int f = p.target[j - 1];
          option_masses(model_.rows_, p_null, lambda, p.source, f, j, n, prior, mass);
          double total = 0.0;
          for (double x : mass) total += x;
          if (total <= 0.0) continue;
          out.log_likelihood += std::log(total);
          if (mass[0] > 0.0) out.counts[key(AlignmentModel::kNull, f)] += mass[0] / total;
          double aligned = 0.0;
          for (int i = 1; i <= m; ++i) {
            if (mass[i] <= 0.0) continue;
            const double q = mass[i] / total;
            out.counts[key(p.source[i - 1], f)] += q;
            aligned += q;
            out.empirical_feature += q * feature(i, j, m, n);
          }
          if (by_j) (*by_j)[j - 1] += aligned;
        }
      }
    });
    return shards;
  }

  void m_step(const std::vector<ShardStats>& shards) {
    std::vector<std::unordered_map<int, double>> counts(model_.rows_.size());
    for (const ShardStats& s : shards) {
      for (const auto& [k, c] : s.counts) {
        counts[static_cast<std::size_t>(k >> 32)][static_cast<int>(k & 0xffffffffu)] += c;
      }
    }
    for (std::size_t e = 0; e < counts.size(); ++e) {
      auto& row = counts[e];
      double total = 0.0;
      for (const auto& [f, c] : row) total += c;
      if (total <= 0.0) continue;  // word never used: keep its previous row
      double kept = 0.0;
      for (auto it = row.begin(); it != row.end();) {
        it->second /= total;
        if (it->second < opts_.prune) {
          it = row.erase(it);
        } else {
          kept += it->second;
          ++it;
        }
      }
      if (kept > 0.0 && kept != 1.0) {
        for (auto& [f, p] : row) p /= kept;
      }
      model_.rows_[e] = std::move(row);
    }
  }

  // Gradient ascent on the expected log diagonal prior.
  void update_lambda(const std::vector<ShardStats>& shards) {
    double empirical = 0.0;
    double tokens = 0.0;
    std::map<std::pair<int, int>, std::vector<double>> mass;
    for (const ShardStats& s : shards) {
      empirical += s.empirical_feature;
      for (const auto& [mn, v] : s.aligned_mass) {
        auto& dst = mass[mn];
        dst.resize(v.size(), 0.0);
        for (std::size_t j = 0; j < v.size(); ++j) {
          dst[j] += v[j];
          tokens += v[j];
        }
      }
    }
    if (tokens <= 0.0) return;
    std::vector<double> prior;
    for (int step = 0; step < 8; ++step) {
      double modelled = 0.0;
      for (const auto& [mn, v] : mass) {
        const auto [m, n] = mn;
        for (int j = 1; j <= n; ++j) {
          if (v[j - 1] == 0.0) continue;
          prior_row(j, m, n, model_.lambda_, prior);
          double expect = 0.0;
          for (int i = 1; i <= m; ++i) expect += prior[i - 1] * feature(i, j, m, n);
          modelled += v[j - 1] * expect;
        }
      }
      model_.lambda_ = std::clamp(model_.lambda_ + 20.0 * (empirical - modelled) / tokens, 0.0, kMaxLambda);
    }
  }

  AlignerOptions opts_;
  AlignmentModel model_;
  std::vector<EncodedPair> encoded_;
};

AlignmentModel em_train(std::span<const TokenizedPair> corpus, const AlignerOptions& opts, TrainingTrace* trace) {
  validate(opts);
  if (corpus.empty()) throw ConfigError("cannot train an aligner on an empty corpus");
  Trainer trainer(corpus, opts);
  return trainer.run(trace);
}

namespace {

struct EncodedView {
  std::vector<int> source;
  std::vector<int> target;
};

EncodedView encode(const AlignmentModel& model, const TokenizedPair& pair) {
  EncodedView v;
  for (const auto& w : pair.source) v.source.push_back(std::max(-1, model.source_id(w)));
  for (const auto& w : pair.target) v.target.push_back(model.target_id(w));
  return v;
}

// Masses via the public accessors so decoding works on loaded models too.
void masses_for(const AlignmentModel& model, const EncodedView& v, int j, std::vector<double>& prior,
                std::vector<double>& out) {
  const int m = static_cast<int>(v.source.size());
  const int n = static_cast<int>(v.target.size());
  const int f = v.target[j - 1];
  prior_row(j, m, n, model.lambda(), prior);
  out.assign(m + 1, 0.0);
  if (f < 0) return;
  out[0] = model.p_null() > 0.0 ? model.p_null() * model.t_by_id(AlignmentModel::kNull, f) : 0.0;
  for (int i = 1; i <= m; ++i) {
    const int e = v.source[i - 1];
    if (e > 0) out[i] = (1.0 - model.p_null()) * prior[i - 1] * model.t_by_id(e, f);
  }
}

}  // namespace

double log_likelihood(const AlignmentModel& model, std::span<const TokenizedPair> corpus) {
  double ll = 0.0;
  std::vector<double> prior, mass;
  for (const TokenizedPair& p : corpus) {
    if (p.source.empty() || p.target.empty()) continue;
    EncodedView v = encode(model, p);
    for (int j = 1; j <= static_cast<int>(v.target.size()); ++j) {
      masses_for(model, v, j, prior, mass);
      double total = 0.0;
      for (double x : mass) total += x;
      if (total > 0.0) ll += std::log(total);
    }
  }
  return ll;
}

std::vector<std::vector<double>> link_posteriors(const AlignmentModel& model, const TokenizedPair& pair) {
  std::vector<std::vector<double>> out;
  if (pair.source.empty()) return std::vector<std::vector<double>>(pair.target.size(), std::vector<double>{0.0});
  EncodedView v = encode(model, pair);
  std::vector<double> prior, mass;
  for (int j = 1; j <= static_cast<int>(v.target.size()); ++j) {
    masses_for(model, v, j, prior, mass);
    double total = 0.0;
    for (double x : mass) total += x;
    if (total > 0.0) {
      for (double& x : mass) x /= total;
    }
    out.push_back(mass);
  }
  return out;
}

Alignment viterbi_decode(const AlignmentModel& model, const TokenizedPair& pair) {
  Alignment links;
  if (pair.source.empty()) return links;
  EncodedView v = encode(model, pair);
  std::vector<double> prior, mass;
  for (int j = 1; j <= static_cast<int>(v.target.size()); ++j) {
    masses_for(model, v, j, prior, mass);
    int best = 0;
    for (int i = 1; i < static_cast<int>(mass.size()); ++i) {
      if (mass[i] > mass[best]) best = i;
    }
    if (best > 0 && mass[best] > 0.0) links.push_back({best - 1, j - 1});
  }
  normalize(links);
  return links;
}

std::vector<Alignment> viterbi_decode_all(const AlignmentModel& model, std::span<const TokenizedPair> corpus,
                                          unsigned workers) {
  std::vector<Alignment> out(corpus.size());
  const std::size_t chunks = (corpus.size() + kShardPairs - 1) / kShardPairs;
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(corpus.size(), (c + 1) * kShardPairs);
    for (std::size_t k = c * kShardPairs; k < end; ++k) out[k] = viterbi_decode(model, corpus[k]);
  });
  return out;
}

AlignmentStats alignment_stats(std::span<const TokenizedPair> pairs, std::span<const Alignment> alignments) {
  if (pairs.size() != alignments.size()) throw ConfigError("alignment_stats: pairs and alignments differ in length");
  AlignmentStats st;
  std::set<std::pair<std::string, std::string>> distinct;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Alignment& a = alignments[k];
    std::map<int, int> src_deg, tgt_deg;
    for (const AlignmentLink& l : a) {
      ++src_deg[l.source];
      ++tgt_deg[l.target];
    }
    st.total_links += static_cast<long long>(a.size());
    st.aligned_sources += static_cast<long long>(src_deg.size());
    for (const auto& [i, d] : src_deg) {
      if (d >= 2) {
        ++st.one_to_many;
        st.many_covered_links += d;
      }
    }
    for (const AlignmentLink& l : a) {
      if (src_deg[l.source] == 1) {
        if (tgt_deg[l.target] == 1) {
          ++st.one_to_one;
        } else {
          ++st.other_links;
        }
      }
      const auto& p = pairs[k];
      if (l.source < static_cast<int>(p.source.size()) && l.target < static_cast<int>(p.target.size())) {
        distinct.emplace(p.source[l.source], p.target[l.target]);
      }
    }
  }
  st.distinct_pairs = static_cast<long long>(distinct.size());
  st.mean_targets_per_aligned_source =
      st.aligned_sources == 0 ? 0.0 : static_cast<double>(st.total_links) / static_cast<double>(st.aligned_sources);
  return st;
}

double alignment_error_rate(std::span<const Alignment> predicted, std::span<const Alignment> gold) {
  if (predicted.size() != gold.size()) throw ConfigError("alignment_error_rate: corpus sizes differ");
  double both = 0.0, a = 0.0, g = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    Alignment p = predicted[k], q = gold[k];
    normalize(p);
    normalize(q);
    Alignment inter;
    std::set_intersection(p.begin(), p.end(), q.begin(), q.end(), std::back_inserter(inter));
    both += static_cast<double>(inter.size());
    a += static_cast<double>(p.size());
    g += static_cast<double>(q.size());
  }
  if (a + g == 0.0) return 0.0;
  return 1.0 - 2.0 * both / (a + g);
}

}  // namespace srlproj::align
