#include "srlproj/propbank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "srlproj/error.hpp"
#include "srlproj/tree.hpp"

namespace srlproj::propbank {

FrameIndex::FrameIndex(std::map<std::string, std::vector<std::string>> core) : core_(std::move(core)) {
  for (const auto& [frame, names] : core_) {
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw ConfigError("frame index: duplicate core element in " + frame);
  }
}

const std::vector<std::string>* FrameIndex::core_elements(const std::string& frame) const {
  auto it = core_.find(frame);
  return it == core_.end() ? nullptr : &it->second;
}

FrameIndex FrameIndex::from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("frame index must be a JSON object");
  std::map<std::string, std::vector<std::string>> core;
  for (const auto& [frame, names] : j.items()) {
    if (!names.is_array()) throw ParseError("frame index: " + frame + " must map to an array");
    std::vector<std::string> v;
    for (const auto& n : names) {
      if (!n.is_string()) throw ParseError("frame index: " + frame + " lists a non-string element");
      v.push_back(n.get<std::string>());
    }
    core.emplace(frame, std::move(v));
  }
  return FrameIndex(std::move(core));
}

FrameIndex FrameIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read frame index " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

const char* to_string(MapRejection r) {
  switch (r) {
    case MapRejection::UnknownFrame: return "UnknownFrame";
    case MapRejection::PeripheralElement: return "PeripheralElement";
    case MapRejection::UnknownElement: return "UnknownElement";
    case MapRejection::NoCoreArgs: return "NoCoreArgs";
    case MapRejection::ArgOverflow: return "ArgOverflow";
    case MapRejection::AmbiguousPredicate: return "AmbiguousPredicate";
    case MapRejection::SpanConflict: return "SpanConflict";
    case MapRejection::DuplicatePredicate: return "DuplicatePredicate";
  }
  return "Unknown";
}

MapOutcome map_to_propbank(const FrameAnnotation& frame, const AnnotatedSentence& sentence, const FrameIndex& index,
                           ArgNumbering numbering) {
  const std::vector<std::string>* order = index.core_elements(frame.frame);
  if (!order) return MapRejection::UnknownFrame;

  std::vector<std::pair<std::size_t, const FrameElement*>> present;  // definition position
  for (const FrameElement& fe : frame.elements) {
    if (!fe.core) return MapRejection::PeripheralElement;
    auto it = std::find(order->begin(), order->end(), fe.name);
    if (it == order->end()) return MapRejection::UnknownElement;
    present.emplace_back(static_cast<std::size_t>(it - order->begin()), &fe);
  }
  if (present.empty()) return MapRejection::NoCoreArgs;
  std::sort(present.begin(), present.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  if (!sentence.valid_span(frame.target)) return MapRejection::SpanConflict;
  auto predicate = DependencyTree(sentence).span_head(frame.target);
  if (!predicate) return MapRejection::AmbiguousPredicate;

  PropBankInstance inst;
  inst.predicate = *predicate;
  const Token& tok = sentence.tokens[*predicate];
  inst.sense = (tok.lemma.empty() ? tok.form : tok.lemma) + ".01";
  for (std::size_t rank = 0; rank < present.size(); ++rank) {
    const std::size_t k = numbering == ArgNumbering::Dense ? rank : present[rank].first;
    if (k >= static_cast<std::size_t>(kMaxArgs)) return MapRejection::ArgOverflow;
    const Span& span = present[rank].second->span;
    if (!sentence.valid_span(span) || span.contains(inst.predicate)) return MapRejection::SpanConflict;
    for (const PropBankArgument& other : inst.args) {
      if (other.span.overlaps(span)) return MapRejection::SpanConflict;
    }
    inst.args.push_back({static_cast<int>(k), span});
  }
  return inst;
}

MapOutcome map_to_propbank(const project::ProjectedFrame& frame, const AnnotatedSentence& sentence,
                           const FrameIndex& index, ArgNumbering numbering) {
  return map_to_propbank(frame.annotation(), sentence, index, numbering);
}

CoreOnlyResult core_only_filter(std::span<const AnnotatedSentence> sentences, const FrameIndex& index,
                                ArgNumbering numbering) {
  CoreOnlyResult result;
  for (const AnnotatedSentence& s : sentences) {
    io::Conll09Sentence cs;
    std::set<int> predicates;
    std::optional<SentenceRejection> rejection;
    for (const FrameAnnotation& f : s.frames) {
      MapOutcome outcome = map_to_propbank(f, s, index, numbering);
      if (auto* r = std::get_if<MapRejection>(&outcome)) {
        rejection = SentenceRejection{s.id, f.frame, *r};
        break;
      }
      auto& inst = std::get<PropBankInstance>(outcome);
      if (!predicates.insert(inst.predicate).second) {
        rejection = SentenceRejection{s.id, f.frame, MapRejection::DuplicatePredicate};
        break;
      }
      cs.predicates.push_back(std::move(inst));
    }
    if (rejection) {
      result.rejected.push_back(std::move(*rejection));
      continue;
    }
    std::sort(cs.predicates.begin(), cs.predicates.end(),
              [](const auto& a, const auto& b) { return a.predicate < b.predicate; });
    cs.sentence = s;
    result.kept.push_back(std::move(cs));
  }
  return result;
}

SplitIndices split(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  if (n < 3) throw ConfigError("split needs at least 3 sentences, got " + std::to_string(n));
  if (!(ratios.train > 0.0 && ratios.dev > 0.0 && ratios.test > 0.0) ||
      ratios.train + ratios.dev + ratios.test > 1.0 + 1e-9) {
    throw ConfigError("split ratios must be positive and sum to at most 1");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Fisher-Yates on the raw engine output so the permutation does not depend
  // on the standard library's distribution implementations.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

  // Rounded sizes keep every fold within one sentence of its share; dev and
  // test get at least one sentence each.
  auto share = [n](double r) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 0.5)));
  };
  const std::size_t n_dev = share(ratios.dev);
  const std::size_t n_test = std::min(share(ratios.test), n - n_dev - 1);
  SplitIndices out;
  out.dev.assign(order.begin(), order.begin() + n_dev);
  out.test.assign(order.begin() + n_dev, order.begin() + n_dev + n_test);
  out.train.assign(order.begin() + n_dev + n_test, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.dev.begin(), out.dev.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::string> unsegment(const AnnotatedSentence& sentence) {
  std::vector<MultiWordSpan> mwt = sentence.mwt;
  std::sort(mwt.begin(), mwt.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  std::vector<std::string> out;
  auto next = mwt.begin();
  int i = 0;
  while (i < sentence.size()) {
    if (next != mwt.end() && next->start == i) {
      if (!sentence.valid_span(next->span())) throw Error("sentence " + sentence.id + ": bad multiword span");
      out.push_back(next->surface);
      i = next->end + 1;
      ++next;
      if (next != mwt.end() && next->start < i) throw Error("sentence " + sentence.id + ": overlapping multiword spans");
      continue;
    }
    if (next != mwt.end() && next->start < i) throw Error("sentence " + sentence.id + ": overlapping multiword spans");
    out.push_back(sentence.tokens[i].form);
    ++i;
  }
  return out;
}

CorpusStats corpus_stats(std::span<const AnnotatedSentence> sentences) {
  CorpusStats st;
  std::set<std::string> seg_types, unseg_types;
  for (const AnnotatedSentence& s : sentences) {
    ++st.n_sentences;
    st.n_tokens_seg += s.size();
    for (const Token& t : s.tokens) seg_types.insert(t.form);
    const auto surface = unsegment(s);
    st.n_tokens_unseg += static_cast<long long>(surface.size());
    unseg_types.insert(surface.begin(), surface.end());
  }
  st.n_types_seg = static_cast<long long>(seg_types.size());
  st.n_types_unseg = static_cast<long long>(unseg_types.size());
  if (st.n_sentences > 0) {
    st.asl_seg = static_cast<double>(st.n_tokens_seg) / static_cast<double>(st.n_sentences);
    st.asl_unseg = static_cast<double>(st.n_tokens_unseg) / static_cast<double>(st.n_sentences);
  }
  return st;
}

std::string format_stats_tsv(const std::vector<std::pair<std::string, CorpusStats>>& folds) {
  std::ostringstream out;
  out << "Fold\t#sentences\t#tokens (S)\t#types (S)\tASL (S)\t#tokens (U)\t#types (U)\tASL (U)\n";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& [name, s] : folds) {
    out << name << '\t' << s.n_sentences << '\t' << s.n_tokens_seg << '\t' << s.n_types_seg << '\t' << s.asl_seg
        << '\t' << s.n_tokens_unseg << '\t' << s.n_types_unseg << '\t' << s.asl_unseg << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::pair<std::string, long long>> sorted_counts(const std::map<std::string, long long>& counts) {
  std::vector<std::pair<std::string, long long>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return v;
}

}  // namespace

FrameStats frame_stats(std::span<const AnnotatedSentence> sentences) {
  std::map<std::string, long long> frames, elements;
  for (const AnnotatedSentence& s : sentences) {
    for (const FrameAnnotation& f : s.frames) {
      ++frames[f.frame];
      for (const FrameElement& e : f.elements) ++elements[e.name];
    }
  }
  return {sorted_counts(frames), sorted_counts(elements)};
}

std::string format_frame_stats_tsv(const FrameStats& stats) {
  std::string out = "kind\tname\tcount\n";
  for (const auto& [name, c] : stats.frames) out += "frame\t" + name + '\t' + std::to_string(c) + '\n';
  for (const auto& [name, c] : stats.elements) out += "element\t" + name + '\t' + std::to_string(c) + '\n';
  return out;
}

}  // namespace srlproj::propbank
