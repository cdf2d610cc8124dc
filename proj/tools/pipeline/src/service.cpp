#include "srlproj/pipeline/service.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "httplib.h"
#include "srlproj/error.hpp"
#include "srlproj/io.hpp"
#include "srlproj/pipeline/stages.hpp"
#include "srlproj/pipeline/workspace.hpp"

namespace srlproj::pipeline {

using nlohmann::ordered_json;

namespace {

ordered_json sentence_json(const AnnotatedSentence& s) {
  ordered_json tokens = ordered_json::array();
  for (const Token& t : s.tokens) {
    tokens.push_back({{"index", t.index},
                      {"form", t.form},
                      {"lemma", t.lemma},
                      {"upos", t.upos},
                      {"head", t.head},
                      {"deprel", t.deprel}});
  }
  ordered_json mwt = ordered_json::array();
  for (const MultiWordSpan& m : s.mwt) mwt.push_back({{"start", m.start}, {"end", m.end}, {"surface", m.surface}});
  return {{"tokens", tokens}, {"mwt", mwt}};
}

ordered_json frames_json(const std::vector<FrameAnnotation>& frames) {
  ordered_json out = ordered_json::array();
  for (const FrameAnnotation& f : frames) {
    ordered_json elements = ordered_json::array();
    for (const FrameElement& e : f.elements) {
      elements.push_back({{"name", e.name}, {"start", e.span.start}, {"end", e.span.end}, {"core", e.core}});
    }
    out.push_back({{"frame", f.frame},
                   {"target", {{"start", f.target.start}, {"end", f.target.end}}},
                   {"lu", f.lu},
                   {"elements", elements}});
  }
  return out;
}

std::string surface(const AnnotatedSentence& s) {
  std::string out;
  for (const Token& t : s.tokens) {
    if (!out.empty()) out += ' ';
    out += t.form;
  }
  return out;
}

Response json_response(int status, const ordered_json& j) {
  return {status, j.dump(-1, ' ', false, ordered_json::error_handler_t::replace), "application/json"};
}

Response error_response(int status, const std::string& message) {
  return json_response(status, {{"error", message}});
}

std::string extract_label(std::string_view body) {
  const std::string_view b = io::trim(body);
  if (!b.empty() && (b.front() == '{' || b.front() == '"')) {
    const nlohmann::json j = nlohmann::json::parse(b, nullptr, false);
    if (j.is_string()) return j.get<std::string>();
    if (j.is_object() && j.contains("label") && j["label"].is_string()) return j["label"].get<std::string>();
    return {};
  }
  return std::string(b);
}

void append_durably(const std::string& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot open " + path + ": " + std::strerror(errno));
  const ssize_t n = ::write(fd, line.data(), line.size());
  const int saved = errno;
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (n != static_cast<ssize_t>(line.size())) throw Error("short write to " + path + ": " + std::strerror(saved));
  if (!synced) throw Error("fsync failed on " + path);
}

}  // namespace

CurationService::CurationService(const PipelineConfig& config) : labels_path_(config.labels_path().string()) {
  if (!std::filesystem::exists(config.out("projected.jsonl"))) throw PrerequisiteError("projected.jsonl", "project");
  Workspace ws(config);
  std::map<std::string, double> scores;
  if (std::filesystem::exists(config.out("scores.tsv"))) {
    for (std::string_view line : io::split(read_file(config.out("scores.tsv")), '\n')) {
      const auto cols = io::split(line, '\t');
      if (cols.size() >= 2) scores[std::string(cols[0])] = std::stod(std::string(cols[1]));
    }
  }
  for (SentencePair& p : ws.projected_pairs()) {
    Entry e;
    const quality::FeatureVector fv = quality::extract_features(p);
    const auto values = fv.values();
    e.features = ordered_json::object();
    for (std::size_t k = 0; k < quality::kNumFeatures; ++k) e.features[quality::FeatureVector::names()[k]] = values[k];
    if (auto it = scores.find(p.id); it != scores.end()) e.score = it->second;
    e.pair = std::move(p);
    index_.emplace(e.pair.id, pairs_.size());
    pairs_.push_back(std::move(e));
  }
  if (std::filesystem::exists(labels_path_)) {
    std::ifstream in(labels_path_, std::ios::binary);
    for (const auto& [id, label] : quality::read_labels_tsv(in)) {
      label_order_.push_back(id);
      labels_[id] = label;
    }
  }
}

Response CurationService::list_pairs(std::size_t offset, std::size_t limit) const {
  limit = std::min(limit, kMaxLimit);
  ordered_json items = ordered_json::array();
  std::lock_guard lock(mu_);
  for (std::size_t i = offset; i < pairs_.size() && i < offset + limit; ++i) {
    const Entry& e = pairs_[i];
    auto label = labels_.find(e.pair.id);
    items.push_back({{"id", e.pair.id},
                     {"source", surface(e.pair.source)},
                     {"target", surface(e.pair.target)},
                     {"frames", e.pair.target.frames.size()},
                     {"score", e.score ? ordered_json(*e.score) : ordered_json(nullptr)},
                     {"label", label == labels_.end() ? ordered_json(nullptr) : ordered_json(to_string(label->second))}});
  }
  return json_response(200, {{"total", pairs_.size()}, {"offset", offset}, {"limit", limit}, {"items", items}});
}

Response CurationService::get_pair(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return error_response(404, "unknown pair " + id);
  const Entry& e = pairs_[it->second];
  ordered_json links = ordered_json::array();
  for (const AlignmentLink& l : e.pair.alignment) links.push_back({l.source, l.target});
  std::lock_guard lock(mu_);
  auto label = labels_.find(id);
  return json_response(
      200, {{"id", id},
            {"source", sentence_json(e.pair.source)},
            {"target", sentence_json(e.pair.target)},
            {"alignment", links},
            {"source_frames", frames_json(e.pair.source.frames)},
            {"projected_frames", frames_json(e.pair.target.frames)},
            {"features", e.features},
            {"score", e.score ? ordered_json(*e.score) : ordered_json(nullptr)},
            {"label", label == labels_.end() ? ordered_json(nullptr) : ordered_json(to_string(label->second))}});
}

Response CurationService::post_label(const std::string& id, std::string_view body) {
  if (!index_.count(id)) return error_response(404, "unknown pair " + id);
  const std::string text = extract_label(body);
  const auto label = quality::parse_label(text);
  if (!label) {
    ordered_json valid = ordered_json::array();
    for (quality::QualityLabel l : quality::kAllLabels) valid.push_back(to_string(l));
    return json_response(400, {{"error", "invalid label '" + text + "'"}, {"valid_labels", valid}});
  }
  std::lock_guard lock(mu_);
  append_durably(labels_path_, id + '\t' + to_string(*label) + '\n');
  if (!labels_.count(id)) label_order_.push_back(id);
  labels_[id] = *label;
  return json_response(200, {{"id", id}, {"label", to_string(*label)}});
}

Response CurationService::export_labels() const {
  std::vector<std::pair<std::string, quality::QualityLabel>> rows;
  std::lock_guard lock(mu_);
  for (const std::string& id : label_order_) rows.emplace_back(id, labels_.at(id));
  return {200, quality::format_labels_tsv(rows), "text/tab-separated-values"};
}

Response CurationService::stats() const {
  ordered_json counts = ordered_json::object();
  for (quality::QualityLabel l : quality::kAllLabels) counts[to_string(l)] = 0;
  std::lock_guard lock(mu_);
  std::size_t labeled = 0;
  // Labels of pairs outside the served set (e.g. dropped by projection) are not counted.
  for (const auto& [id, l] : labels_) {
    if (!index_.count(id)) continue;
    counts[to_string(l)] = counts[to_string(l)].get<long long>() + 1;
    ++labeled;
  }
  return json_response(200, {{"total_pairs", pairs_.size()},
                             {"labeled", labeled},
                             {"unlabeled", pairs_.size() - labeled},
                             {"labels", counts}});
}

CurationServer::CurationServer(CurationService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto parse_size = [](const httplib::Request& req, const char* key, std::size_t fallback) -> std::optional<std::size_t> {
    if (!req.has_param(key)) return fallback;
    const std::string v = req.get_param_value(key);
    int out = 0;
    if (!io::parse_int(v, out) || out < 0) return std::nullopt;
    return static_cast<std::size_t>(out);
  };

  server_->Get("/api/pairs", [this, send, parse_size](const httplib::Request& req, httplib::Response& res) {
    const auto offset = parse_size(req, "offset", 0);
    const auto limit = parse_size(req, "limit", CurationService::kDefaultLimit);
    if (!offset || !limit) return send(res, error_response(400, "offset and limit must be non-negative integers"));
    send(res, service_.list_pairs(*offset, *limit));
  });
  server_->Get(R"(/api/pairs/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get_pair(req.matches[1]));
  });
  server_->Post(R"(/api/pairs/([^/]+)/label)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.post_label(req.matches[1], req.body));
  });
  server_->Get("/api/export/labels", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, service_.export_labels());
    res.set_header("Content-Disposition", "attachment; filename=\"labels.tsv\"");
  });
  server_->Get("/api/stats", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, service_.stats());
  });
  server_->set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error_response(500, what));
  });
}

CurationServer::~CurationServer() { stop(); }

int CurationServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void CurationServer::listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void CurationServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace srlproj::pipeline
