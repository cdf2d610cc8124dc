#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "srlproj/pipeline/config.hpp"
#include "srlproj/quality.hpp"
#include "srlproj/types.hpp"

namespace httplib {
class Server;
}

namespace srlproj::pipeline {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Review service over the projected pairs of one output directory. Pair
// artifacts are read once at startup; the labels TSV is the only state that
// changes, and every accepted label is appended to it before the reply.
class CurationService {
 public:
  explicit CurationService(const PipelineConfig& config);

  std::size_t size() const { return pairs_.size(); }

  Response list_pairs(std::size_t offset, std::size_t limit) const;
  Response get_pair(const std::string& id) const;
  // `body` is a bare label string, a JSON string, or {"label": "..."}.
  Response post_label(const std::string& id, std::string_view body);
  Response export_labels() const;
  Response stats() const;

  static constexpr std::size_t kDefaultLimit = 50;
  static constexpr std::size_t kMaxLimit = 1000;

 private:
  struct Entry {
    SentencePair pair;
    nlohmann::ordered_json features;
    std::optional<double> score;
  };

  std::vector<quality::QualityLabel> ordered_labels() const;

  std::string labels_path_;
  std::vector<Entry> pairs_;
  std::map<std::string, std::size_t> index_;
  mutable std::mutex mu_;
  std::map<std::string, quality::QualityLabel> labels_;
  std::vector<std::string> label_order_;  // first-appearance order
};

// HTTP front end for CurationService.
class CurationServer {
 public:
  explicit CurationServer(CurationService& service);
  ~CurationServer();
  CurationServer(const CurationServer&) = delete;
  CurationServer& operator=(const CurationServer&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks until stop() is called from elsewhere.
  void listen(const std::string& host, int port);
  void stop();

 private:
  CurationService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace srlproj::pipeline
