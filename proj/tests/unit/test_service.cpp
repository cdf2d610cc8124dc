#include <filesystem>

#include "doctest.h"
#include "generators.hpp"
#include "httplib.h"
#include "json.hpp"
#include "srlproj/io.hpp"
#include "srlproj/pipeline/config.hpp"
#include "srlproj/pipeline/service.hpp"
#include "srlproj/pipeline/stages.hpp"

using namespace srlproj;
using namespace srlproj::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

PipelineConfig prepared(const std::string& tag) {
  const auto files = testing::write_mini_corpus(testing::temp_dir(tag), 21, 200);
  PipelineConfig c = load_config(files.config.string());
  c.labels = (files.dir / "out" / "review.tsv").string();
  fs::create_directories(c.out_dir);
  for (const char* stage : {"filter-lang", "align", "project"}) run_stage(c, stage);
  return c;
}

}  // namespace

TEST_CASE("service requires the projection artifact") {
  PipelineConfig c;
  c.out_dir = testing::temp_dir("noproj").string();
  CHECK_THROWS_AS(CurationService{c}, PrerequisiteError);
}

TEST_CASE("service methods") {
  const PipelineConfig c = prepared("svc");
  CurationService svc(c);
  REQUIRE(svc.size() > 5);

  const json page = json::parse(svc.list_pairs(2, 3).body);
  CHECK(page.at("total") == svc.size());
  CHECK(page.at("items").size() == 3);
  CHECK(json::parse(svc.list_pairs(0, 100000).body).at("limit") == CurationService::kMaxLimit);

  const std::string id = page["items"][0]["id"];
  CHECK(svc.get_pair(id).status == 200);
  CHECK(svc.get_pair("pair-999999").status == 404);

  CHECK(svc.post_label(id, "Meh").status == 400);
  const json bad = json::parse(svc.post_label(id, "Meh").body);
  CHECK(bad.at("valid_labels").size() == 6);
  CHECK(svc.post_label("pair-999999", "Good").status == 404);
  CHECK(svc.post_label(id, "Good").status == 200);
  CHECK(svc.post_label(id, R"({"label":"PoorTranslation"})").status == 200);
  CHECK(svc.post_label(id, R"("Good")").status == 200);

  const json stats = json::parse(svc.stats().body);
  CHECK(stats.at("labeled") == 1);
  CHECK(stats.at("labels").at("Good") == 1);
  CHECK(stats.at("labels").at("PoorTranslation") == 0);

  const Response exported = svc.export_labels();
  CHECK(exported.content_type.find("tab-separated") != std::string::npos);
  CHECK(exported.body == id + "\tGood\n");
}

TEST_CASE("http api round trip and durability") {
  const PipelineConfig c = prepared("http");
  const auto projected = io::parse_frames_jsonl(read_file(c.out("projected.jsonl")));
  const std::string id = projected.order.at(0);

  {
    CurationService svc(c);
    CurationServer server(svc);
    const int port = server.start("127.0.0.1", 0);
    REQUIRE(port > 0);
    httplib::Client cli("127.0.0.1", port);

    auto r = cli.Get("/api/stats");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body).at("labeled") == 0);

    r = cli.Get("/api/pairs?offset=0&limit=5");
    REQUIRE(r);
    CHECK(json::parse(r->body).at("items").size() == std::min<std::size_t>(5, svc.size()));

    r = cli.Get("/api/pairs/" + id);
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const json payload = json::parse(r->body);
    const auto& frames = projected.frames.at(id);
    REQUIRE(payload.at("projected_frames").size() == frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const json& f = payload["projected_frames"][k];
      CHECK(f.at("target").at("start") == frames[k].target.start);
      CHECK(f.at("target").at("end") == frames[k].target.end);
      REQUIRE(f.at("elements").size() == frames[k].elements.size());
      for (std::size_t e = 0; e < frames[k].elements.size(); ++e) {
        CHECK(f["elements"][e].at("start") == frames[k].elements[e].span.start);
        CHECK(f["elements"][e].at("end") == frames[k].elements[e].span.end);
      }
    }
    CHECK(payload.at("target").at("tokens").size() > 0);
    CHECK(payload.at("features").size() == 8);

    CHECK(cli.Get("/api/pairs/nope")->status == 404);
    CHECK(cli.Post("/api/pairs/" + id + "/label", "Meh", "text/plain")->status == 400);
    r = cli.Post("/api/pairs/" + id + "/label", "Good", "text/plain");
    REQUIRE(r);
    CHECK(r->status == 200);
    r = cli.Get("/api/export/labels");
    REQUIRE(r);
    CHECK(r->body.find(id + "\tGood\n") != std::string::npos);
    server.stop();
  }

  // a fresh service sees the persisted label
  CurationService svc(c);
  CurationServer server(svc);
  const int port = server.start("127.0.0.1", 0);
  httplib::Client cli("127.0.0.1", port);
  auto r = cli.Get("/api/export/labels");
  REQUIRE(r);
  CHECK(r->body.find(id + "\tGood\n") != std::string::npos);
  CHECK(json::parse(cli.Get("/api/stats")->body).at("labels").at("Good") == 1);
  server.stop();
}
