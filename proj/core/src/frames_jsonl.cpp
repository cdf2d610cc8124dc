#include <set>
#include <sstream>

#include "json.hpp"
#include "srlproj/error.hpp"
#include "srlproj/io.hpp"

namespace srlproj::io {

namespace {

using nlohmann::json;

struct RecordError {
  std::string message;
};

int get_index(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw RecordError{std::string("missing integer field '") + key + "'"};
  }
  const auto v = it->get<long long>();
  if (v < 0 || v > 1'000'000) throw RecordError{std::string("field '") + key + "' out of range"};
  return static_cast<int>(v);
}

std::string get_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw RecordError{std::string("missing string field '") + key + "'"};
  return it->get<std::string>();
}

Span get_span(const json& obj, int length) {
  Span s{get_index(obj, "start"), get_index(obj, "end")};
  if (s.end < s.start) throw RecordError{"span end precedes start"};
  if (length >= 0 && s.end >= length) {
    throw RecordError{"span " + std::to_string(s.start) + ".." + std::to_string(s.end) +
                      " exceeds sentence length " + std::to_string(length)};
  }
  return s;
}

FrameAnnotation parse_frame(const json& f, int length) {
  if (!f.is_object()) throw RecordError{"frame is not an object"};
  FrameAnnotation out;
  out.frame = get_string(f, "frame");
  auto target = f.find("target");
  if (target == f.end() || !target->is_object()) throw RecordError{"frame " + out.frame + " lacks a target"};
  out.target = get_span(*target, length);
  out.lu = get_string(f, "lu");
  auto elements = f.find("elements");
  if (elements == f.end()) return out;
  if (!elements->is_array()) throw RecordError{"elements is not an array"};
  std::set<std::string> seen;
  for (const json& e : *elements) {
    if (!e.is_object()) throw RecordError{"element is not an object"};
    FrameElement fe;
    fe.name = get_string(e, "name");
    fe.span = get_span(e, length);
    auto core = e.find("core");
    if (core == e.end() || !core->is_boolean()) throw RecordError{"element " + fe.name + " lacks boolean 'core'"};
    fe.core = core->get<bool>();
    if (!seen.insert(fe.name).second) {
      throw RecordError{"duplicate element " + fe.name + " in frame " + out.frame};
    }
    out.elements.push_back(std::move(fe));
  }
  return out;
}

}  // namespace

FramesResult parse_frames_jsonl(std::istream& in, const FramesOptions& opts) {
  FramesResult result;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(strip_cr(raw));
    if (line.empty()) continue;
    std::string id;
    try {
      json record = json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.is_object()) throw RecordError{"not a JSON object"};
      id = get_string(record, "id");
      int length = -1;
      if (opts.sentence_lengths) {
        auto it = opts.sentence_lengths->find(id);
        if (it == opts.sentence_lengths->end()) throw RecordError{"unknown sentence id"};
        length = it->second;
      }
      auto frames = record.find("frames");
      if (frames == record.end() || !frames->is_array()) throw RecordError{"missing 'frames' array"};
      std::vector<FrameAnnotation> parsed;
      for (const json& f : *frames) parsed.push_back(parse_frame(f, length));
      if (result.frames.contains(id)) throw RecordError{"duplicate record"};
      result.frames.emplace(id, std::move(parsed));
      result.order.push_back(id);
    } catch (const RecordError& e) {
      std::string msg = (id.empty() ? std::string("record") : "record " + id) + ": " + e.message;
      if (opts.mode == ParseMode::Strict) throw ParseError(msg, line_no);
      ++result.dropped;
      result.errors.push_back("line " + std::to_string(line_no) + ": " + msg);
    } catch (const json::exception& e) {
      std::string msg = (id.empty() ? std::string("record") : "record " + id) + ": " + e.what();
      if (opts.mode == ParseMode::Strict) throw ParseError(msg, line_no);
      ++result.dropped;
      result.errors.push_back("line " + std::to_string(line_no) + ": " + msg);
    }
  }
  return result;
}

FramesResult parse_frames_jsonl(std::string_view text, const FramesOptions& opts) {
  std::istringstream in{std::string(text)};
  return parse_frames_jsonl(in, opts);
}

std::string format_frames_record(const std::string& id, std::span<const FrameAnnotation> frames) {
  nlohmann::ordered_json record;
  record["id"] = id;
  record["frames"] = nlohmann::ordered_json::array();
  for (const FrameAnnotation& f : frames) {
    nlohmann::ordered_json jf;
    jf["frame"] = f.frame;
    jf["target"] = {{"start", f.target.start}, {"end", f.target.end}};
    jf["lu"] = f.lu;
    jf["elements"] = nlohmann::ordered_json::array();
    for (const FrameElement& e : f.elements) {
      jf["elements"].push_back({{"name", e.name}, {"start", e.span.start}, {"end", e.span.end}, {"core", e.core}});
    }
    record["frames"].push_back(std::move(jf));
  }
  return record.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

}  // namespace srlproj::io
