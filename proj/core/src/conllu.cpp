#include <algorithm>
#include <sstream>

#include "srlproj/error.hpp"
#include "srlproj/io.hpp"

namespace srlproj::io {

namespace {

std::string field(std::string_view v) { return v == "_" ? std::string() : std::string(v); }
std::string cell(const std::string& v) { return v.empty() ? "_" : v; }

struct Block {
  std::size_t first_line = 0;
  std::string sent_id;
  AnnotatedSentence sentence;
  bool failed = false;
  std::string error;
};

}  // namespace

ConlluResult parse_conllu(std::istream& in, const ConlluOptions& opts) {
  ConlluResult result;
  Block block;
  std::size_t line_no = 0;
  std::size_t position = 0;

  auto fail = [&](const std::string& msg, std::size_t line) {
    if (opts.mode == ParseMode::Strict) throw ParseError(msg, line);
    if (!block.failed) {
      block.failed = true;
      block.error = "line " + std::to_string(line) + ": " + msg;
    }
  };

  auto flush = [&] {
    if (block.first_line == 0) return;
    if (!block.failed && block.sentence.tokens.empty() && block.sentence.mwt.empty()) {
      block = Block{};  // comment-only block
      return;
    }
    ++position;
    AnnotatedSentence& s = block.sentence;
    s.id = block.sent_id.empty() ? opts.id_prefix + std::to_string(position) : block.sent_id;
    s.lang = opts.lang;
    if (!block.failed) {
      if (s.tokens.empty()) {
        fail("sentence without syntactic words", block.first_line);
      } else {
        try {
          validate(s);
        } catch (const ParseError& e) {
          fail(e.what(), block.first_line);
        }
      }
    }
    if (block.failed) {
      ++result.skipped;
      result.errors.push_back(block.error);
    } else {
      result.sentences.push_back(std::move(s));
    }
    block = Block{};
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (block.first_line == 0) block.first_line = line_no;
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      if (body.starts_with("sent_id")) {
        std::string_view rest = trim(body.substr(7));
        if (!rest.empty() && rest.front() == '=') rest = trim(rest.substr(1));
        block.sent_id = std::string(rest);
      }
      continue;
    }
    if (block.failed) continue;

    auto cols = split(line, '\t');
    if (cols.size() != 10) {
      fail("expected 10 tab-separated columns, found " + std::to_string(cols.size()), line_no);
      continue;
    }
    std::string_view id = cols[0];
    if (id.find('.') != std::string_view::npos) continue;  // empty node
    AnnotatedSentence& s = block.sentence;
    if (auto dash = id.find('-'); dash != std::string_view::npos) {
      int a = 0, b = 0;
      if (!parse_int(id.substr(0, dash), a) || !parse_int(id.substr(dash + 1), b) || a < 1 || b < a) {
        fail("malformed multiword range '" + std::string(id) + "'", line_no);
        continue;
      }
      if (a != s.size() + 1) {
        fail("multiword range '" + std::string(id) + "' does not start at the next word", line_no);
        continue;
      }
      s.mwt.push_back({a - 1, b - 1, std::string(cols[1])});
      continue;
    }
    int index = 0;
    if (!parse_int(id, index)) {
      fail("non-numeric token id '" + std::string(id) + "'", line_no);
      continue;
    }
    if (index != s.size() + 1) {
      fail("token id " + std::to_string(index) + " out of sequence", line_no);
      continue;
    }
    int head = 0;
    if (!parse_int(cols[6], head) || head < 0) {
      fail("non-numeric head '" + std::string(cols[6]) + "'", line_no);
      continue;
    }
    if (head == index) {
      fail("token " + std::to_string(index) + " is its own head", line_no);
      continue;
    }
    Token t;
    t.index = index - 1;
    t.form = std::string(cols[1]);
    t.lemma = field(cols[2]);
    t.upos = field(cols[3]);
    t.xpos = field(cols[4]);
    t.feats = field(cols[5]);
    t.head = head == 0 ? kRoot : head - 1;
    t.deprel = field(cols[7]);
    t.deps = field(cols[8]);
    t.misc = field(cols[9]);
    s.tokens.push_back(std::move(t));
  }
  flush();
  return result;
}

ConlluResult parse_conllu(std::string_view text, const ConlluOptions& opts) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in, opts);
}

void write_conllu(std::ostream& out, const AnnotatedSentence& s) {
  if (!s.id.empty()) out << "# sent_id = " << s.id << '\n';
  std::vector<MultiWordSpan> mwt = s.mwt;
  std::sort(mwt.begin(), mwt.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  auto next = mwt.begin();
  for (const Token& t : s.tokens) {
    if (next != mwt.end() && next->start == t.index) {
      out << next->start + 1 << '-' << next->end + 1 << '\t' << next->surface << "\t_\t_\t_\t_\t_\t_\t_\t_\n";
      ++next;
    }
    out << t.index + 1 << '\t' << t.form << '\t' << cell(t.lemma) << '\t' << cell(t.upos) << '\t'
        << cell(t.xpos) << '\t' << cell(t.feats) << '\t' << (t.head == kRoot ? 0 : t.head + 1) << '\t'
        << cell(t.deprel) << '\t' << cell(t.deps) << '\t' << cell(t.misc) << '\n';
  }
  out << '\n';
}

std::string write_conllu(std::span<const AnnotatedSentence> sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) write_conllu(out, s);
  return out.str();
}

}  // namespace srlproj::io
