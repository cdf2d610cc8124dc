#include <algorithm>
#include <set>
#include <sstream>

#include "srlproj/error.hpp"
#include "srlproj/io.hpp"
#include "srlproj/tree.hpp"

namespace srlproj::io {

namespace {

constexpr std::size_t kFixedColumns = 14;

std::string cell(const std::string& v) { return v.empty() ? "_" : v; }
std::string field(std::string_view v) { return v == "_" ? std::string() : std::string(v); }

}  // namespace

void write_conll2009(std::ostream& out, const Conll09Sentence& cs) {
  const AnnotatedSentence& s = cs.sentence;
  const int n = s.size();
  DependencyTree tree(s);

  std::vector<const PropBankInstance*> preds;
  for (const auto& p : cs.predicates) preds.push_back(&p);
  std::sort(preds.begin(), preds.end(), [](auto* a, auto* b) { return a->predicate < b->predicate; });

  // rows[token][column] -> label
  std::vector<std::vector<std::string>> apred(n, std::vector<std::string>(preds.size()));
  std::vector<const PropBankInstance*> pred_at(n, nullptr);
  for (std::size_t c = 0; c < preds.size(); ++c) {
    const PropBankInstance& p = *preds[c];
    if (p.predicate < 0 || p.predicate >= n) {
      throw Error("sentence " + s.id + ": predicate index " + std::to_string(p.predicate) + " out of range");
    }
    if (pred_at[p.predicate]) {
      throw Error("sentence " + s.id + ": two predicates on token " + std::to_string(p.predicate));
    }
    pred_at[p.predicate] = &p;
    std::set<int> numbers;
    for (std::size_t a = 0; a < p.args.size(); ++a) {
      const PropBankArgument& arg = p.args[a];
      if (!s.valid_span(arg.span)) throw Error("sentence " + s.id + ": argument span out of range");
      if (arg.span.contains(p.predicate)) throw Error("sentence " + s.id + ": argument span covers its predicate");
      if (!numbers.insert(arg.number).second) throw Error("sentence " + s.id + ": repeated label " + arg.label());
      for (std::size_t b = 0; b < a; ++b) {
        if (arg.span.overlaps(p.args[b].span)) {
          throw Error("sentence " + s.id + ": overlapping argument spans for predicate " +
                      std::to_string(p.predicate));
        }
      }
      auto head = tree.span_head(arg.span);
      if (!head) throw Error("sentence " + s.id + ": argument " + arg.label() + " has no unique head");
      apred[*head][c] = arg.label();
    }
  }

  for (const Token& t : s.tokens) {
    const std::string head = std::to_string(t.head == kRoot ? 0 : t.head + 1);
    const PropBankInstance* p = pred_at[t.index];
    out << t.index + 1 << '\t' << t.form << '\t' << cell(t.lemma) << '\t' << cell(t.lemma) << '\t' << cell(t.upos)
        << '\t' << cell(t.upos) << '\t' << cell(t.feats) << '\t' << cell(t.feats) << '\t' << head << '\t' << head
        << '\t' << cell(t.deprel) << '\t' << cell(t.deprel) << '\t' << (p ? "Y" : "_") << '\t'
        << (p ? cell(p->sense) : "_");
    for (const std::string& label : apred[t.index]) out << '\t' << cell(label);
    out << '\n';
  }
  out << '\n';
}

std::string write_conll2009(std::span<const Conll09Sentence> sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) write_conll2009(out, s);
  return out.str();
}

std::vector<Conll09Sentence> parse_conll2009(std::istream& in) {
  std::vector<Conll09Sentence> out;
  std::vector<std::vector<std::string>> rows;
  std::size_t first_line = 0;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (rows.empty()) return;
    Conll09Sentence cs;
    cs.sentence.id = "sent-" + std::to_string(out.size() + 1);
    const std::size_t width = rows.front().size();
    std::vector<int> pred_rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& c = rows[r];
      const std::size_t line = first_line + r;
      if (c.size() != width) throw ParseError("inconsistent column count", line);
      int id = 0, head = 0;
      if (!parse_int(c[0], id) || id != static_cast<int>(r) + 1) throw ParseError("token id out of sequence", line);
      if (!parse_int(c[8], head) || head < 0 || head > static_cast<int>(rows.size())) {
        throw ParseError("malformed head '" + c[8] + "'", line);
      }
      Token t;
      t.index = id - 1;
      t.form = c[1];
      t.lemma = field(c[2]);
      t.upos = field(c[4]);
      t.feats = field(c[6]);
      t.head = head == 0 ? kRoot : head - 1;
      t.deprel = field(c[10]);
      cs.sentence.tokens.push_back(std::move(t));
      if (c[12] == "Y") {
        pred_rows.push_back(static_cast<int>(r));
      } else if (c[12] != "_") {
        throw ParseError("FILLPRED must be Y or _", line);
      }
    }
    if (width - kFixedColumns != pred_rows.size()) {
      throw ParseError("APRED column count does not match predicate count", first_line);
    }
    try {
      validate(cs.sentence);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), first_line);
    }
    DependencyTree tree(cs.sentence);
    for (std::size_t c = 0; c < pred_rows.size(); ++c) {
      PropBankInstance inst;
      inst.predicate = pred_rows[c];
      inst.sense = field(rows[inst.predicate][13]);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& label = rows[r][kFixedColumns + c];
        if (label == "_") continue;
        int number = 0;
        if (!label.starts_with("ARG") || !parse_int(std::string_view(label).substr(3), number) || number < 0) {
          throw ParseError("unsupported argument label '" + label + "'", first_line + r);
        }
        const int head = static_cast<int>(r);
        Span span{head, head};
        if (auto y = tree.yield(head)) {
          if (auto trimmed = trim_edge(*y, inst.predicate)) span = *trimmed;
        }
        inst.args.push_back({number, span});
      }
      std::sort(inst.args.begin(), inst.args.end(),
                [](const auto& a, const auto& b) { return a.number < b.number; });
      cs.predicates.push_back(std::move(inst));
    }
    out.push_back(std::move(cs));
    rows.clear();
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (rows.empty()) first_line = line_no;
    auto cols = split(line, '\t');
    if (cols.size() < kFixedColumns) {
      throw ParseError("expected at least 14 columns, found " + std::to_string(cols.size()), line_no);
    }
    rows.emplace_back(cols.begin(), cols.end());
  }
  flush();
  return out;
}

std::vector<Conll09Sentence> parse_conll2009(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conll2009(in);
}

}  // namespace srlproj::io
