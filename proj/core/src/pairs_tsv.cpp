#include <sstream>

#include "srlproj/io.hpp"
#include "srlproj/utf8.hpp"

namespace srlproj::io {

PairsResult read_pairs_tsv(std::istream& in) {
  PairsResult result;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (!utf8::is_valid(line)) {
      ++result.skipped_encoding;
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 2) {
      ++result.skipped_columns;
      continue;
    }
    result.pairs.push_back({"pair-" + std::to_string(line_no), std::string(cols[0]), std::string(cols[1])});
  }
  return result;
}

PairsResult read_pairs_tsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_pairs_tsv(in);
}

}  // namespace srlproj::io
