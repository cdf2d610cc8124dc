#include "srlproj/error.hpp"
#include "srlproj/io.hpp"

namespace srlproj::io {

Alignment parse_pharaoh(std::string_view line, int src_len, int tgt_len) {
  Alignment links;
  for (std::string_view item : split_whitespace(strip_cr(line))) {
    const auto dash = item.find('-');
    int i = 0, j = 0;
    if (dash == std::string_view::npos || !parse_int(item.substr(0, dash), i) || !parse_int(item.substr(dash + 1), j) ||
        i < 0 || j < 0) {
      throw ParseError("malformed alignment link '" + std::string(item) + "'");
    }
    if (i >= src_len || j >= tgt_len) {
      throw ParseError("alignment link '" + std::string(item) + "' exceeds sentence lengths (" +
                       std::to_string(src_len) + ", " + std::to_string(tgt_len) + ")");
    }
    links.push_back({i, j});
  }
  normalize(links);
  return links;
}

std::string format_pharaoh(const Alignment& a) {
  std::string out;
  for (const AlignmentLink& l : a) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(l.source);
    out.push_back('-');
    out += std::to_string(l.target);
  }
  return out;
}

}  // namespace srlproj::io
