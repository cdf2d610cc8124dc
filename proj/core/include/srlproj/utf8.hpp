#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace srlproj::utf8 {

// Strict decoding: rejects overlong forms, surrogates and code points past
// U+10FFFF.
std::optional<std::u32string> decode(std::string_view bytes);

// Decodes what it can, dropping bytes that do not form a valid sequence.
std::u32string decode_lossy(std::string_view bytes);

bool is_valid(std::string_view bytes);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

std::string to_lower_ascii(std::string_view s);

}  // namespace srlproj::utf8
