#include <random>

#include "doctest.h"
#include "srlproj/utf8.hpp"

using namespace srlproj;

TEST_CASE("decode and encode round-trip across all sequence lengths") {
  const std::u32string cps = {U'a', U'é', U'א', U'€', U'\U0001d11e', U'\U0010ffff'};
  const std::string bytes = utf8::encode(cps);
  CHECK(bytes.size() == 1 + 2 + 2 + 3 + 4 + 4);
  auto back = utf8::decode(bytes);
  REQUIRE(back);
  CHECK(*back == cps);
}

TEST_CASE("strict decode rejects malformed input") {
  CHECK_FALSE(utf8::decode("\xc3"));              // truncated
  CHECK_FALSE(utf8::decode("\xe2\x82"));          // truncated
  CHECK_FALSE(utf8::decode("\xc0\xaf"));          // overlong
  CHECK_FALSE(utf8::decode("\xed\xa0\x80"));      // surrogate
  CHECK_FALSE(utf8::decode("\xf4\x90\x80\x80"));  // above U+10FFFF
  CHECK_FALSE(utf8::decode("\x80"));              // stray continuation
  CHECK_FALSE(utf8::decode("\xff"));
  CHECK(utf8::is_valid(""));
  CHECK(utf8::is_valid("plain ascii"));
}

TEST_CASE("lossy decode drops bad bytes and keeps the rest") {
  CHECK(utf8::decode_lossy("a\xff" "b\xc3") == U"ab");
  CHECK(utf8::decode_lossy("\xd7\x90\x80") == U"א");
}

TEST_CASE("lossy decode never fails on random bytes") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 2000; ++k) {
    std::string s(rng() % 16, '\0');
    for (char& c : s) c = static_cast<char>(rng() & 0xff);
    const std::u32string cps = utf8::decode_lossy(s);
    CHECK(utf8::is_valid(utf8::encode(cps)));
    CHECK(cps.size() <= s.size());
  }
}

TEST_CASE("to_lower_ascii leaves non-ASCII bytes alone") {
  CHECK(utf8::to_lower_ascii("AbC \xd7\x90Z") == "abc \xd7\x90z");
}
