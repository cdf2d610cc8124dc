#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "srlproj/error.hpp"
#include "srlproj/tree.hpp"
#include "srlproj/types.hpp"

using namespace srlproj;

namespace {

AnnotatedSentence chain(std::vector<int> heads) {
  AnnotatedSentence s;
  s.id = "t";
  for (int i = 0; i < static_cast<int>(heads.size()); ++i) {
    Token t;
    t.index = i;
    t.form = "w" + std::to_string(i);
    t.head = heads[i];
    s.tokens.push_back(t);
  }
  return s;
}

}  // namespace

TEST_CASE("span predicates") {
  const Span s{2, 4};
  CHECK(s.width() == 3);
  CHECK(s.contains(2));
  CHECK(s.contains(4));
  CHECK_FALSE(s.contains(5));
  CHECK(s.contains(Span{3, 4}));
  CHECK_FALSE(s.contains(Span{3, 5}));
  CHECK(s.overlaps(Span{4, 9}));
  CHECK_FALSE(s.overlaps(Span{5, 9}));
  CHECK(Span{1, 2} < Span{1, 3});
}

TEST_CASE("normalize sorts and deduplicates links") {
  Alignment a = {{2, 1}, {0, 0}, {2, 1}, {1, 3}};
  normalize(a);
  CHECK(a == Alignment{{0, 0}, {1, 3}, {2, 1}});
}

TEST_CASE("validate accepts a well-formed tree") {
  // w0 <- w1 (root) -> w2 -> w3
  CHECK_NOTHROW(validate(chain({1, kRoot, 1, 2})));
}

TEST_CASE("validate rejects malformed sentences") {
  CHECK_THROWS_AS(validate(chain({kRoot, kRoot})), ParseError);   // two roots
  CHECK_THROWS_AS(validate(chain({1, 0, kRoot})), ParseError);    // cycle
  CHECK_THROWS_AS(validate(chain({5, kRoot})), ParseError);       // head out of range
  CHECK_THROWS_AS(validate(chain({0})), ParseError);              // self loop

  AnnotatedSentence s = chain({1, kRoot, 1});
  s.tokens[2].index = 5;
  CHECK_THROWS_AS(validate(s), ParseError);

  s = chain({1, kRoot, 1});
  s.mwt = {{0, 1, "ab"}, {1, 2, "bc"}};
  CHECK_THROWS_AS(validate(s), ParseError);

  s = chain({1, kRoot, 1});
  s.frames = {{"F", {0, 3}, "x.v", {}}};
  CHECK_THROWS_AS(validate(s), ParseError);

  s = chain({1, kRoot, 1});
  s.frames = {{"F", {1, 1}, "x.v", {{"A", {0, 0}, true}, {"A", {2, 2}, true}}}};
  CHECK_THROWS_AS(validate(s), ParseError);
}

TEST_CASE("validate checks pair links and score") {
  SentencePair p;
  p.id = "p";
  p.source = chain({kRoot, 0});
  p.target = chain({kRoot});
  p.alignment = {{1, 0}};
  CHECK_NOTHROW(validate(p));
  p.alignment = {{2, 0}};
  CHECK_THROWS_AS(validate(p), ConfigError);
  p.alignment = {{0, 0}};
  p.score = 1.5;
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("tree queries") {
  // w0 <- w1 (root) -> w3 -> w2 ; w3 -> w4
  const AnnotatedSentence s = chain({1, kRoot, 3, 1, 3});
  const DependencyTree tree(s);
  CHECK(tree.root() == 1);
  CHECK(tree.descendants(3) == std::vector<int>{2, 3, 4});
  CHECK(tree.yield(3) == Span{2, 4});
  CHECK(tree.yield(1) == Span{0, 4});
  CHECK(tree.span_head({2, 4}) == 3);
  CHECK(tree.span_head({0, 2}) == std::nullopt);  // w0 and w2 both attach outside
  CHECK(tree.depth() == 2);
}

TEST_CASE("yield of a non-projective subtree is not a span") {
  // w0 -> w2, w1 is root child elsewhere: w1 (root) -> w0 -> w2
  const AnnotatedSentence s = chain({1, kRoot, 0});
  CHECK(DependencyTree(s).yield(0) == std::nullopt);
}

TEST_CASE("trim_edge") {
  CHECK(trim_edge({2, 5}, 7) == Span{2, 5});
  CHECK(trim_edge({2, 5}, 2) == Span{3, 5});
  CHECK(trim_edge({2, 5}, 5) == Span{2, 4});
  CHECK(trim_edge({2, 5}, 3) == std::nullopt);
  CHECK(trim_edge({4, 4}, 4) == std::nullopt);
}

TEST_CASE("random projective trees have contiguous yields everywhere") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const AnnotatedSentence s = testing::random_projective_tree(rng, 1 + static_cast<int>(rng() % 12));
    CHECK_NOTHROW(validate(s));
    const DependencyTree tree(s);
    for (int i = 0; i < s.size(); ++i) {
      const auto y = tree.yield(i);
      REQUIRE(y);
      CHECK(tree.span_head(*y) == i);
    }
  }
}
