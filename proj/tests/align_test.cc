// Copyright 2026 The X-Claim Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xclaim/align.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "xclaim/error.h"

namespace xclaim {
namespace {

// Per-cell softmax product written out directly, without max shifting.
AlignmentLinks BruteForceLinks(const Matrix& sim, double tau, double temp) {
  AlignmentLinks links;
  for (int i = 0; i < sim.rows(); ++i) {
    for (int j = 0; j < sim.cols(); ++j) {
      double row_sum = 0, col_sum = 0;
      for (int k = 0; k < sim.cols(); ++k) row_sum += std::exp(sim(i, k) / temp);
      for (int k = 0; k < sim.rows(); ++k) col_sum += std::exp(sim(k, j) / temp);
      const double cell = std::exp(sim(i, j) / temp);
      if ((cell / row_sum) * (cell / col_sum) > tau) links.insert({i, j});
    }
  }
  return links;
}

Matrix RandomMatrix(std::mt19937& rng, int max_side) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  const int m = side(rng), n = side(rng);
  Matrix sim(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) sim(i, j) = value(rng);
  return sim;
}

std::vector<Token> Toks(const std::vector<std::string>& words) {
  std::vector<Token> out;
  int pos = 0;
  for (const auto& w : words) {
    const int len = static_cast<int>(w.size());
    out.push_back({w, pos, pos + len});
    pos += len + 1;
  }
  return out;
}

SentenceSpan SentenceOf(int n) {
  std::vector<std::string> words;
  for (int i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  SentenceSpan s;
  s.tokens = Toks(words);
  s.start_char = s.tokens.front().start_char;
  s.end_char = s.tokens.back().end_char;
  return s;
}

AlignmentLinks ToSentence(std::initializer_list<int> js) {
  AlignmentLinks links;
  int i = 0;
  for (int j : js) links.insert({i++, j});
  return links;
}

TEST(ExtractLinksTest, OneByOneIsLinked) {
  EXPECT_EQ(ExtractLinks(Matrix(1, 1, 0.3)), (AlignmentLinks{{0, 0}}));
}

TEST(ExtractLinksTest, IdentityMatrixLinksDiagonal) {
  const Matrix sim(2, 2, std::vector<double>{1, 0, 0, 1});
  EXPECT_EQ(ExtractLinks(sim, {0.001, 0.05}), BruteForceLinks(sim, 0.001, 0.05));
  EXPECT_EQ(ExtractLinks(sim, {0.001, 0.05}), (AlignmentLinks{{0, 0}, {1, 1}}));
}

TEST(ExtractLinksTest, UniformMatrixAgainstThreshold) {
  // Every cell gets (1/3) * (1/4) = 1/12.
  const Matrix sim(3, 4, 0.5);
  EXPECT_TRUE(ExtractLinks(sim, {0.1, 0.05}).empty());
  EXPECT_EQ(ExtractLinks(sim, {0.08, 0.05}).size(), 12u);
}

TEST(ExtractLinksTest, RejectsBadInput) {
  Matrix sim(2, 2, 0.0);
  sim(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ExtractLinks(sim), ValidationError);
  sim(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ExtractLinks(sim), ValidationError);
  EXPECT_THROW(ExtractLinks(Matrix(0, 3)), ValidationError);
  EXPECT_THROW(ExtractLinks(Matrix(1, 1), {1.5, 0.05}), ConfigError);
  EXPECT_THROW(ExtractLinks(Matrix(1, 1), {0.001, 0.0}), ConfigError);
}

TEST(ExtractLinksProperty, MatchesBruteForce) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix sim = RandomMatrix(rng, 6);
    ASSERT_EQ(ExtractLinks(sim), BruteForceLinks(sim, 0.001, 0.05));
  }
}

TEST(ExtractLinksProperty, ShiftInvariant) {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> offset(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix sim = RandomMatrix(rng, 6);
    const double c = offset(rng);
    Matrix shifted(sim.rows(), sim.cols());
    for (int i = 0; i < sim.rows(); ++i)
      for (int j = 0; j < sim.cols(); ++j) shifted(i, j) = sim(i, j) + c;
    ASSERT_EQ(ExtractLinks(shifted), ExtractLinks(sim));
  }
}

TEST(LevenshteinTest, Colour) {
  EXPECT_NEAR(LevenshteinSimilarity("colour", "color"), 1 - 1.0 / 6, 1e-12);
  EXPECT_DOUBLE_EQ(LevenshteinSimilarity("Same", "same"), 1.0);
}

TEST(LexicalAlignTest, IdentityLinks) {
  const auto x = Toks({"a", "claim", "here"});
  EXPECT_EQ(LexicalAlign(x, x), (AlignmentLinks{{0, 0}, {1, 1}, {2, 2}}));
}

TEST(LexicalAlignTest, FuzzyMatch) {
  EXPECT_EQ(LexicalAlign(Toks({"colour"}), Toks({"the", "color"})),
            (AlignmentLinks{{0, 1}}));
}

TEST(LexicalAlignTest, DisjointAndEmpty) {
  EXPECT_TRUE(LexicalAlign(Toks({"apple"}), Toks({"zebra", "mango"})).empty());
  EXPECT_TRUE(LexicalAlign({}, Toks({"a"})).empty());
  EXPECT_TRUE(LexicalAlign(Toks({"a"}), {}).empty());
}

TEST(LexicalAlignTest, ExactMatchesBeatFuzzyAndAreOneToOne) {
  // "claims" would fuzz-match "claim", but "claim" has an exact partner.
  EXPECT_EQ(LexicalAlign(Toks({"claim", "claim"}), Toks({"Claim", "claims"})),
            (AlignmentLinks{{0, 0}, {1, 1}}));
  EXPECT_EQ(LexicalAlign(Toks({"a", "a"}), Toks({"a"})), (AlignmentLinks{{0, 0}}));
}

TEST(LexicalAlignProperty, SelfAlignmentIsIdentity) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> words;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) words.push_back("tok" + std::to_string(i * 7 + trial));
    const auto x = Toks(words);
    AlignmentLinks identity;
    for (int i = 0; i < n; ++i) identity.insert({i, i});
    ASSERT_EQ(LexicalAlign(x, x), identity);
  }
}

TEST(PharaohTest, ParsesPairs) {
  EXPECT_EQ(ParseLinks("0-0 1-2"), (AlignmentLinks{{0, 0}, {1, 2}}));
  EXPECT_TRUE(ParseLinks("").empty());
  EXPECT_TRUE(ParseLinks("   ").empty());
}

TEST(PharaohTest, MalformedPairCarriesLineNumber) {
  std::istringstream in("0-0\n0-x\n");
  try {
    ReadLinks(in, "a.pharaoh");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  for (const char* bad : {"0-", "-1", "1--2", "a-b", "1-2-3", "01", "-1-2"}) {
    EXPECT_THROW(ParseLinks(bad), ParseError) << bad;
  }
}

TEST(PharaohProperty, WriteThenReadIsIdentity) {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AlignmentLinks> records(rng() % 6);
    for (auto& links : records) {
      for (int k = 0, n = static_cast<int>(rng() % 5); k < n; ++k) {
        links.insert({static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)});
      }
    }
    std::stringstream buffer;
    WriteLinks(buffer, records);
    ASSERT_EQ(ReadLinks(buffer, "rt"), records);
  }
}

TEST(DeriveSpanTest, FirstLastCoversGap) {
  const SentenceSpan s = SentenceOf(9);
  const ClaimSpan span = DeriveSpanFirstLast(ToSentence({2, 5, 7}), s);
  EXPECT_EQ(span, (ClaimSpan{s.tokens[2].start_char, s.tokens[7].end_char}));
}

TEST(DeriveSpanTest, SingleIndex) {
  const SentenceSpan s = SentenceOf(5);
  EXPECT_EQ(DeriveSpanFirstLast(ToSentence({3}), s),
            (ClaimSpan{s.tokens[3].start_char, s.tokens[3].end_char}));
  EXPECT_EQ(DeriveSpanLongestContiguous(ToSentence({4}), s),
            (ClaimSpan{s.tokens[4].start_char, s.tokens[4].end_char}));
}

TEST(DeriveSpanTest, EmptyLinksIsNoAlignment) {
  const SentenceSpan s = SentenceOf(3);
  EXPECT_THROW(DeriveSpanFirstLast({}, s, "id"), NoAlignmentError);
  EXPECT_THROW(DeriveSpanLongestContiguous({}, s, "id"), NoAlignmentError);
}

TEST(DeriveSpanTest, OutOfRangeIndexIsValidationError) {
  EXPECT_THROW(DeriveSpanFirstLast(ToSentence({5}), SentenceOf(3)), ValidationError);
}

TEST(DeriveSpanTest, LongestContiguous) {
  const SentenceSpan s = SentenceOf(9);
  EXPECT_EQ(DeriveSpanLongestContiguous(ToSentence({2, 3, 7}), s),
            (ClaimSpan{s.tokens[2].start_char, s.tokens[3].end_char}));
  // Tie between {2,3} and {6,7}: earliest wins.
  EXPECT_EQ(DeriveSpanLongestContiguous(ToSentence({2, 3, 6, 7}), s),
            (ClaimSpan{s.tokens[2].start_char, s.tokens[3].end_char}));
}

TEST(DeriveSpanTest, ManyToManyUsesSentenceSide) {
  const SentenceSpan s = SentenceOf(6);
  const AlignmentLinks links = {{0, 1}, {0, 2}, {1, 2}, {3, 4}};
  EXPECT_EQ(DeriveSpanFirstLast(links, s),
            (ClaimSpan{s.tokens[1].start_char, s.tokens[4].end_char}));
  EXPECT_EQ(DeriveSpanLongestContiguous(links, s),
            (ClaimSpan{s.tokens[1].start_char, s.tokens[2].end_char}));
}

TEST(DeriveSpanProperty, FirstLastContainsLongestContiguous) {
  std::mt19937 rng(47);
  const SentenceSpan s = SentenceOf(30);
  for (int trial = 0; trial < 1000; ++trial) {
    AlignmentLinks links;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 10); k < n; ++k) {
      links.insert({static_cast<int>(rng() % 10), static_cast<int>(rng() % 30)});
    }
    const ClaimSpan outer = DeriveSpanFirstLast(links, s);
    const ClaimSpan inner = DeriveSpanLongestContiguous(links, s);
    ASSERT_LE(outer.start_char, inner.start_char);
    ASSERT_GE(outer.end_char, inner.end_char);
  }
}

}  // namespace
}  // namespace xclaim
