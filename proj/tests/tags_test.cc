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

#include "xclaim/tags.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "xclaim/error.h"

namespace xclaim {
namespace {

// n single-character tokens "a b c ...": token i covers [2i, 2i+1).
std::vector<Token> Letters(int n) {
  std::vector<Token> tokens;
  for (int i = 0; i < n; ++i) {
    tokens.push_back({std::string(1, static_cast<char>('a' + i % 26)), 2 * i, 2 * i + 1});
  }
  return tokens;
}

ClaimSpan Over(int first, int last) { return {2 * first, 2 * last + 1}; }

TagSequence Tags(std::string_view letters) {
  TagSequence out;
  for (char c : letters) out.push_back(ParseLabel(std::string(1, c)));
  return out;
}

std::string Str(const TagSequence& tags) {
  std::string out;
  for (Label l : tags) out.push_back(LabelChar(l));
  return out;
}

TEST(SchemeTest, Names) {
  for (TagScheme s : {TagScheme::kIO, TagScheme::kBIO, TagScheme::kBEO, TagScheme::kBEIO}) {
    EXPECT_EQ(ParseScheme(SchemeName(s)), s);
  }
  EXPECT_EQ(ParseScheme("beio"), TagScheme::kBEIO);
  EXPECT_THROW(ParseScheme("BILOU"), ConfigError);
  EXPECT_THROW(ParseLabel("X"), ValidationError);
}

TEST(EncodeTest, Examples) {
  const auto tokens = Letters(4);
  const std::vector<ClaimSpan> spans = {Over(1, 2)};
  EXPECT_EQ(Str(Encode(tokens, spans, TagScheme::kIO)), "OIIO");
  EXPECT_EQ(Str(Encode(tokens, spans, TagScheme::kBIO)), "OBIO");
  EXPECT_EQ(Str(Encode(tokens, spans, TagScheme::kBEIO)), "OBEO");
  EXPECT_EQ(Str(Encode(Letters(3), std::vector<ClaimSpan>{Over(1, 1)}, TagScheme::kBEO)),
            "OBO");
}

TEST(EncodeTest, LongSpans) {
  const auto tokens = Letters(6);
  const std::vector<ClaimSpan> spans = {Over(1, 4)};
  EXPECT_EQ(Str(Encode(tokens, spans, TagScheme::kBEO)), "OBBBEO");
  EXPECT_EQ(Str(Encode(tokens, spans, TagScheme::kBEIO)), "OBIIEO");
  EXPECT_EQ(Str(Encode(tokens, std::vector<ClaimSpan>{Over(2, 2)}, TagScheme::kBEIO)),
            "OOBOOO");
}

TEST(EncodeTest, PartialTokenOverlapCounts) {
  const std::vector<Token> tokens = {{"hello", 0, 5}, {"world", 6, 11}};
  const std::vector<ClaimSpan> spans = {{3, 7}};
  EXPECT_EQ(Str(Encode(tokens, spans, TagScheme::kBIO)), "BI");
}

TEST(EncodeTest, Errors) {
  const auto tokens = Letters(4);
  EXPECT_THROW(Encode(tokens, std::vector<ClaimSpan>{Over(0, 1), Over(1, 2)}, TagScheme::kIO),
               ValidationError);
  // Covers only the space between tokens 0 and 1.
  EXPECT_THROW(Encode(tokens, std::vector<ClaimSpan>{{1, 2}}, TagScheme::kIO),
               ValidationError);
}

TEST(DecodeTest, Examples) {
  const auto tokens = Letters(4);
  const std::vector<ClaimSpan> middle = {Over(1, 2)};
  EXPECT_EQ(Decode(Tags("OIIO"), tokens, TagScheme::kIO), middle);
  EXPECT_EQ(Decode(Tags("OBIO"), tokens, TagScheme::kBIO), middle);
  const std::vector<ClaimSpan> two = {Over(0, 0), Over(2, 2)};
  EXPECT_EQ(Decode(Tags("IOI"), Letters(3), TagScheme::kIO), two);
}

TEST(DecodeTest, Repairs) {
  using R = std::vector<TokenRange>;
  EXPECT_EQ(DecodeRanges(Tags("OIIBI"), TagScheme::kBIO), (R{{1, 2}, {3, 4}}));
  EXPECT_EQ(DecodeRanges(Tags("EOIE"), TagScheme::kBEIO), (R{{0, 0}, {2, 3}}));
  EXPECT_EQ(DecodeRanges(Tags("BIIBE"), TagScheme::kBEIO), (R{{0, 2}, {3, 4}}));
  EXPECT_EQ(DecodeRanges(Tags("BBBE"), TagScheme::kBEO), (R{{0, 0}, {1, 1}, {2, 3}}));
  EXPECT_EQ(DecodeRanges(Tags("BOOE"), TagScheme::kBEO), (R{{0, 0}, {3, 3}}));
  EXPECT_THROW(DecodeRanges(Tags("OIO"), TagScheme::kBEO), ValidationError);
  EXPECT_THROW(DecodeRanges(Tags("OBO"), TagScheme::kIO), ValidationError);
  EXPECT_THROW(DecodeRanges(Tags("E"), TagScheme::kBIO), ValidationError);
  EXPECT_THROW(Decode(Tags("OO"), Letters(3), TagScheme::kIO), ValidationError);
}

// Random disjoint token ranges, sorted.
std::vector<TokenRange> RandomRanges(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> count(0, 4);
  std::vector<int> cuts;
  const int k = std::min(count(rng), n);
  std::vector<TokenRange> ranges;
  int pos = 0;
  for (int s = 0; s < k && pos < n; ++s) {
    const int start = std::uniform_int_distribution<int>(pos, std::min(n - 1, pos + 5))(rng);
    const int last = std::uniform_int_distribution<int>(start, std::min(n - 1, start + 6))(rng);
    ranges.push_back({start, last});
    pos = last + 1;
  }
  return ranges;
}

TEST(CodecPropertyTest, RoundTrip) {
  std::mt19937_64 rng(42);
  int adjacent_cases = 0;
  for (int t = 0; t < 3000; ++t) {
    const int n = std::uniform_int_distribution<int>(1, 50)(rng);
    const auto tokens = Letters(n);
    const std::vector<TokenRange> ranges = RandomRanges(rng, n);
    std::vector<ClaimSpan> spans;
    for (const TokenRange& r : ranges) spans.push_back(Over(r.first, r.last));

    // Independent oracle for IO: adjacent ranges fuse.
    std::vector<TokenRange> merged;
    for (const TokenRange& r : ranges) {
      if (!merged.empty() && merged.back().last + 1 == r.first) {
        merged.back().last = r.last;
      } else {
        merged.push_back(r);
      }
    }
    const bool adjacent = merged.size() != ranges.size();
    adjacent_cases += adjacent;

    for (TagScheme s : {TagScheme::kIO, TagScheme::kBIO, TagScheme::kBEO, TagScheme::kBEIO}) {
      const TagSequence tags = Encode(tokens, spans, s);
      ASSERT_EQ(tags.size(), tokens.size());
      for (Label l : tags) EXPECT_TRUE(IsLegal(l, s));
      const std::vector<TokenRange> back = DecodeRanges(tags, s);
      if (s == TagScheme::kBIO || s == TagScheme::kBEIO) {
        EXPECT_EQ(back, ranges);
        EXPECT_EQ(Decode(tags, tokens, s), spans);
      } else if (s == TagScheme::kIO) {
        EXPECT_EQ(back, merged);
        EXPECT_EQ(back == ranges, !adjacent);
      }
    }
  }
  EXPECT_GT(adjacent_cases, 50);
}

TEST(CodecPropertyTest, DecodeIsTotal) {
  std::mt19937_64 rng(5);
  const Label all[] = {Label::kO, Label::kI, Label::kB, Label::kE};
  for (int t = 0; t < 3000; ++t) {
    for (TagScheme s : {TagScheme::kIO, TagScheme::kBIO, TagScheme::kBEO, TagScheme::kBEIO}) {
      std::vector<Label> alphabet;
      for (Label l : all) {
        if (IsLegal(l, s)) alphabet.push_back(l);
      }
      const int n = std::uniform_int_distribution<int>(0, 30)(rng);
      TagSequence tags;
      for (int i = 0; i < n; ++i) {
        tags.push_back(alphabet[rng() % alphabet.size()]);
      }
      const std::vector<TokenRange> ranges = DecodeRanges(tags, s);
      int prev_last = -1;
      for (const TokenRange& r : ranges) {
        EXPECT_GT(r.first, prev_last);
        EXPECT_LE(r.first, r.last);
        EXPECT_LT(r.last, n);
        prev_last = r.last;
      }
      // Every non-O token lies in some span; every O token in none.
      std::vector<bool> covered(n, false);
      for (const TokenRange& r : ranges) {
        for (int i = r.first; i <= r.last; ++i) covered[i] = true;
      }
      for (int i = 0; i < n; ++i) EXPECT_EQ(covered[i], tags[i] != Label::kO);
    }
  }
}

AnnotatedSample Sample(std::string id, std::string text, std::vector<ClaimSpan> spans) {
  AnnotatedSample s;
  s.post.id = std::move(id);
  s.post.language = "en";
  s.post.platform = "twitter";
  s.post.text = std::move(text);
  s.spans = std::move(spans);
  return s;
}

TEST(ConllTest, TwoTokenSample) {
  std::ostringstream out;
  WriteConll(out, {Sample("a", "Hi there", {{3, 8}})}, TagScheme::kBIO);
  EXPECT_EQ(out.str(), "Hi\tO\nthere\tB\n\n");
}

TEST(ConllTest, EmptyCorpus) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "xclaim_empty.conll").string();
  ExportConll({}, TagScheme::kIO, path);
  EXPECT_EQ(std::filesystem::file_size(path), 0u);
  std::filesystem::remove(path);
}

TEST(ConllTest, SpanAtEndRoundTrips) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "xclaim_roundtrip.conll").string();
  const std::vector<AnnotatedSample> samples = {
      Sample("a", "Vaccines contain microchips, says post", {{17, 27}}),
      Sample("b", "मोदी ने कहा कि पुल गिर गया", {{15, 26}}),
  };
  ExportConll(samples, TagScheme::kBEIO, path);
  std::ifstream in(path);
  const std::vector<ConllSentence> parsed = ReadConll(in, path);
  ASSERT_EQ(parsed.size(), 2u);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::vector<Token> tokens = Tokenize(samples[i].post.text);
    ASSERT_EQ(parsed[i].tokens.size(), tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      EXPECT_EQ(parsed[i].tokens[t], tokens[t].text);
    }
    EXPECT_EQ(Decode(parsed[i].labels, tokens, TagScheme::kBEIO), samples[i].spans);
  }
  EXPECT_EQ(Str(parsed[1].labels), "OOOOBIE");
  std::filesystem::remove(path);
}

TEST(ConllTest, ParseErrors) {
  std::istringstream bad("word\tO\nnolabel\n");
  try {
    ReadConll(bad, "x.conll");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream bad_label("word\tQ\n");
  EXPECT_THROW(ReadConll(bad_label, "x.conll"), ParseError);
}

}  // namespace
}  // namespace xclaim
