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

// Corpus data model, JSONL I/O, collection-time noise filters, train/dev
// splitting and dataset statistics.

#ifndef XCLAIM_CORPUS_H_
#define XCLAIM_CORPUS_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xclaim/segment.h"

namespace xclaim {

struct PostRecord {
  std::string id;
  std::string language;
  std::string platform;
  std::string text;
  std::optional<std::string> source_url;

  bool operator==(const PostRecord&) const = default;
};

// Fact-checker-written restatement of the claim in a post.
struct NormalizedClaim {
  std::string post_id;
  std::string text;

  bool operator==(const NormalizedClaim&) const = default;
};

// Half-open [start_char, end_char) interval of scalar values in a post.
struct ClaimSpan {
  int start_char = 0;
  int end_char = 0;

  int length() const { return end_char - start_char; }
  auto operator<=>(const ClaimSpan&) const = default;
};

enum class Provenance { kAuto, kManual, kProjected, kLlm };

std::string_view ProvenanceName(Provenance provenance);
Provenance ParseProvenance(std::string_view name);

struct AnnotatedSample {
  PostRecord post;
  std::vector<ClaimSpan> spans;
  Provenance provenance = Provenance::kAuto;

  bool operator==(const AnnotatedSample&) const = default;
};

// Checks the post invariants (nonempty id and text, known language).
void ValidatePost(const PostRecord& post,
                  const LanguageTable& languages = LanguageTable::Default());

// Checks span bounds, non-whitespace content, ordering and disjointness.
// Errors name `id`.
void ValidateSpans(std::string_view id, std::string_view text,
                   const std::vector<ClaimSpan>& spans);

// JSONL readers. Every line is one JSON object; blank lines are skipped.
// Malformed lines raise ParseError carrying the line number; invariant
// violations raise ValidationError naming the record id.
std::vector<PostRecord> ReadPosts(
    std::istream& in, const std::string& source,
    const LanguageTable& languages = LanguageTable::Default());
std::vector<AnnotatedSample> ReadAnnotated(
    std::istream& in, const std::string& source,
    const LanguageTable& languages = LanguageTable::Default());
std::vector<NormalizedClaim> ReadClaims(std::istream& in,
                                        const std::string& source);

std::vector<PostRecord> LoadPosts(
    const std::string& path,
    const LanguageTable& languages = LanguageTable::Default());
std::vector<AnnotatedSample> LoadAnnotated(
    const std::string& path,
    const LanguageTable& languages = LanguageTable::Default());
std::vector<NormalizedClaim> LoadClaims(const std::string& path);

void WritePosts(std::ostream& out, const std::vector<PostRecord>& posts);
void WriteAnnotated(std::ostream& out,
                    const std::vector<AnnotatedSample>& samples);
void WriteClaims(std::ostream& out, const std::vector<NormalizedClaim>& claims);

void SavePosts(const std::string& path, const std::vector<PostRecord>& posts);
void SaveAnnotated(const std::string& path,
                   const std::vector<AnnotatedSample>& samples);
void SaveClaims(const std::string& path,
                const std::vector<NormalizedClaim>& claims);

// Noise filters applied at collection time.
struct FilterRules {
  // Matched case-insensitively against whole word tokens.
  std::vector<std::string> media_keywords = {"video", "photo", "reel"};
  int min_words = 3;
  int max_words = 700;
};

enum class FilterReason { kOk, kMediaKeyword, kTooShort, kTooLong };

std::string_view FilterReasonName(FilterReason reason);

struct FilterVerdict {
  bool accepted = true;
  FilterReason reason = FilterReason::kOk;

  bool operator==(const FilterVerdict&) const = default;
};

// Rejects a (post, claim) pair if either text contains a media keyword or
// has fewer than min_words or more than max_words word tokens. Checks run
// in that order.
FilterVerdict FilterSample(const PostRecord& post, const NormalizedClaim& claim,
                           const FilterRules& rules = {});

struct TrainDevSplit {
  std::vector<AnnotatedSample> train;
  std::vector<AnnotatedSample> dev;
};

// Seeded shuffle, then floor(n * ratio) samples to train and the rest to dev.
TrainDevSplit SplitTrainDev(std::vector<AnnotatedSample> samples,
                            double ratio = 0.8, std::uint64_t seed = 0);

// Fisher-Yates permutation of [0, n) that is identical on every platform.
std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed);

struct LengthStats {
  double mean = 0;
  double stddev = 0;  // population form
};

struct GroupStats {
  std::string split;
  std::string language;
  int count = 0;
  int span_count = 0;
  std::optional<LengthStats> text_tokens;
  std::optional<LengthStats> text_chars;
  std::optional<LengthStats> span_tokens;
  std::optional<LengthStats> span_chars;
};

struct CorpusStats {
  // Sorted by (split, language).
  std::vector<GroupStats> groups;

  // 0 when the group is absent.
  int Count(std::string_view split, std::string_view language) const;
  const GroupStats* Find(std::string_view split,
                         std::string_view language) const;
};

struct SplitSamples {
  std::string split;
  std::vector<AnnotatedSample> samples;
};

using TokenizerFn = std::function<std::vector<Token>(std::string_view)>;

// Per (split, language): sample counts plus mean/std of post and span length
// in tokens and characters. A span's token length counts the tokens that
// overlap it.
CorpusStats ComputeCorpusStats(const std::vector<SplitSamples>& splits,
                               const TokenizerFn& tokenizer = Tokenize);

LengthStats Summarize(const std::vector<double>& values);

}  // namespace xclaim

#endif  // XCLAIM_CORPUS_H_
