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

// Word alignment between claim tokens and sentence tokens, Pharaoh file I/O,
// and the rules that turn aligned sentence tokens into a claim span.

#ifndef XCLAIM_ALIGN_H_
#define XCLAIM_ALIGN_H_

#include <compare>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xclaim/corpus.h"
#include "xclaim/matrix.h"
#include "xclaim/segment.h"

namespace xclaim {

struct AlignmentLink {
  int claim = 0;     // claim token index
  int sentence = 0;  // sentence token index

  auto operator<=>(const AlignmentLink&) const = default;
};

// Many-to-many link set.
using AlignmentLinks = std::set<AlignmentLink>;

struct SoftAlignConfig {
  double threshold = 1e-3;    // in (0, 1)
  double temperature = 0.05;  // > 0

  // Throws ConfigError when out of range.
  void Validate() const;
};

// Bidirectional softmax extraction: with S = sim / T, Pr the row-wise and
// Pc the column-wise softmax of S, (i, j) is linked iff Pr[i,j] * Pc[i,j]
// exceeds the threshold. Rows index claim tokens, columns sentence tokens.
// Throws ValidationError for empty matrices or non-finite entries.
AlignmentLinks ExtractLinks(const Matrix& sim, const SoftAlignConfig& cfg = {});

// 1 - edit distance / max length, over case-folded scalar values.
double LevenshteinSimilarity(std::string_view a, std::string_view b);

inline constexpr double kLexicalMatchThreshold = 0.8;

// Model-free aligner. Claim tokens are visited left to right; each takes the
// first unused sentence token with the same case-folded text. Claim tokens
// still unmatched then take the unused sentence token with the highest
// LevenshteinSimilarity >= 0.8 (leftmost on ties). One-to-one.
AlignmentLinks LexicalAlign(std::span<const Token> claim,
                            std::span<const Token> sentence);

// Pharaoh format: one record per line, space-separated "i-j" pairs, an empty
// line for an empty set.
AlignmentLinks ParseLinks(std::string_view line, const std::string& source = "links",
                          int line_number = 1);
std::string FormatLinks(const AlignmentLinks& links);
std::vector<AlignmentLinks> ReadLinks(std::istream& in, const std::string& source);
void WriteLinks(std::ostream& out, const std::vector<AlignmentLinks>& records);
std::vector<AlignmentLinks> LoadLinks(const std::string& path);
void SaveLinks(const std::string& path, const std::vector<AlignmentLinks>& records);

enum class SpanRule { kFirstLast, kLongestContiguous };

std::string_view SpanRuleName(SpanRule rule);
SpanRule ParseSpanRule(std::string_view name);

// From the first through the last aligned sentence token.
// Throws NoAlignmentError(sample_id) for an empty link set.
ClaimSpan DeriveSpanFirstLast(const AlignmentLinks& links,
                              const SentenceSpan& sentence,
                              std::string_view sample_id = {});

// Longest run of consecutive aligned sentence token indices; the earliest
// run wins ties.
ClaimSpan DeriveSpanLongestContiguous(const AlignmentLinks& links,
                                      const SentenceSpan& sentence,
                                      std::string_view sample_id = {});

ClaimSpan DeriveSpan(SpanRule rule, const AlignmentLinks& links,
                     const SentenceSpan& sentence,
                     std::string_view sample_id = {});

}  // namespace xclaim

#endif  // XCLAIM_ALIGN_H_
