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

// Sentence-similarity measures used to pick the post sentence that best
// matches a normalized claim.

#ifndef XCLAIM_SIMILARITY_H_
#define XCLAIM_SIMILARITY_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xclaim/embedding.h"
#include "xclaim/segment.h"

namespace xclaim {

struct PrfScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

using TokenTexts = std::span<const std::string>;

std::vector<std::string> TextsOf(std::span<const Token> tokens);

// Clipped n-gram overlap. All zeros when either side has no n-grams.
PrfScore RougeN(TokenTexts candidate, TokenTexts reference, int n);

// Longest-common-subsequence ROUGE.
PrfScore RougeL(TokenTexts candidate, TokenTexts reference);

// Simplified METEOR: exact matches after case folding, aligned one-to-one
// greedily left to right, with the standard fragmentation penalty
// 0.5 * (chunks / matches)^3 and Fmean = 10PR / (R + 9P).
double Meteor(TokenTexts candidate, TokenTexts reference);

enum class BertScoreMode { kPrecision, kRecall, kF1 };

// Greedy max-cosine matching without IDF weighting. Both matrices must be
// nonempty, normalized and of equal dimension.
double BertScore(const EmbeddingMatrix& candidate,
                 const EmbeddingMatrix& reference, BertScoreMode mode);

enum class SimilarityMeasure {
  kRouge1F1,
  kRougeLF1,
  kMeteor,
  kBertScoreP,
  kBertScoreR,
  kBertScoreF1,
};

inline constexpr SimilarityMeasure kDefaultMeasure = SimilarityMeasure::kBertScoreR;

std::string_view MeasureName(SimilarityMeasure measure);
SimilarityMeasure ParseMeasure(std::string_view name);
bool NeedsEmbeddings(SimilarityMeasure measure);

// Similarity of a post sentence to the claim. The sentence is the candidate
// and the claim the reference, so recall-type scores measure how much of
// the claim the sentence covers. BERTScore measures embed both sides through
// `provider` and throw ConfigError when it is null.
double Score(SimilarityMeasure measure, std::span<const Token> claim,
             std::span<const Token> sentence,
             const EmbeddingProvider* provider = nullptr,
             std::string_view sample_id = {});

// Same, for BERTScore measures with precomputed matrices.
double ScoreEmbedded(SimilarityMeasure measure, const EmbeddingMatrix& claim,
                     const EmbeddingMatrix& sentence);

}  // namespace xclaim

#endif  // XCLAIM_SIMILARITY_H_
