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

#include "xclaim/similarity.h"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "xclaim/error.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

double Harmonic(double p, double r) {
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

std::unordered_map<std::string, int> NgramCounts(TokenTexts tokens, int n) {
  std::unordered_map<std::string, int> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

std::vector<std::string> TextsOf(std::span<const Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

PrfScore RougeN(TokenTexts candidate, TokenTexts reference, int n) {
  if (n < 1) throw ValidationError("ROUGE-N requires n >= 1");
  const int cand_total = std::max(0, static_cast<int>(candidate.size()) - n + 1);
  const int ref_total = std::max(0, static_cast<int>(reference.size()) - n + 1);
  if (cand_total == 0 || ref_total == 0) return {};
  const auto cand = NgramCounts(candidate, n);
  const auto ref = NgramCounts(reference, n);
  int overlap = 0;
  for (const auto& [gram, count] : ref) {
    if (auto it = cand.find(gram); it != cand.end()) {
      overlap += std::min(count, it->second);
    }
  }
  PrfScore s;
  s.precision = static_cast<double>(overlap) / cand_total;
  s.recall = static_cast<double>(overlap) / ref_total;
  s.f1 = Harmonic(s.precision, s.recall);
  return s;
}

PrfScore RougeL(TokenTexts candidate, TokenTexts reference) {
  if (candidate.empty() || reference.empty()) return {};
  // Two-row LCS table.
  std::vector<int> prev(reference.size() + 1, 0);
  std::vector<int> cur(reference.size() + 1, 0);
  for (std::size_t i = 1; i <= candidate.size(); ++i) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = candidate[i - 1] == reference[j - 1]
                   ? prev[j - 1] + 1
                   : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = prev[reference.size()];
  PrfScore s;
  s.precision = lcs / static_cast<double>(candidate.size());
  s.recall = lcs / static_cast<double>(reference.size());
  s.f1 = Harmonic(s.precision, s.recall);
  return s;
}

double Meteor(TokenTexts candidate, TokenTexts reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::vector<std::string> ref_folded;
  ref_folded.reserve(reference.size());
  for (const std::string& r : reference) ref_folded.push_back(unicode::CaseFold(r));
  std::vector<bool> used(reference.size(), false);

  int matches = 0;
  int chunks = 0;
  int last_cand = -2;
  int last_ref = -2;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const std::string folded = unicode::CaseFold(candidate[i]);
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (used[j] || ref_folded[j] != folded) continue;
      used[j] = true;
      ++matches;
      const int ci = static_cast<int>(i);
      const int rj = static_cast<int>(j);
      if (ci != last_cand + 1 || rj != last_ref + 1) ++chunks;
      last_cand = ci;
      last_ref = rj;
      break;
    }
  }
  if (matches == 0) return 0.0;
  const double p = static_cast<double>(matches) / candidate.size();
  const double r = static_cast<double>(matches) / reference.size();
  const double fmean = 10 * p * r / (r + 9 * p);
  const double fragmentation = static_cast<double>(chunks) / matches;
  const double penalty = 0.5 * fragmentation * fragmentation * fragmentation;
  return fmean * (1 - penalty);
}

double BertScore(const EmbeddingMatrix& candidate,
                 const EmbeddingMatrix& reference, BertScoreMode mode) {
  if (candidate.rows() == 0 || reference.rows() == 0) {
    throw ValidationError("BERTScore needs nonempty embedding matrices");
  }
  if (candidate.dim != reference.dim) {
    throw ValidationError("BERTScore dimension mismatch: " +
                          std::to_string(candidate.dim) + " vs " +
                          std::to_string(reference.dim));
  }
  if (!candidate.normalized || !reference.normalized) {
    throw ValidationError("BERTScore needs unit-normalized embeddings");
  }
  const Matrix cos = CosineMatrix(candidate, reference);
  const auto precision = [&] {
    double sum = 0;
    for (int i = 0; i < cos.rows(); ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < cos.cols(); ++j) best = std::max(best, cos(i, j));
      sum += best;
    }
    return sum / cos.rows();
  };
  const auto recall = [&] {
    double sum = 0;
    for (int j = 0; j < cos.cols(); ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < cos.rows(); ++i) best = std::max(best, cos(i, j));
      sum += best;
    }
    return sum / cos.cols();
  };
  switch (mode) {
    case BertScoreMode::kPrecision:
      return precision();
    case BertScoreMode::kRecall:
      return recall();
    case BertScoreMode::kF1: {
      const double p = precision();
      const double r = recall();
      return p > 0 && r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
  }
  return 0.0;
}

std::string_view MeasureName(SimilarityMeasure measure) {
  switch (measure) {
    case SimilarityMeasure::kRouge1F1:
      return "rouge1";
    case SimilarityMeasure::kRougeLF1:
      return "rougeL";
    case SimilarityMeasure::kMeteor:
      return "meteor";
    case SimilarityMeasure::kBertScoreP:
      return "bertscore-p";
    case SimilarityMeasure::kBertScoreR:
      return "bertscore-r";
    case SimilarityMeasure::kBertScoreF1:
      return "bertscore-f1";
  }
  return "bertscore-r";
}

SimilarityMeasure ParseMeasure(std::string_view name) {
  for (SimilarityMeasure m :
       {SimilarityMeasure::kRouge1F1, SimilarityMeasure::kRougeLF1,
        SimilarityMeasure::kMeteor, SimilarityMeasure::kBertScoreP,
        SimilarityMeasure::kBertScoreR, SimilarityMeasure::kBertScoreF1}) {
    if (MeasureName(m) == name) return m;
  }
  throw ConfigError("unknown similarity measure '" + std::string(name) + "'");
}

bool NeedsEmbeddings(SimilarityMeasure measure) {
  return measure == SimilarityMeasure::kBertScoreP ||
         measure == SimilarityMeasure::kBertScoreR ||
         measure == SimilarityMeasure::kBertScoreF1;
}

double ScoreEmbedded(SimilarityMeasure measure, const EmbeddingMatrix& claim,
                     const EmbeddingMatrix& sentence) {
  switch (measure) {
    case SimilarityMeasure::kBertScoreP:
      return BertScore(sentence, claim, BertScoreMode::kPrecision);
    case SimilarityMeasure::kBertScoreR:
      return BertScore(sentence, claim, BertScoreMode::kRecall);
    case SimilarityMeasure::kBertScoreF1:
      return BertScore(sentence, claim, BertScoreMode::kF1);
    default:
      throw ConfigError("measure '" + std::string(MeasureName(measure)) +
                        "' does not use embeddings");
  }
}

double Score(SimilarityMeasure measure, std::span<const Token> claim,
             std::span<const Token> sentence, const EmbeddingProvider* provider,
             std::string_view sample_id) {
  if (NeedsEmbeddings(measure)) {
    if (provider == nullptr) {
      throw ConfigError("measure '" + std::string(MeasureName(measure)) +
                        "' requires an embedding provider");
    }
    return ScoreEmbedded(
        measure, provider->Embed(sample_id, EmbeddingRole::kClaim, claim),
        provider->Embed(sample_id, EmbeddingRole::kSentence, sentence));
  }
  const std::vector<std::string> c = TextsOf(claim);
  const std::vector<std::string> s = TextsOf(sentence);
  switch (measure) {
    case SimilarityMeasure::kRouge1F1:
      return RougeN(s, c, 1).f1;
    case SimilarityMeasure::kRougeLF1:
      return RougeL(s, c).f1;
    case SimilarityMeasure::kMeteor:
      return Meteor(s, c);
    default:
      break;
  }
  return 0.0;
}

}  // namespace xclaim
