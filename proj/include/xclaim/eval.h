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

// Span-level precision, recall and F1 with partial-overlap credit.
//
// For predicted spans S and gold spans T of one document, with
// C(s, t, h) = |s ∩ t| / h over character sets:
//
//   p_num = sum over s, t of C(s, t, |s|)    p_den = |S|
//   r_num = sum over s, t of C(s, t, |t|)    r_den = |T|

#ifndef XCLAIM_EVAL_H_
#define XCLAIM_EVAL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xclaim/corpus.h"

namespace xclaim {

struct DocumentScores {
  std::string id;
  double p_num = 0;
  int p_den = 0;
  double r_num = 0;
  int r_den = 0;
};

// Throws ValidationError for empty spans or overlapping spans on one side.
DocumentScores DocOverlapScores(std::span<const ClaimSpan> pred,
                                std::span<const ClaimSpan> gold);

enum class Averaging { kMicro, kMacro };
enum class EvalUnit { kCharacter, kToken };

std::string_view AveragingName(Averaging averaging);
Averaging ParseAveraging(std::string_view name);
std::string_view UnitName(EvalUnit unit);
EvalUnit ParseUnit(std::string_view name);

struct SpanEvalResult {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::vector<DocumentScores> documents;
};

// 2PR / (P + R), or 0 when P + R = 0.
double F1(double precision, double recall);

// Micro: P = sum p_num / sum p_den and likewise for R. Macro: the mean of
// per-document ratios over documents whose denominator is positive. A zero
// denominator yields a score of 0.
SpanEvalResult Aggregate(std::vector<DocumentScores> documents,
                         Averaging averaging = Averaging::kMicro);

struct DocumentPair {
  std::string id;
  std::vector<ClaimSpan> pred;
  std::vector<ClaimSpan> gold;
};

SpanEvalResult CorpusEval(const std::vector<DocumentPair>& pairs,
                          Averaging averaging = Averaging::kMicro, int jobs = 1);

struct EvalOptions {
  EvalUnit unit = EvalUnit::kCharacter;
  Averaging averaging = Averaging::kMicro;
};

// Pairs predictions with gold by id. Both files must hold the same ids and
// each pair the same post text; otherwise ValidationError. Documents are
// reported in gold order. The token unit maps spans onto the tokens they
// overlap before scoring.
SpanEvalResult EvaluateSamples(const std::vector<AnnotatedSample>& pred,
                               const std::vector<AnnotatedSample>& gold,
                               const EvalOptions& options = {}, int jobs = 1);

// Componentwise median of P, R and F1; the lower median for even counts.
// Per-document breakdowns are dropped. Throws ValidationError when empty.
SpanEvalResult MedianOfRuns(const std::vector<SpanEvalResult>& runs);

}  // namespace xclaim

#endif  // XCLAIM_EVAL_H_
