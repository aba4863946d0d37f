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

#include "xclaim/eval.h"

#include <algorithm>
#include <unordered_map>

#include "xclaim/error.h"
#include "xclaim/parallel.h"
#include "xclaim/segment.h"
#include "xclaim/tags.h"

namespace xclaim {
namespace {

void CheckSide(std::span<const ClaimSpan> spans, std::string_view side) {
  std::vector<ClaimSpan> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].end_char <= sorted[i].start_char) {
      throw ValidationError(std::string(side) + " span [" +
                            std::to_string(sorted[i].start_char) + ", " +
                            std::to_string(sorted[i].end_char) + ") is empty");
    }
    if (i > 0 && sorted[i].start_char < sorted[i - 1].end_char) {
      throw ValidationError(std::string(side) + " spans overlap");
    }
  }
}

double Ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

// Token unit: span [first, last + 1) over token indices.
std::vector<ClaimSpan> ToTokenUnits(std::span<const Token> tokens,
                                    std::span<const ClaimSpan> spans) {
  std::vector<ClaimSpan> out;
  for (const TokenRange& r : SpansToTokenRanges(tokens, spans)) {
    out.push_back({r.first, r.last + 1});
  }
  return out;
}

}  // namespace

DocumentScores DocOverlapScores(std::span<const ClaimSpan> pred,
                                std::span<const ClaimSpan> gold) {
  CheckSide(pred, "predicted");
  CheckSide(gold, "gold");
  DocumentScores scores;
  scores.p_den = static_cast<int>(pred.size());
  scores.r_den = static_cast<int>(gold.size());
  for (const ClaimSpan& s : pred) {
    for (const ClaimSpan& t : gold) {
      const int overlap =
          std::min(s.end_char, t.end_char) - std::max(s.start_char, t.start_char);
      if (overlap <= 0) continue;
      scores.p_num += static_cast<double>(overlap) / s.length();
      scores.r_num += static_cast<double>(overlap) / t.length();
    }
  }
  return scores;
}

std::string_view AveragingName(Averaging averaging) {
  return averaging == Averaging::kMicro ? "micro" : "macro";
}

Averaging ParseAveraging(std::string_view name) {
  if (name == "micro") return Averaging::kMicro;
  if (name == "macro") return Averaging::kMacro;
  throw ConfigError("unknown averaging '" + std::string(name) + "'");
}

std::string_view UnitName(EvalUnit unit) {
  return unit == EvalUnit::kCharacter ? "char" : "token";
}

EvalUnit ParseUnit(std::string_view name) {
  if (name == "char") return EvalUnit::kCharacter;
  if (name == "token") return EvalUnit::kToken;
  throw ConfigError("unknown evaluation unit '" + std::string(name) + "'");
}

double F1(double precision, double recall) {
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

SpanEvalResult Aggregate(std::vector<DocumentScores> documents, Averaging averaging) {
  SpanEvalResult result;
  if (averaging == Averaging::kMicro) {
    double p_num = 0, r_num = 0;
    long long p_den = 0, r_den = 0;
    for (const DocumentScores& d : documents) {
      p_num += d.p_num;
      p_den += d.p_den;
      r_num += d.r_num;
      r_den += d.r_den;
    }
    result.precision = Ratio(p_num, static_cast<double>(p_den));
    result.recall = Ratio(r_num, static_cast<double>(r_den));
  } else {
    double p_sum = 0, r_sum = 0;
    int p_docs = 0, r_docs = 0;
    for (const DocumentScores& d : documents) {
      if (d.p_den > 0) {
        p_sum += d.p_num / d.p_den;
        ++p_docs;
      }
      if (d.r_den > 0) {
        r_sum += d.r_num / d.r_den;
        ++r_docs;
      }
    }
    result.precision = Ratio(p_sum, p_docs);
    result.recall = Ratio(r_sum, r_docs);
  }
  result.f1 = F1(result.precision, result.recall);
  result.documents = std::move(documents);
  return result;
}

SpanEvalResult CorpusEval(const std::vector<DocumentPair>& pairs, Averaging averaging,
                          int jobs) {
  std::vector<DocumentScores> documents(pairs.size());
  ParallelFor(pairs.size(), jobs, [&](std::size_t i) {
    try {
      documents[i] = DocOverlapScores(pairs[i].pred, pairs[i].gold);
    } catch (const ValidationError& e) {
      throw ValidationError("document '" + pairs[i].id + "': " + e.what());
    }
    documents[i].id = pairs[i].id;
  });
  return Aggregate(std::move(documents), averaging);
}

SpanEvalResult EvaluateSamples(const std::vector<AnnotatedSample>& pred,
                               const std::vector<AnnotatedSample>& gold,
                               const EvalOptions& options, int jobs) {
  std::unordered_map<std::string, const AnnotatedSample*> by_id;
  for (const AnnotatedSample& p : pred) {
    if (!by_id.emplace(p.post.id, &p).second) {
      throw ValidationError("duplicate predicted id '" + p.post.id + "'");
    }
  }
  if (pred.size() != gold.size()) {
    throw ValidationError("prediction file has " + std::to_string(pred.size()) +
                          " documents but gold has " + std::to_string(gold.size()));
  }
  std::vector<const AnnotatedSample*> matched(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto it = by_id.find(gold[i].post.id);
    if (it == by_id.end()) {
      throw ValidationError("no prediction for gold id '" + gold[i].post.id + "'");
    }
    if (it->second->post.text != gold[i].post.text) {
      throw ValidationError("post text differs between prediction and gold for '" +
                            gold[i].post.id + "'");
    }
    matched[i] = it->second;
  }

  std::vector<DocumentPair> pairs(gold.size());
  ParallelFor(gold.size(), jobs, [&](std::size_t i) {
    DocumentPair& pair = pairs[i];
    pair.id = gold[i].post.id;
    if (options.unit == EvalUnit::kCharacter) {
      pair.pred = matched[i]->spans;
      pair.gold = gold[i].spans;
    } else {
      const std::vector<Token> tokens = Tokenize(gold[i].post.text);
      try {
        pair.pred = ToTokenUnits(tokens, matched[i]->spans);
        pair.gold = ToTokenUnits(tokens, gold[i].spans);
      } catch (const ValidationError& e) {
        throw ValidationError("document '" + pair.id + "': " + e.what());
      }
    }
  });
  return CorpusEval(pairs, options.averaging, jobs);
}

SpanEvalResult MedianOfRuns(const std::vector<SpanEvalResult>& runs) {
  if (runs.empty()) throw ValidationError("median of zero runs");
  auto lower_median = [&](double SpanEvalResult::*field) {
    std::vector<double> values;
    for (const SpanEvalResult& r : runs) values.push_back(r.*field);
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
  };
  SpanEvalResult result;
  result.precision = lower_median(&SpanEvalResult::precision);
  result.recall = lower_median(&SpanEvalResult::recall);
  result.f1 = lower_median(&SpanEvalResult::f1);
  return result;
}

}  // namespace xclaim
