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

// Automated claim-span annotation guided by a normalized claim:
//
//   1. split the post into sentences;
//   2. select the sentence most similar to the claim;
//   3. align claim tokens with the selected sentence's tokens;
//   4. derive the span from the aligned sentence tokens.
//
// The same pipeline projects spans onto translations and maps free-text
// model answers back onto post offsets.

#ifndef XCLAIM_ANNOTATE_H_
#define XCLAIM_ANNOTATE_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xclaim/align.h"
#include "xclaim/corpus.h"
#include "xclaim/embedding.h"
#include "xclaim/segment.h"
#include "xclaim/similarity.h"

namespace xclaim {

enum class AlignerKind {
  kImported,  // precomputed links supplied per sample
  kSoft,      // softmax extraction over provider cosine similarities
  kLexical,   // model-free string matching
};

std::string_view AlignerName(AlignerKind kind);
AlignerKind ParseAligner(std::string_view name);

struct AnnotateConfig {
  SimilarityMeasure measure = kDefaultMeasure;
  AlignerKind aligner = AlignerKind::kLexical;
  SoftAlignConfig soft;
  SpanRule span_rule = SpanRule::kFirstLast;
  std::shared_ptr<const EmbeddingProvider> provider;
  std::shared_ptr<const LanguageTable> languages;  // null: built-in table

  const LanguageTable& language_table() const {
    return languages ? *languages : LanguageTable::Default();
  }

  // BERTScore measures and the soft aligner need a provider.
  void Validate() const;
};

// Index of the sentence scoring highest against the claim; the lowest index
// wins ties. Throws ValidationError for an empty sentence list.
int SelectSentence(const NormalizedClaim& claim,
                   const std::vector<SentenceSpan>& sentences,
                   const AnnotateConfig& cfg);

struct AnnotationResult {
  AnnotatedSample sample;
  int sentence_index = 0;
  SentenceSpan sentence;
  AlignmentLinks links;
};

// Runs the pipeline and keeps the intermediate choices. `imported` supplies
// the links when cfg.aligner is kImported; they index the claim tokens and
// the tokens of the selected sentence.
AnnotationResult AnnotateDetailed(const PostRecord& post,
                                  const NormalizedClaim& claim,
                                  const AnnotateConfig& cfg,
                                  const AlignmentLinks* imported = nullptr);

// Exactly one span, provenance auto. Throws NoAlignmentError when the
// aligner finds nothing and ValidationError for claims without tokens.
AnnotatedSample AnnotateSample(const PostRecord& post,
                               const NormalizedClaim& claim,
                               const AnnotateConfig& cfg,
                               const AlignmentLinks* imported = nullptr);

// Treats the source span text as the claim guiding annotation of its
// translation. Throws ValidationError for an empty source span.
ClaimSpan ProjectLabels(std::string_view source_span_text,
                        std::string_view target_text,
                        std::string_view target_language,
                        const AnnotateConfig& cfg,
                        std::string_view sample_id = "projected",
                        const AlignmentLinks* imported = nullptr);

// Locates a model's free-text answer inside the post. An answer that occurs
// verbatim within one sentence, starting and ending on token boundaries,
// maps to its first such occurrence. Other answers are annotated like a
// normalized claim. Throws EmptyResponseError for blank responses.
ClaimSpan NormalizeLlmResponse(std::string_view response, const PostRecord& post,
                               const AnnotateConfig& cfg);

struct Reject {
  std::string id;
  std::string reason;
};

struct CorpusAnnotation {
  std::vector<AnnotatedSample> samples;  // in post order
  std::vector<Reject> rejects;
};

// Annotates every post that has a claim. Per-sample failures become rejects
// (reasons: missing_claim, no_alignment, invalid). `imported`, when given,
// holds one link set per post in post order.
CorpusAnnotation AnnotateCorpus(const std::vector<PostRecord>& posts,
                                const std::vector<NormalizedClaim>& claims,
                                const AnnotateConfig& cfg,
                                const std::vector<AlignmentLinks>* imported = nullptr,
                                int jobs = 1);

}  // namespace xclaim

#endif  // XCLAIM_ANNOTATE_H_
