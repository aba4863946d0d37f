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

#include "xclaim/annotate.h"

#include <algorithm>
#include <unordered_map>

#include "xclaim/error.h"
#include "xclaim/parallel.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

// Post tokens are the concatenation of the sentence tokens, so the rows of
// the whole-post sentence matrix split by cumulative token counts.
std::vector<Token> PostTokens(const std::vector<SentenceSpan>& sentences,
                              std::vector<int>& offsets) {
  std::vector<Token> tokens;
  offsets.clear();
  for (const SentenceSpan& s : sentences) {
    offsets.push_back(static_cast<int>(tokens.size()));
    tokens.insert(tokens.end(), s.tokens.begin(), s.tokens.end());
  }
  offsets.push_back(static_cast<int>(tokens.size()));
  return tokens;
}

// Lazily embeds the claim and the post once per sample.
class SampleEmbeddings {
 public:
  SampleEmbeddings(const EmbeddingProvider& provider, std::string_view sample_id,
                   std::span<const Token> claim,
                   const std::vector<SentenceSpan>& sentences)
      : provider_(provider), sample_id_(sample_id), claim_tokens_(claim),
        sentences_(sentences) {}

  const EmbeddingMatrix& claim() {
    if (!claim_) {
      claim_ = provider_.Embed(sample_id_, EmbeddingRole::kClaim, claim_tokens_);
    }
    return *claim_;
  }

  EmbeddingMatrix sentence(int index) {
    if (!post_) {
      const std::vector<Token> tokens = PostTokens(sentences_, offsets_);
      post_ = provider_.Embed(sample_id_, EmbeddingRole::kSentence, tokens);
    }
    return post_->Slice(offsets_[index], offsets_[index + 1]);
  }

 private:
  const EmbeddingProvider& provider_;
  std::string sample_id_;
  std::span<const Token> claim_tokens_;
  const std::vector<SentenceSpan>& sentences_;
  std::optional<EmbeddingMatrix> claim_;
  std::optional<EmbeddingMatrix> post_;
  std::vector<int> offsets_;
};

std::vector<Token> ClaimTokens(const NormalizedClaim& claim) {
  std::vector<Token> tokens = Tokenize(claim.text);
  if (tokens.empty()) {
    throw ValidationError("claim for '" + claim.post_id + "' has no tokens");
  }
  return tokens;
}

int SelectWith(std::span<const Token> claim_tokens,
               const std::vector<SentenceSpan>& sentences,
               const AnnotateConfig& cfg, SampleEmbeddings* embeddings) {
  if (sentences.empty()) throw ValidationError("no sentences to select from");
  int best = 0;
  double best_score = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const int index = static_cast<int>(i);
    const double score =
        NeedsEmbeddings(cfg.measure)
            ? ScoreEmbedded(cfg.measure, embeddings->claim(),
                            embeddings->sentence(index))
            : Score(cfg.measure, claim_tokens, sentences[i].tokens);
    if (i == 0 || score > best_score) {
      best = index;
      best_score = score;
    }
  }
  return best;
}

void CheckImportedLinks(const AlignmentLinks& links, std::size_t claim_size,
                        std::size_t sentence_size, const std::string& id) {
  for (const AlignmentLink& link : links) {
    if (link.claim >= static_cast<int>(claim_size) ||
        link.sentence >= static_cast<int>(sentence_size)) {
      throw ValidationError("imported link " + std::to_string(link.claim) + "-" +
                            std::to_string(link.sentence) + " for '" + id +
                            "' is outside the " + std::to_string(claim_size) + "x" +
                            std::to_string(sentence_size) + " token grid");
    }
  }
}

}  // namespace

std::string_view AlignerName(AlignerKind kind) {
  switch (kind) {
    case AlignerKind::kImported:
      return "imported";
    case AlignerKind::kSoft:
      return "soft";
    case AlignerKind::kLexical:
      return "lexical";
  }
  return "lexical";
}

AlignerKind ParseAligner(std::string_view name) {
  if (name == "imported") return AlignerKind::kImported;
  if (name == "soft") return AlignerKind::kSoft;
  if (name == "lexical") return AlignerKind::kLexical;
  throw ConfigError("unknown aligner '" + std::string(name) + "'");
}

void AnnotateConfig::Validate() const {
  if (!provider && NeedsEmbeddings(measure)) {
    throw ConfigError("measure " + std::string(MeasureName(measure)) +
                      " needs an embedding provider");
  }
  if (!provider && aligner == AlignerKind::kSoft) {
    throw ConfigError("the soft aligner needs an embedding provider");
  }
  if (aligner == AlignerKind::kSoft) soft.Validate();
}

int SelectSentence(const NormalizedClaim& claim,
                   const std::vector<SentenceSpan>& sentences,
                   const AnnotateConfig& cfg) {
  cfg.Validate();
  const std::vector<Token> claim_tokens = ClaimTokens(claim);
  std::optional<SampleEmbeddings> embeddings;
  if (cfg.provider) embeddings.emplace(*cfg.provider, claim.post_id, claim_tokens, sentences);
  return SelectWith(claim_tokens, sentences, cfg, embeddings ? &*embeddings : nullptr);
}

AnnotationResult AnnotateDetailed(const PostRecord& post,
                                  const NormalizedClaim& claim,
                                  const AnnotateConfig& cfg,
                                  const AlignmentLinks* imported) {
  cfg.Validate();
  if (cfg.aligner == AlignerKind::kImported && imported == nullptr) {
    throw ConfigError("imported aligner selected but no links for '" + post.id + "'");
  }
  const std::vector<Token> claim_tokens = ClaimTokens(claim);
  const std::vector<SentenceSpan> sentences =
      SplitSentences(post.text, post.language, cfg.language_table());

  std::optional<SampleEmbeddings> embeddings;
  if (cfg.provider) embeddings.emplace(*cfg.provider, post.id, claim_tokens, sentences);

  AnnotationResult result;
  result.sentence_index =
      sentences.size() == 1
          ? 0
          : SelectWith(claim_tokens, sentences, cfg, embeddings ? &*embeddings : nullptr);
  result.sentence = sentences[result.sentence_index];

  switch (cfg.aligner) {
    case AlignerKind::kImported:
      CheckImportedLinks(*imported, claim_tokens.size(), result.sentence.tokens.size(),
                         post.id);
      result.links = *imported;
      break;
    case AlignerKind::kSoft:
      result.links = ExtractLinks(
          CosineMatrix(embeddings->claim(), embeddings->sentence(result.sentence_index)),
          cfg.soft);
      break;
    case AlignerKind::kLexical:
      result.links = LexicalAlign(claim_tokens, result.sentence.tokens);
      break;
  }

  result.sample.post = post;
  result.sample.spans = {DeriveSpan(cfg.span_rule, result.links, result.sentence, post.id)};
  result.sample.provenance = Provenance::kAuto;
  return result;
}

AnnotatedSample AnnotateSample(const PostRecord& post, const NormalizedClaim& claim,
                               const AnnotateConfig& cfg,
                               const AlignmentLinks* imported) {
  return AnnotateDetailed(post, claim, cfg, imported).sample;
}

ClaimSpan ProjectLabels(std::string_view source_span_text, std::string_view target_text,
                        std::string_view target_language, const AnnotateConfig& cfg,
                        std::string_view sample_id, const AlignmentLinks* imported) {
  if (unicode::Trim(source_span_text).empty()) {
    throw ValidationError("source span text for '" + std::string(sample_id) +
                          "' is empty");
  }
  PostRecord target;
  target.id = std::string(sample_id);
  target.language = std::string(target_language);
  target.text = std::string(target_text);
  const NormalizedClaim claim{target.id, std::string(source_span_text)};
  return AnnotateSample(target, claim, cfg, imported).spans.front();
}

ClaimSpan NormalizeLlmResponse(std::string_view response, const PostRecord& post,
                               const AnnotateConfig& cfg) {
  const std::string trimmed = unicode::Trim(response);
  if (trimmed.empty()) throw EmptyResponseError(post.id);
  // An answer copied from one sentence maps to itself; anything else goes
  // through the annotation pipeline.
  const std::vector<SentenceSpan> sentences =
      SplitSentences(post.text, post.language, cfg.language_table());
  for (std::size_t at = post.text.find(trimmed); at != std::string::npos;
       at = post.text.find(trimmed, at + 1)) {
    const int start = unicode::Length(std::string_view(post.text).substr(0, at));
    const int end = start + unicode::Length(trimmed);
    for (const SentenceSpan& sentence : sentences) {
      const auto starts = [&](const Token& t) { return t.start_char == start; };
      const auto ends = [&](const Token& t) { return t.end_char == end; };
      if (std::any_of(sentence.tokens.begin(), sentence.tokens.end(), starts) &&
          std::any_of(sentence.tokens.begin(), sentence.tokens.end(), ends)) {
        return {start, end};
      }
    }
  }
  const NormalizedClaim claim{post.id, trimmed};
  return AnnotateSample(post, claim, cfg).spans.front();
}

CorpusAnnotation AnnotateCorpus(const std::vector<PostRecord>& posts,
                                const std::vector<NormalizedClaim>& claims,
                                const AnnotateConfig& cfg,
                                const std::vector<AlignmentLinks>* imported, int jobs) {
  cfg.Validate();
  if (imported != nullptr && imported->size() != posts.size()) {
    throw ValidationError("alignment file has " + std::to_string(imported->size()) +
                          " records but the corpus has " +
                          std::to_string(posts.size()) + " posts");
  }
  std::unordered_map<std::string, const NormalizedClaim*> by_post;
  for (const NormalizedClaim& claim : claims) by_post[claim.post_id] = &claim;

  struct Outcome {
    std::optional<AnnotatedSample> sample;
    Reject reject;
  };
  std::vector<Outcome> outcomes(posts.size());
  ParallelFor(posts.size(), jobs, [&](std::size_t i) {
    const PostRecord& post = posts[i];
    Outcome& out = outcomes[i];
    const auto it = by_post.find(post.id);
    if (it == by_post.end()) {
      out.reject = {post.id, "missing_claim"};
      return;
    }
    try {
      out.sample = AnnotateSample(post, *it->second, cfg,
                                  imported ? &(*imported)[i] : nullptr);
    } catch (const NoAlignmentError&) {
      out.reject = {post.id, "no_alignment"};
    } catch (const ValidationError& e) {
      out.reject = {post.id, std::string("invalid: ") + e.what()};
    }
  });

  CorpusAnnotation result;
  for (Outcome& out : outcomes) {
    if (out.sample) {
      result.samples.push_back(std::move(*out.sample));
    } else {
      result.rejects.push_back(std::move(out.reject));
    }
  }
  return result;
}

}  // namespace xclaim
