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

// Prompting chat models for claim spans: prompt templates, a cached and
// retrying completion call, and end-to-end evaluation runs.

#ifndef XCLAIM_LLM_H_
#define XCLAIM_LLM_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xclaim/annotate.h"
#include "xclaim/corpus.h"
#include "xclaim/eval.h"

namespace xclaim {

enum class PromptKind { kIdentify, kExtract, kSpan, kLanguage };

std::string_view PromptKindName(PromptKind kind);
PromptKind ParsePromptKind(std::string_view name);

// Instruction stem; kLanguage interpolates the language name.
std::string PromptStem(PromptKind kind, std::string_view language_name = {});

struct PromptExample {
  std::string post_text;
  std::string claim_span_text;
  std::string language;  // optional display name
};

// Layout:
//
//   <stem> from the following social media post. Answer with the claim only.
//
//   Example 1:
//   Post: <text>
//   Claim: <span text>
//
//   ...
//
//   Post: <query post text>
//
// Throws ValidationError when kLanguage lacks a language name.
std::string BuildPrompt(PromptKind kind, const PostRecord& post,
                        std::string_view language_name,
                        std::span<const PromptExample> examples);

struct LlmConfig {
  std::string model;
  double temperature = 0;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  std::string cache_dir;  // empty: no caching
  std::uint64_t example_seed = 0;

  // Throws ConfigError for negative temperature or retries.
  void Validate() const;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;

  // Returns the raw response text. Throws TransportError (transient or not)
  // or ConfigError for authentication failures. Must be thread-safe.
  virtual std::string Send(const std::string& prompt, const LlmConfig& cfg) const = 0;
};

// OpenAI-style chat completion endpoint. The API key is read from the named
// environment variable at send time and sent as a bearer token.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(std::string url, std::string api_key_env = "XCLAIM_API_KEY",
                          std::chrono::seconds timeout = std::chrono::seconds(60));

  std::string Send(const std::string& prompt, const LlmConfig& cfg) const override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::string api_key_env_;
  std::chrono::seconds timeout_;
};

// Replays recorded prompt/response pairs. Unknown prompts raise a
// non-transient TransportError.
class FixtureReplayer : public ChatClient {
 public:
  FixtureReplayer() = default;
  FixtureReplayer(FixtureReplayer&& other) noexcept
      : responses_(std::move(other.responses_)), calls_(other.calls_.load()) {}

  // JSONL records {"prompt": ..., "response": ...}.
  static FixtureReplayer Load(const std::string& path);
  void Save(const std::string& path) const;

  void Record(std::string prompt, std::string response);
  std::size_t size() const { return responses_.size(); }
  std::size_t calls() const { return calls_; }

  std::string Send(const std::string& prompt, const LlmConfig& cfg) const override;

 private:
  std::map<std::string, std::string> responses_;
  mutable std::atomic<std::size_t> calls_{0};
};

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);

// Cache key of a (model, prompt) pair.
std::string CacheKey(std::string_view model, std::string_view prompt);

// One file per key holding the raw response bytes. Writes go through a
// temporary file and a rename.
class ResponseCache {
 public:
  explicit ResponseCache(std::string directory);

  std::optional<std::string> Get(const std::string& key) const;
  void Put(const std::string& key, const std::string& response) const;

 private:
  std::string directory_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Cached completion. On a miss the client is called up to 1 + max_retries
// times, sleeping backoff_base * 2^attempt after each transient failure.
// Returns the response with surrounding whitespace removed.
std::string Complete(const ChatClient& client, const std::string& prompt,
                     const LlmConfig& cfg, const Sleeper& sleep = {});

inline constexpr int kSupportedShots[] = {0, 1, 4, 7, 10};

// The first k of the seeded shuffle of `train` samples that have spans. A
// sample's claim text is its spans' texts joined by single spaces.
std::vector<PromptExample> SelectExamples(const std::vector<AnnotatedSample>& train,
                                          int k, std::uint64_t seed,
                                          const LanguageTable& languages);

struct LlmRunOptions {
  PromptKind kind = PromptKind::kExtract;
  int shots = 0;
  EvalOptions eval;
  int jobs = 1;
};

struct LlmRunResult {
  SpanEvalResult eval;
  std::vector<AnnotatedSample> predictions;  // provenance llm, gold order
  int empty_responses = 0;
  int unaligned_responses = 0;
};

// Prompts the model for every test post, maps each answer onto the post and
// scores against gold. Empty or unalignable answers count as empty
// predictions. Transport and configuration errors abort the run; responses
// already cached make a rerun resume where it stopped.
LlmRunResult RunLlmEval(const std::vector<AnnotatedSample>& test,
                        const std::vector<AnnotatedSample>& train,
                        const ChatClient& client, const AnnotateConfig& annotate,
                        const LlmConfig& llm, const LlmRunOptions& options,
                        const Sleeper& sleep = {});

}  // namespace xclaim

#endif  // XCLAIM_LLM_H_
