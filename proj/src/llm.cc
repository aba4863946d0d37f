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

#include "xclaim/llm.h"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "xclaim/error.h"
#include "xclaim/parallel.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kStemTail =
    " from the following social media post. Answer with the claim only.";

// One mutex per cache key, so concurrent requests for the same prompt
// reach the client once.
std::shared_ptr<std::mutex> KeyMutex(const std::string& key) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::weak_ptr<std::mutex>> registry;
  std::lock_guard<std::mutex> lock(registry_mutex);
  std::shared_ptr<std::mutex> m = registry[key].lock();
  if (!m) {
    m = std::make_shared<std::mutex>();
    registry[key] = m;
  }
  return m;
}

std::string LanguageName(const LanguageTable& table, const std::string& code) {
  return table.Contains(code) ? table.Get(code).name : code;
}

}  // namespace

std::string_view PromptKindName(PromptKind kind) {
  switch (kind) {
    case PromptKind::kIdentify:
      return "identify";
    case PromptKind::kExtract:
      return "extract";
    case PromptKind::kSpan:
      return "span";
    case PromptKind::kLanguage:
      return "language";
  }
  return "extract";
}

PromptKind ParsePromptKind(std::string_view name) {
  for (PromptKind k : {PromptKind::kIdentify, PromptKind::kExtract, PromptKind::kSpan,
                       PromptKind::kLanguage}) {
    if (name == PromptKindName(k)) return k;
  }
  throw ConfigError("unknown prompt kind '" + std::string(name) + "'");
}

std::string PromptStem(PromptKind kind, std::string_view language_name) {
  switch (kind) {
    case PromptKind::kIdentify:
      return "Identify the central claim";
    case PromptKind::kExtract:
      return "Extract the central claim";
    case PromptKind::kSpan:
      return "Extract the central claim span";
    case PromptKind::kLanguage:
      if (unicode::Trim(language_name).empty()) {
        throw ValidationError("the language prompt needs a language name");
      }
      return "Extract the central claim in " + std::string(language_name);
  }
  return {};
}

std::string BuildPrompt(PromptKind kind, const PostRecord& post,
                        std::string_view language_name,
                        std::span<const PromptExample> examples) {
  std::string prompt = PromptStem(kind, language_name);
  prompt += kStemTail;
  prompt += "\n\n";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    prompt += "Example " + std::to_string(i + 1) + ":\n";
    if (!examples[i].language.empty()) prompt += "Language: " + examples[i].language + "\n";
    prompt += "Post: " + examples[i].post_text + "\n";
    prompt += "Claim: " + examples[i].claim_span_text + "\n\n";
  }
  prompt += "Post: " + post.text;
  return prompt;
}

void LlmConfig::Validate() const {
  if (!(temperature >= 0)) throw ConfigError("temperature must be >= 0");
  if (max_retries < 0) throw ConfigError("max retries must be >= 0");
  if (backoff_base.count() < 0) throw ConfigError("backoff base must be >= 0");
}

FixtureReplayer FixtureReplayer::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  FixtureReplayer replayer;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (unicode::Trim(line).empty()) continue;
    try {
      const json record = json::parse(line);
      replayer.Record(record.at("prompt").get<std::string>(),
                      record.at("response").get<std::string>());
    } catch (const json::exception& e) {
      throw ParseError(path, line_number, e.what());
    }
  }
  return replayer;
}

void FixtureReplayer::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& [prompt, response] : responses_) {
    out << json{{"prompt", prompt}, {"response", response}}.dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

void FixtureReplayer::Record(std::string prompt, std::string response) {
  responses_[std::move(prompt)] = std::move(response);
}

std::string FixtureReplayer::Send(const std::string& prompt, const LlmConfig&) const {
  ++calls_;
  const auto it = responses_.find(prompt);
  if (it == responses_.end()) {
    throw TransportError("no recorded response for prompt " + Sha256Hex(prompt), false);
  }
  return it->second;
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string CacheKey(std::string_view model, std::string_view prompt) {
  std::string material(model);
  material.push_back('\0');
  material.append(prompt);
  return Sha256Hex(material);
}

ResponseCache::ResponseCache(std::string directory) : directory_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) throw IoError("cannot create cache directory " + directory_ + ": " + ec.message());
}

std::optional<std::string> ResponseCache::Get(const std::string& key) const {
  std::ifstream in(fs::path(directory_) / (key + ".txt"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

void ResponseCache::Put(const std::string& key, const std::string& response) const {
  static std::atomic<unsigned long> serial{0};
  const fs::path target = fs::path(directory_) / (key + ".txt");
  const fs::path temp = fs::path(directory_) / (key + ".tmp." + std::to_string(::getpid()) +
                                                "." + std::to_string(serial++));
  {
    std::ofstream out(temp, std::ios::binary);
    if (!out) throw IoError("cannot write " + temp.string());
    out << response;
    out.flush();
    if (!out) throw IoError("write failed for " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw IoError("cannot move cache entry into " + target.string());
  }
}

std::string Complete(const ChatClient& client, const std::string& prompt,
                     const LlmConfig& cfg, const Sleeper& sleep) {
  cfg.Validate();
  if (prompt.empty()) throw ValidationError("prompt is empty");
  std::optional<ResponseCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);
  const std::string key = CacheKey(cfg.model, prompt);
  const std::shared_ptr<std::mutex> key_mutex = KeyMutex(key);
  std::lock_guard<std::mutex> lock(*key_mutex);

  if (cache) {
    if (std::optional<std::string> hit = cache->Get(key)) return unicode::Trim(*hit);
  }
  std::string raw;
  for (int attempt = 0;; ++attempt) {
    try {
      raw = client.Send(prompt, cfg);
      break;
    } catch (const TransportError& e) {
      if (!e.transient()) throw;
      if (attempt >= cfg.max_retries) {
        throw TransportError("giving up after " + std::to_string(attempt + 1) +
                                 " attempts: " + e.what(),
                             true);
      }
      const auto delay = cfg.backoff_base * (1LL << std::min(attempt, 20));
      if (sleep) {
        sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
    }
  }
  if (cache) cache->Put(key, raw);
  return unicode::Trim(raw);
}

std::vector<PromptExample> SelectExamples(const std::vector<AnnotatedSample>& train,
                                          int k, std::uint64_t seed,
                                          const LanguageTable& languages) {
  if (k < 0) throw ConfigError("number of examples must be >= 0");
  std::vector<const AnnotatedSample*> pool;
  for (const AnnotatedSample& s : train) {
    if (!s.spans.empty()) pool.push_back(&s);
  }
  if (static_cast<std::size_t>(k) > pool.size()) {
    throw ValidationError("need " + std::to_string(k) + " examples but the training data has " +
                          std::to_string(pool.size()) + " annotated samples");
  }
  const std::vector<std::size_t> order = SeededPermutation(pool.size(), seed);
  std::vector<PromptExample> examples;
  for (int i = 0; i < k; ++i) {
    const AnnotatedSample& s = *pool[order[i]];
    std::vector<ClaimSpan> spans = s.spans;
    std::sort(spans.begin(), spans.end());
    PromptExample example;
    example.post_text = s.post.text;
    for (const ClaimSpan& span : spans) {
      if (!example.claim_span_text.empty()) example.claim_span_text.push_back(' ');
      example.claim_span_text += unicode::Slice(s.post.text, span.start_char, span.end_char);
    }
    example.language = LanguageName(languages, s.post.language);
    examples.push_back(std::move(example));
  }
  return examples;
}

LlmRunResult RunLlmEval(const std::vector<AnnotatedSample>& test,
                        const std::vector<AnnotatedSample>& train,
                        const ChatClient& client, const AnnotateConfig& annotate,
                        const LlmConfig& llm, const LlmRunOptions& options,
                        const Sleeper& sleep) {
  annotate.Validate();
  llm.Validate();
  if (std::find(std::begin(kSupportedShots), std::end(kSupportedShots), options.shots) ==
      std::end(kSupportedShots)) {
    throw ConfigError("unsupported number of examples " + std::to_string(options.shots) +
                      " (use 0, 1, 4, 7 or 10)");
  }
  const LanguageTable& table = annotate.language_table();
  const std::vector<PromptExample> examples =
      SelectExamples(train, options.shots, llm.example_seed, table);

  LlmRunResult result;
  result.predictions.resize(test.size());
  std::atomic<int> empty{0}, unaligned{0};
  ParallelFor(test.size(), options.jobs, [&](std::size_t i) {
    const PostRecord& post = test[i].post;
    const std::string prompt =
        BuildPrompt(options.kind, post, LanguageName(table, post.language), examples);
    const std::string response = Complete(client, prompt, llm, sleep);
    AnnotatedSample& pred = result.predictions[i];
    pred.post = post;
    pred.provenance = Provenance::kLlm;
    try {
      pred.spans = {NormalizeLlmResponse(response, post, annotate)};
    } catch (const EmptyResponseError&) {
      ++empty;
    } catch (const NoAlignmentError&) {
      ++unaligned;
    }
  });
  result.empty_responses = empty;
  result.unaligned_responses = unaligned;
  result.eval = EvaluateSamples(result.predictions, test, options.eval, options.jobs);
  return result;
}

}  // namespace xclaim
