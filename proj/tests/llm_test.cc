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

#define CPPHTTPLIB_OPENSSL_SUPPORT

#include "xclaim/llm.h"

#include <gtest/gtest.h>
#include <stdlib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "xclaim/error.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

namespace fs = std::filesystem;

PostRecord Post(std::string id, std::string language, std::string text) {
  PostRecord post;
  post.id = std::move(id);
  post.language = std::move(language);
  post.platform = "twitter";
  post.text = std::move(text);
  return post;
}

AnnotatedSample Gold(std::string id, std::string language, std::string text,
                     std::string_view span_text) {
  AnnotatedSample s;
  s.post = Post(std::move(id), std::move(language), std::move(text));
  const std::u32string full = unicode::Decode(s.post.text);
  const std::u32string part = unicode::Decode(span_text);
  const int start = static_cast<int>(full.find(part));
  s.spans = {{start, start + static_cast<int>(part.size())}};
  s.provenance = Provenance::kManual;
  return s;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> serial{0};
    path_ = fs::temp_directory_path() /
            ("xclaim_llm_" + std::to_string(::getpid()) + "_" + std::to_string(serial++));
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

// Counts calls and answers from a function of the prompt.
class ScriptedClient : public ChatClient {
 public:
  explicit ScriptedClient(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}
  std::string Send(const std::string& prompt, const LlmConfig&) const override {
    ++calls_;
    return fn_(prompt);
  }
  int calls() const { return calls_; }

 private:
  std::function<std::string(const std::string&)> fn_;
  mutable std::atomic<int> calls_{0};
};

int CountOccurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + 1)) {
    ++count;
  }
  return count;
}

TEST(PromptTest, Stems) {
  const PostRecord post = Post("p", "hi", "कुछ पाठ");
  EXPECT_NE(BuildPrompt(PromptKind::kIdentify, post, "", {}).find("Identify the central claim"),
            std::string::npos);
  EXPECT_NE(BuildPrompt(PromptKind::kExtract, post, "", {}).find("Extract the central claim"),
            std::string::npos);
  EXPECT_NE(
      BuildPrompt(PromptKind::kSpan, post, "", {}).find("Extract the central claim span"),
      std::string::npos);
  EXPECT_NE(BuildPrompt(PromptKind::kLanguage, post, "Hindi", {})
                .find("Extract the central claim in Hindi"),
            std::string::npos);
  EXPECT_THROW(BuildPrompt(PromptKind::kLanguage, post, "", {}), ValidationError);
  for (PromptKind k : {PromptKind::kIdentify, PromptKind::kExtract, PromptKind::kSpan,
                       PromptKind::kLanguage}) {
    EXPECT_EQ(ParsePromptKind(PromptKindName(k)), k);
  }
  EXPECT_THROW(ParsePromptKind("summarize"), ConfigError);
}

TEST(PromptTest, ExampleBlocksPrecedeQuery) {
  const PostRecord post = Post("q", "en", "The query post text.");
  const std::vector<PromptExample> examples = {
      {"First example post.", "first claim", ""},
      {"Second example post.", "second claim", "English"},
      {"Third example post.", "third claim", ""},
  };
  const std::string prompt = BuildPrompt(PromptKind::kExtract, post, "English", examples);
  EXPECT_EQ(CountOccurrences(prompt, "Example "), 3);
  EXPECT_EQ(CountOccurrences(prompt, "Claim: "), 3);
  EXPECT_LT(prompt.rfind("third claim"), prompt.find(post.text));
  ASSERT_GE(prompt.size(), post.text.size());
  EXPECT_EQ(prompt.substr(prompt.size() - post.text.size()), post.text);
  EXPECT_EQ(prompt, BuildPrompt(PromptKind::kExtract, post, "English", examples));
}

TEST(PromptTest, DistinctInputsGiveDistinctPrompts) {
  const PostRecord a = Post("a", "en", "Post A.");
  const PostRecord b = Post("b", "en", "Post B.");
  const std::vector<PromptExample> one = {{"Ex.", "ex", ""}};
  std::set<std::string> prompts;
  for (PromptKind k : {PromptKind::kIdentify, PromptKind::kExtract, PromptKind::kSpan,
                       PromptKind::kLanguage}) {
    for (const PostRecord* p : {&a, &b}) {
      prompts.insert(BuildPrompt(k, *p, "English", {}));
      prompts.insert(BuildPrompt(k, *p, "English", one));
    }
  }
  EXPECT_EQ(prompts.size(), 16u);
}

TEST(HashTest, KnownVectors) {
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_NE(CacheKey("m1", "p"), CacheKey("m2", "p"));
  EXPECT_NE(CacheKey("m", "1p"), CacheKey("m1", "p"));
}

TEST(CompleteTest, CachesRawResponse) {
  TempDir dir;
  LlmConfig cfg;
  cfg.model = "test-model";
  cfg.cache_dir = dir.str();
  ScriptedClient client([](const std::string&) { return "  the claim \n"; });
  EXPECT_EQ(Complete(client, "prompt", cfg), "the claim");
  EXPECT_EQ(client.calls(), 1);

  const fs::path entry = fs::path(dir.str()) / (CacheKey("test-model", "prompt") + ".txt");
  ASSERT_TRUE(fs::exists(entry));
  const auto written = fs::last_write_time(entry);
  std::ifstream in(entry, std::ios::binary);
  std::stringstream raw;
  raw << in.rdbuf();
  EXPECT_EQ(raw.str(), "  the claim \n");

  EXPECT_EQ(Complete(client, "prompt", cfg), "the claim");
  EXPECT_EQ(client.calls(), 1);
  EXPECT_EQ(fs::last_write_time(entry), written);

  cfg.model = "other-model";
  Complete(client, "prompt", cfg);
  EXPECT_EQ(client.calls(), 2);
}

TEST(CompleteTest, NoCacheDirectory) {
  ScriptedClient client([](const std::string&) { return "x"; });
  LlmConfig cfg;
  Complete(client, "p", cfg);
  Complete(client, "p", cfg);
  EXPECT_EQ(client.calls(), 2);
  EXPECT_THROW(Complete(client, "", cfg), ValidationError);
}

TEST(CompleteTest, RetriesTransientFailures) {
  std::atomic<int> failures{2};
  ScriptedClient client([&](const std::string&) -> std::string {
    if (failures-- > 0) throw TransportError("HTTP 503", true);
    return "ok";
  });
  std::vector<long long> sleeps;
  LlmConfig cfg;
  cfg.max_retries = 3;
  cfg.backoff_base = std::chrono::milliseconds(100);
  EXPECT_EQ(Complete(client, "p", cfg,
                     [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); }),
            "ok");
  EXPECT_EQ(client.calls(), 3);
  EXPECT_EQ(sleeps, (std::vector<long long>{100, 200}));
}

TEST(CompleteTest, GivesUpAfterMaxRetries) {
  ScriptedClient client(
      [](const std::string&) -> std::string { throw TransportError("HTTP 500", true); });
  LlmConfig cfg;
  cfg.max_retries = 2;
  int slept = 0;
  try {
    Complete(client, "p", cfg, [&](std::chrono::milliseconds) { ++slept; });
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.transient());
  }
  EXPECT_EQ(client.calls(), 3);
  EXPECT_EQ(slept, 2);
}

TEST(CompleteTest, NoRetryOnPermanentOrAuthFailures) {
  ScriptedClient permanent(
      [](const std::string&) -> std::string { throw TransportError("HTTP 400", false); });
  ScriptedClient auth(
      [](const std::string&) -> std::string { throw ConfigError("HTTP 401"); });
  LlmConfig cfg;
  auto no_sleep = [](std::chrono::milliseconds) {};
  EXPECT_THROW(Complete(permanent, "p", cfg, no_sleep), TransportError);
  EXPECT_THROW(Complete(auth, "p", cfg, no_sleep), ConfigError);
  EXPECT_EQ(permanent.calls(), 1);
  EXPECT_EQ(auth.calls(), 1);
  cfg.temperature = -1;
  EXPECT_THROW(Complete(permanent, "p", cfg), ConfigError);
}

TEST(CompleteTest, ConcurrentIdenticalPromptsCallOnce) {
  TempDir dir;
  LlmConfig cfg;
  cfg.cache_dir = dir.str();
  ScriptedClient client([](const std::string&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    return "answer";
  });
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] { EXPECT_EQ(Complete(client, "same", cfg), "answer"); });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(client.calls(), 1);
}

TEST(FixtureReplayerTest, ReplaysAndRoundTrips) {
  TempDir dir;
  fs::create_directories(dir.str());
  FixtureReplayer replayer;
  replayer.Record("prompt one", "response one");
  replayer.Record("प्रॉम्प्ट", "उत्तर\n");
  const std::string path = dir.str() + "/fixture.jsonl";
  replayer.Save(path);
  const FixtureReplayer loaded = FixtureReplayer::Load(path);
  EXPECT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded.Send("प्रॉम्प्ट", {}), "उत्तर\n");
  EXPECT_EQ(loaded.Send("prompt one", {}), "response one");
  try {
    loaded.Send("unknown", {});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_FALSE(e.transient());
  }
  EXPECT_EQ(loaded.calls(), 3u);

  std::ofstream(dir.str() + "/bad.jsonl") << "{\"prompt\": \"x\"}\n";
  EXPECT_THROW(FixtureReplayer::Load(dir.str() + "/bad.jsonl"), ParseError);
}

class HttpClientTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      res.status = status_;
      res.set_content(reply_, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    ::setenv("XCLAIM_TEST_KEY", "secret", 1);
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  std::string Url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int status_ = 200;
  std::string reply_ = R"({"choices":[{"message":{"role":"assistant","content":" claim "}}]})";
  std::string last_body_;
  std::string last_auth_;
};

TEST_F(HttpClientTest, SendsChatCompletion) {
  const HttpChatClient client(Url(), "XCLAIM_TEST_KEY");
  LlmConfig cfg;
  cfg.model = "gpt-test";
  EXPECT_EQ(client.Send("hello", cfg), " claim ");
  const nlohmann::json body = nlohmann::json::parse(last_body_);
  EXPECT_EQ(body["model"], "gpt-test");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(last_auth_, "Bearer secret");
}

TEST_F(HttpClientTest, StatusMapping) {
  const HttpChatClient client(Url(), "XCLAIM_TEST_KEY");
  status_ = 503;
  try {
    client.Send("x", {});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.transient());
  }
  status_ = 429;
  EXPECT_THROW(client.Send("x", {}), TransportError);
  status_ = 401;
  EXPECT_THROW(client.Send("x", {}), ConfigError);
  status_ = 400;
  try {
    client.Send("x", {});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_FALSE(e.transient());
  }
  status_ = 200;
  reply_ = "not json";
  EXPECT_THROW(client.Send("x", {}), TransportError);
}

TEST_F(HttpClientTest, MissingKeyIsConfigError) {
  const HttpChatClient client(Url(), "XCLAIM_UNSET_KEY_FOR_TEST");
  EXPECT_THROW(client.Send("x", {}), ConfigError);
  EXPECT_THROW(HttpChatClient("localhost:8080"), ConfigError);
}

TEST(HttpClientUnreachableTest, ConnectionFailureIsTransient) {
  ::setenv("XCLAIM_TEST_KEY", "secret", 1);
  const HttpChatClient client("http://127.0.0.1:1/v1", "XCLAIM_TEST_KEY",
                              std::chrono::seconds(2));
  try {
    client.Send("x", {});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.transient());
  }
}

std::vector<AnnotatedSample> TestCorpus() {
  return {
      Gold("t1", "en", "Officials warned today. The vaccine causes harm to kids.",
           "vaccine causes"),
      Gold("t2", "en", "Floods hit the coast. Schools will close on Monday.",
           "Schools will close"),
      Gold("t3", "hi", "आज बारिश हुई। पुल गिर गया।", "पुल गिर"),
      Gold("t4", "ta", "நேற்று மழை பெய்தது. பாலம் இடிந்து விழுந்தது.", "பாலம் இடிந்து"),
  };
}

std::vector<AnnotatedSample> TrainCorpus() {
  return {
      Gold("r1", "en", "Drinking bleach cures covid says post.", "bleach cures covid"),
      Gold("r2", "en", "The moon landing was staged.", "moon landing was staged"),
      Gold("r3", "hi", "यह खबर झूठी है।", "खबर झूठी"),
      Gold("r4", "en", "Nothing here.", "Nothing"),
  };
}

AnnotateConfig LexicalConfig() {
  AnnotateConfig cfg;
  cfg.measure = SimilarityMeasure::kRouge1F1;
  cfg.aligner = AlignerKind::kLexical;
  return cfg;
}

// A replayer that answers each test prompt with the given function of gold.
FixtureReplayer RecordAnswers(const std::vector<AnnotatedSample>& test,
                              const std::vector<PromptExample>& examples, PromptKind kind,
                              const std::function<std::string(const AnnotatedSample&)>& answer) {
  FixtureReplayer replayer;
  for (const AnnotatedSample& s : test) {
    const std::string name = LanguageTable::Default().Get(s.post.language).name;
    replayer.Record(BuildPrompt(kind, s.post, name, examples), answer(s));
  }
  return replayer;
}

std::string SpanText(const AnnotatedSample& s) {
  return unicode::Slice(s.post.text, s.spans[0].start_char, s.spans[0].end_char);
}

TEST(SelectExamplesTest, SeededAndBounded) {
  const auto train = TrainCorpus();
  const auto a = SelectExamples(train, 4, 7, LanguageTable::Default());
  const auto b = SelectExamples(train, 4, 7, LanguageTable::Default());
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].post_text, b[i].post_text);
  std::set<std::string> claims;
  for (const auto& e : a) claims.insert(e.claim_span_text);
  EXPECT_TRUE(claims.count("खबर झूठी"));
  EXPECT_THROW(SelectExamples(train, 5, 7, LanguageTable::Default()), ValidationError);
  EXPECT_TRUE(SelectExamples(train, 0, 7, LanguageTable::Default()).empty());
}

TEST(RunLlmEvalTest, EchoGoldIsPerfect) {
  const auto test = TestCorpus();
  const auto train = TrainCorpus();
  LlmConfig llm;
  LlmRunOptions options;
  options.kind = PromptKind::kLanguage;
  options.shots = 1;
  options.jobs = 3;
  const auto examples = SelectExamples(train, 1, llm.example_seed, LanguageTable::Default());
  const FixtureReplayer echo = RecordAnswers(test, examples, options.kind, SpanText);
  const LlmRunResult run = RunLlmEval(test, train, echo, LexicalConfig(), llm, options);
  EXPECT_EQ(run.eval.precision, 1.0);
  EXPECT_EQ(run.eval.recall, 1.0);
  EXPECT_EQ(run.eval.f1, 1.0);
  ASSERT_EQ(run.predictions.size(), test.size());
  EXPECT_EQ(run.predictions[2].post.id, "t3");
  EXPECT_EQ(run.predictions[2].provenance, Provenance::kLlm);
}

TEST(RunLlmEvalTest, EmptyResponsesScoreZero) {
  const auto test = TestCorpus();
  ScriptedClient empty([](const std::string&) { return "  "; });
  const LlmRunResult run =
      RunLlmEval(test, TrainCorpus(), empty, LexicalConfig(), {}, LlmRunOptions{});
  EXPECT_EQ(run.eval.precision, 0);
  EXPECT_EQ(run.eval.recall, 0);
  EXPECT_EQ(run.empty_responses, 4);
  for (const auto& p : run.predictions) EXPECT_TRUE(p.spans.empty());
}

TEST(RunLlmEvalTest, HalfSpanHalvesRecall) {
  // Gold "vaccine causes" has 14 characters; "vaccine" covers 7.
  const std::vector<AnnotatedSample> test = {TestCorpus()[0]};
  ScriptedClient half([](const std::string&) { return "vaccine"; });
  const LlmRunResult run =
      RunLlmEval(test, TrainCorpus(), half, LexicalConfig(), {}, LlmRunOptions{});
  EXPECT_DOUBLE_EQ(run.eval.recall, 0.5);
  EXPECT_DOUBLE_EQ(run.eval.precision, 1.0);
}

TEST(RunLlmEvalTest, UnalignedAnswersAreEmptyPredictions) {
  ScriptedClient other([](const std::string&) { return "completely different words"; });
  const LlmRunResult run =
      RunLlmEval(TestCorpus(), TrainCorpus(), other, LexicalConfig(), {}, LlmRunOptions{});
  EXPECT_EQ(run.unaligned_responses, 4);
  EXPECT_EQ(run.eval.recall, 0);
}

TEST(RunLlmEvalTest, CachedRerunIssuesNoCalls) {
  TempDir dir;
  LlmConfig llm;
  llm.cache_dir = dir.str();
  ScriptedClient client([](const std::string& prompt) {
    return prompt.substr(prompt.rfind("Post: ") + 6);
  });
  LlmRunOptions options;
  options.shots = 4;
  options.jobs = 2;
  const LlmRunResult first =
      RunLlmEval(TestCorpus(), TrainCorpus(), client, LexicalConfig(), llm, options);
  EXPECT_EQ(client.calls(), 4);
  const LlmRunResult second =
      RunLlmEval(TestCorpus(), TrainCorpus(), client, LexicalConfig(), llm, options);
  EXPECT_EQ(client.calls(), 4);
  EXPECT_EQ(first.eval.f1, second.eval.f1);
}

TEST(RunLlmEvalTest, AbortedRunResumesFromCache) {
  TempDir dir;
  LlmConfig llm;
  llm.cache_dir = dir.str();
  llm.max_retries = 0;
  std::atomic<bool> outage{true};
  ScriptedClient client([&](const std::string& prompt) -> std::string {
    if (outage && prompt.find("பாலம்") != std::string::npos) {
      throw TransportError("HTTP 502", true);
    }
    return "x";
  });
  const auto test = TestCorpus();
  EXPECT_THROW(RunLlmEval(test, TrainCorpus(), client, LexicalConfig(), llm, {}),
               TransportError);
  const int before = client.calls();
  outage = false;
  RunLlmEval(test, TrainCorpus(), client, LexicalConfig(), llm, {});
  EXPECT_EQ(client.calls() - before, 4 - (before - 1));
}

TEST(RunLlmEvalTest, UnsupportedShots) {
  ScriptedClient client([](const std::string&) { return "x"; });
  LlmRunOptions options;
  options.shots = 3;
  EXPECT_THROW(RunLlmEval(TestCorpus(), TrainCorpus(), client, LexicalConfig(), {}, options),
               ConfigError);
}

}  // namespace
}  // namespace xclaim
