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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xclaim/align.h"
#include "xclaim/annotate.h"
#include "xclaim/corpus.h"
#include "xclaim/embedding.h"
#include "xclaim/error.h"
#include "xclaim/eval.h"
#include "xclaim/llm.h"
#include "xclaim/parallel.h"
#include "xclaim/segment.h"
#include "xclaim/tags.h"
#include "xclaim/unicode.h"

namespace xclaim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr char kVersion[] = "0.1.0";

struct GlobalOptions {
  bool json = false;
  int jobs = DefaultJobs();
  std::string languages;
};

struct AnnotateOptions {
  std::string measure = std::string(MeasureName(kDefaultMeasure));
  std::string aligner = "lexical";
  std::string span_rule = "first-last";
  double threshold = SoftAlignConfig{}.threshold;
  double softmax_temperature = SoftAlignConfig{}.temperature;
  std::string links;
  std::string embeddings;
  int embedding_dim = 256;
};

struct EvalFlags {
  std::string unit = "char";
  std::string average = "micro";
};

struct FilterOptions {
  std::string posts, claims, out, out_claims, rejects;
  std::vector<std::string> media_keywords = FilterRules{}.media_keywords;
  int min_words = FilterRules{}.min_words;
  int max_words = FilterRules{}.max_words;
};

struct SplitOptions {
  std::string in, train, dev;
  double ratio = 0.8;
  std::uint64_t seed = 0;
};

struct StatsOptions {
  std::vector<std::string> in;
  std::string split;
};

struct AnnotateCommandOptions {
  std::string posts, claims, out, rejects;
};

struct ProjectOptions {
  std::string source, target, out, rejects;
};

struct EncodeOptions {
  std::string in, out, posts;
  std::string scheme = "IO";
  bool decode = false;
};

struct EvalOptionsCli {
  std::string pred, gold;
  bool per_doc = false;
};

struct PromptOptions {
  std::string posts, train, out;
  std::vector<std::string> ids;
  std::string kind = "extract";
  int shots = 0;
  std::uint64_t seed = 0;
};

struct LlmRunCliOptions {
  std::string test, train, out, endpoint, fixture, cache;
  std::string api_key_env = "XCLAIM_API_KEY";
  std::string model;
  std::string kind = "extract";
  int shots = 0;
  int retries = LlmConfig{}.max_retries;
  long long backoff_ms = LlmConfig{}.backoff_base.count();
  double temperature = 0;
  std::uint64_t seed = 0;
};

// --- helpers --------------------------------------------------------------

void RequireFile(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw IoError("no such file: " + path);
}

void RequireDirectory(const std::string& path) {
  std::error_code ec;
  if (!fs::is_directory(path, ec)) throw IoError("no such directory: " + path);
}

void RequireOutput(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) RequireDirectory(parent.string());
}

std::string Fixed(double value, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << value;
  return s.str();
}

std::string Percent(double value) { return Fixed(100 * value, 2); }

void PrintJson(std::ostream& out, const ordered_json& report) {
  out << report.dump(2) << '\n';
}

std::shared_ptr<const LanguageTable> Languages(const GlobalOptions& g) {
  if (g.languages.empty()) return nullptr;
  RequireFile(g.languages);
  return std::make_shared<const LanguageTable>(LanguageTable::LoadFile(g.languages));
}

const LanguageTable& TableOf(const std::shared_ptr<const LanguageTable>& t) {
  return t ? *t : LanguageTable::Default();
}

void AddAnnotateFlags(CLI::App* sub, AnnotateOptions& o) {
  sub->add_option("--measure", o.measure,
                  "Sentence selection measure: rouge1, rougeL, meteor, bertscore-p, "
                  "bertscore-r, bertscore-f1")
      ->capture_default_str();
  sub->add_option("--aligner", o.aligner, "Aligner: lexical, soft or imported")
      ->capture_default_str();
  sub->add_option("--span-rule", o.span_rule, "Span rule: first-last or longest-contig")
      ->capture_default_str();
  sub->add_option("--threshold", o.threshold, "Soft aligner link threshold")
      ->capture_default_str();
  sub->add_option("--softmax-temperature", o.softmax_temperature,
                  "Soft aligner softmax temperature")
      ->capture_default_str();
  sub->add_option("--links", o.links, "Pharaoh links, one line per post (imported aligner)");
  sub->add_option("--embeddings", o.embeddings,
                  "Embedding store directory; without it hashed trigram vectors are used");
  sub->add_option("--embedding-dim", o.embedding_dim, "Dimension of hashed trigram vectors")
      ->capture_default_str();
}

void AddEvalFlags(CLI::App* sub, EvalFlags& o) {
  sub->add_option("--unit", o.unit, "Overlap unit: char or token")->capture_default_str();
  sub->add_option("--average", o.average, "Averaging: micro or macro")->capture_default_str();
}

struct ResolvedAnnotate {
  AnnotateConfig config;
  std::string provider;  // none, hashed or store
};

ResolvedAnnotate ResolveAnnotate(const AnnotateOptions& o,
                                 std::shared_ptr<const LanguageTable> languages) {
  ResolvedAnnotate r;
  AnnotateConfig& cfg = r.config;
  cfg.measure = ParseMeasure(o.measure);
  cfg.aligner = ParseAligner(o.aligner);
  cfg.span_rule = ParseSpanRule(o.span_rule);
  cfg.soft.threshold = o.threshold;
  cfg.soft.temperature = o.softmax_temperature;
  cfg.languages = std::move(languages);
  if (cfg.aligner == AlignerKind::kImported && o.links.empty()) {
    throw ConfigError("the imported aligner needs --links");
  }
  if (!o.links.empty()) RequireFile(o.links);
  r.provider = "none";
  if (!o.embeddings.empty()) {
    RequireDirectory(o.embeddings);
    cfg.provider = std::make_shared<FileEmbeddingStore>(o.embeddings);
    r.provider = "store";
  } else if (NeedsEmbeddings(cfg.measure) || cfg.aligner == AlignerKind::kSoft) {
    if (o.embedding_dim < 1) throw ConfigError("--embedding-dim must be positive");
    cfg.provider = std::make_shared<HashedTrigramProvider>(o.embedding_dim);
    r.provider = "hashed";
  }
  cfg.Validate();
  return r;
}

ordered_json ConfigJson(const ResolvedAnnotate& r) {
  return {
      {"measure", MeasureName(r.config.measure)},
      {"aligner", AlignerName(r.config.aligner)},
      {"span_rule", SpanRuleName(r.config.span_rule)},
      {"provider", r.provider},
  };
}

void SaveRejects(const std::string& path, const std::vector<Reject>& rejects) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const Reject& r : rejects) {
    out << json{{"id", r.id}, {"reason", r.reason}}.dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

// Reason category without the message detail.
std::string ReasonKey(const std::string& reason) {
  return reason.substr(0, reason.find(':'));
}

ordered_json RejectCounts(const std::vector<Reject>& rejects) {
  std::map<std::string, int> counts;
  for (const Reject& r : rejects) ++counts[ReasonKey(r.reason)];
  ordered_json out = ordered_json::object();
  for (const auto& [reason, n] : counts) out[reason] = n;
  return out;
}

void PrintRejectSummary(std::ostream& out, const std::vector<Reject>& rejects) {
  std::map<std::string, int> counts;
  for (const Reject& r : rejects) ++counts[ReasonKey(r.reason)];
  for (const auto& [reason, n] : counts) out << "  " << reason << ": " << n << '\n';
}

ordered_json StatsJson(const std::optional<LengthStats>& s) {
  if (!s) return nullptr;
  return {{"mean", s->mean}, {"stddev", s->stddev}};
}

std::string StatsCell(const std::optional<LengthStats>& s) {
  return s ? Fixed(s->mean, 2) + " ± " + Fixed(s->stddev, 2) : "-";
}

// "xclaim.en.train.jsonl" -> "train".
std::string SplitFromPath(const std::string& path) {
  std::string stem = fs::path(path).filename().string();
  for (const char* suffix : {".jsonl", ".json"}) {
    const std::string s(suffix);
    if (stem.size() > s.size() && stem.compare(stem.size() - s.size(), s.size(), s) == 0) {
      stem.resize(stem.size() - s.size());
      break;
    }
  }
  const std::size_t dot = stem.rfind('.');
  const std::string last = dot == std::string::npos ? stem : stem.substr(dot + 1);
  for (const char* known : {"train", "dev", "test"}) {
    if (last == known) return last;
  }
  return "all";
}

ordered_json EvalJson(const SpanEvalResult& r, bool per_doc) {
  ordered_json report = {
      {"documents", r.documents.size()},
      {"precision", r.precision},
      {"recall", r.recall},
      {"f1", r.f1},
  };
  if (per_doc) {
    ordered_json docs = ordered_json::array();
    for (const DocumentScores& d : r.documents) {
      docs.push_back({{"id", d.id},
                      {"p_num", d.p_num},
                      {"p_den", d.p_den},
                      {"r_num", d.r_num},
                      {"r_den", d.r_den}});
    }
    report["per_document"] = docs;
  }
  return report;
}

void PrintEvalTable(std::ostream& out, const SpanEvalResult& r, bool per_doc) {
  out << "documents  " << r.documents.size() << '\n'
      << "precision  " << Percent(r.precision) << '\n'
      << "recall     " << Percent(r.recall) << '\n'
      << "f1         " << Percent(r.f1) << '\n';
  if (per_doc) {
    out << '\n' << "id\tp_num\tp_den\tr_num\tr_den\n";
    for (const DocumentScores& d : r.documents) {
      out << d.id << '\t' << Fixed(d.p_num, 4) << '\t' << d.p_den << '\t'
          << Fixed(d.r_num, 4) << '\t' << d.r_den << '\n';
    }
  }
}

EvalOptions ResolveEval(const EvalFlags& f) {
  return {ParseUnit(f.unit), ParseAveraging(f.average)};
}

std::string LanguageName(const LanguageTable& table, const std::string& code) {
  return table.Contains(code) ? table.Get(code).name : code;
}

// --- subcommands ------------------------------------------------------------

int RunFilter(const GlobalOptions& g, const FilterOptions& o, std::ostream& out) {
  RequireFile(o.posts);
  RequireFile(o.claims);
  RequireOutput(o.out);
  RequireOutput(o.out_claims);
  RequireOutput(o.rejects);
  const auto languages = Languages(g);
  const std::vector<PostRecord> posts = LoadPosts(o.posts, TableOf(languages));
  const std::vector<NormalizedClaim> claims = LoadClaims(o.claims);
  std::map<std::string, const NormalizedClaim*> by_post;
  for (const NormalizedClaim& c : claims) by_post[c.post_id] = &c;

  FilterRules rules;
  rules.media_keywords = o.media_keywords;
  rules.min_words = o.min_words;
  rules.max_words = o.max_words;
  if (rules.min_words < 0 || rules.max_words < rules.min_words) {
    throw ConfigError("word bounds must satisfy 0 <= min-words <= max-words");
  }

  std::vector<std::string> reasons(posts.size());
  ParallelFor(posts.size(), g.jobs, [&](std::size_t i) {
    const auto it = by_post.find(posts[i].id);
    reasons[i] = it == by_post.end()
                     ? "missing_claim"
                     : std::string(FilterReasonName(FilterSample(posts[i], *it->second, rules)
                                                        .reason));
  });

  std::vector<PostRecord> kept;
  std::vector<NormalizedClaim> kept_claims;
  std::vector<Reject> rejects;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (reasons[i] == FilterReasonName(FilterReason::kOk)) {
      kept.push_back(posts[i]);
      kept_claims.push_back(*by_post.at(posts[i].id));
    } else {
      rejects.push_back({posts[i].id, reasons[i]});
    }
  }
  SavePosts(o.out, kept);
  if (!o.out_claims.empty()) SaveClaims(o.out_claims, kept_claims);
  SaveRejects(o.rejects, rejects);

  if (g.json) {
    PrintJson(out, {{"command", "filter"},
                    {"total", posts.size()},
                    {"accepted", kept.size()},
                    {"rejected", RejectCounts(rejects)}});
  } else {
    out << "posts     " << posts.size() << '\n'
        << "accepted  " << kept.size() << '\n'
        << "rejected  " << rejects.size() << '\n';
    PrintRejectSummary(out, rejects);
  }
  return kExitOk;
}

int RunSplit(const GlobalOptions& g, const SplitOptions& o, std::ostream& out) {
  RequireFile(o.in);
  RequireOutput(o.train);
  RequireOutput(o.dev);
  const auto languages = Languages(g);
  std::vector<AnnotatedSample> samples = LoadAnnotated(o.in, TableOf(languages));
  const std::size_t total = samples.size();
  const TrainDevSplit split = SplitTrainDev(std::move(samples), o.ratio, o.seed);
  SaveAnnotated(o.train, split.train);
  SaveAnnotated(o.dev, split.dev);
  if (g.json) {
    PrintJson(out, {{"command", "split"},
                    {"total", total},
                    {"train", split.train.size()},
                    {"dev", split.dev.size()},
                    {"ratio", o.ratio},
                    {"seed", o.seed}});
  } else {
    out << "total  " << total << '\n'
        << "train  " << split.train.size() << '\n'
        << "dev    " << split.dev.size() << '\n';
  }
  return kExitOk;
}

int RunStats(const GlobalOptions& g, const StatsOptions& o, std::ostream& out) {
  for (const std::string& path : o.in) RequireFile(path);
  const auto languages = Languages(g);
  std::vector<SplitSamples> splits;
  for (const std::string& path : o.in) {
    splits.push_back({o.split.empty() ? SplitFromPath(path) : o.split,
                      LoadAnnotated(path, TableOf(languages))});
  }
  const CorpusStats stats = ComputeCorpusStats(splits);
  if (g.json) {
    ordered_json groups = ordered_json::array();
    for (const GroupStats& s : stats.groups) {
      groups.push_back({{"split", s.split},
                        {"language", s.language},
                        {"count", s.count},
                        {"span_count", s.span_count},
                        {"text_tokens", StatsJson(s.text_tokens)},
                        {"text_chars", StatsJson(s.text_chars)},
                        {"span_tokens", StatsJson(s.span_tokens)},
                        {"span_chars", StatsJson(s.span_chars)}});
    }
    PrintJson(out, {{"command", "stats"}, {"groups", groups}});
  } else {
    out << "split\tlang\tcount\ttext len (tokens)\tclaim len (tokens)\t"
           "text len (chars)\tclaim len (chars)\n";
    for (const GroupStats& s : stats.groups) {
      out << s.split << '\t' << s.language << '\t' << s.count << '\t'
          << StatsCell(s.text_tokens) << '\t' << StatsCell(s.span_tokens) << '\t'
          << StatsCell(s.text_chars) << '\t' << StatsCell(s.span_chars) << '\n';
    }
  }
  return kExitOk;
}

int RunAnnotate(const GlobalOptions& g, const AnnotateCommandOptions& o,
                const AnnotateOptions& a, std::ostream& out) {
  RequireFile(o.posts);
  RequireFile(o.claims);
  RequireOutput(o.out);
  RequireOutput(o.rejects);
  const auto languages = Languages(g);
  const ResolvedAnnotate resolved = ResolveAnnotate(a, languages);
  const std::vector<PostRecord> posts = LoadPosts(o.posts, TableOf(languages));
  const std::vector<NormalizedClaim> claims = LoadClaims(o.claims);
  std::vector<AlignmentLinks> links;
  if (!a.links.empty()) links = LoadLinks(a.links);

  const CorpusAnnotation result = AnnotateCorpus(posts, claims, resolved.config,
                                                 a.links.empty() ? nullptr : &links, g.jobs);
  SaveAnnotated(o.out, result.samples);
  SaveRejects(o.rejects, result.rejects);
  if (g.json) {
    PrintJson(out, {{"command", "annotate"},
                    {"total", posts.size()},
                    {"annotated", result.samples.size()},
                    {"rejected", RejectCounts(result.rejects)},
                    {"config", ConfigJson(resolved)}});
  } else {
    out << "posts      " << posts.size() << '\n'
        << "annotated  " << result.samples.size() << '\n'
        << "rejected   " << result.rejects.size() << '\n';
    PrintRejectSummary(out, result.rejects);
  }
  return kExitOk;
}

int RunProject(const GlobalOptions& g, const ProjectOptions& o, const AnnotateOptions& a,
               std::ostream& out) {
  RequireFile(o.source);
  RequireFile(o.target);
  RequireOutput(o.out);
  RequireOutput(o.rejects);
  const auto languages = Languages(g);
  const ResolvedAnnotate resolved = ResolveAnnotate(a, languages);
  const std::vector<AnnotatedSample> source = LoadAnnotated(o.source, TableOf(languages));
  const std::vector<PostRecord> target = LoadPosts(o.target, TableOf(languages));
  std::vector<AlignmentLinks> links;
  if (!a.links.empty()) {
    links = LoadLinks(a.links);
    if (links.size() != target.size()) {
      throw ValidationError("alignment file has " + std::to_string(links.size()) +
                            " records but the target corpus has " +
                            std::to_string(target.size()) + " posts");
    }
  }
  std::map<std::string, const AnnotatedSample*> by_id;
  for (const AnnotatedSample& s : source) by_id[s.post.id] = &s;

  struct Outcome {
    std::optional<AnnotatedSample> sample;
    Reject reject;
  };
  std::vector<Outcome> outcomes(target.size());
  ParallelFor(target.size(), g.jobs, [&](std::size_t i) {
    const PostRecord& post = target[i];
    const auto it = by_id.find(post.id);
    if (it == by_id.end() || it->second->spans.empty()) {
      outcomes[i].reject = {post.id, "missing_source_span"};
      return;
    }
    std::string span_text;
    for (const ClaimSpan& span : it->second->spans) {
      if (!span_text.empty()) span_text.push_back(' ');
      span_text += unicode::Slice(it->second->post.text, span.start_char, span.end_char);
    }
    try {
      AnnotatedSample sample;
      sample.post = post;
      sample.provenance = Provenance::kProjected;
      sample.spans = {ProjectLabels(span_text, post.text, post.language, resolved.config,
                                    post.id, links.empty() ? nullptr : &links[i])};
      outcomes[i].sample = std::move(sample);
    } catch (const NoAlignmentError&) {
      outcomes[i].reject = {post.id, "no_alignment"};
    } catch (const ValidationError& e) {
      outcomes[i].reject = {post.id, std::string("invalid: ") + e.what()};
    }
  });
  std::vector<AnnotatedSample> projected;
  std::vector<Reject> rejects;
  for (Outcome& o2 : outcomes) {
    if (o2.sample) {
      projected.push_back(std::move(*o2.sample));
    } else {
      rejects.push_back(std::move(o2.reject));
    }
  }
  SaveAnnotated(o.out, projected);
  SaveRejects(o.rejects, rejects);
  if (g.json) {
    PrintJson(out, {{"command", "project"},
                    {"total", target.size()},
                    {"projected", projected.size()},
                    {"rejected", RejectCounts(rejects)},
                    {"config", ConfigJson(resolved)}});
  } else {
    out << "targets    " << target.size() << '\n'
        << "projected  " << projected.size() << '\n'
        << "rejected   " << rejects.size() << '\n';
    PrintRejectSummary(out, rejects);
  }
  return kExitOk;
}

int RunEncode(const GlobalOptions& g, const EncodeOptions& o, std::ostream& out) {
  RequireFile(o.in);
  RequireOutput(o.out);
  const TagScheme scheme = ParseScheme(o.scheme);
  const auto languages = Languages(g);
  std::size_t samples = 0, spans = 0;
  if (!o.decode) {
    const std::vector<AnnotatedSample> corpus = LoadAnnotated(o.in, TableOf(languages));
    ExportConll(corpus, scheme, o.out);
    samples = corpus.size();
    for (const AnnotatedSample& s : corpus) spans += s.spans.size();
  } else {
    if (o.posts.empty()) throw ConfigError("--decode needs --posts for the token offsets");
    RequireFile(o.posts);
    std::ifstream in(o.in, std::ios::binary);
    if (!in) throw IoError("cannot open " + o.in);
    const std::vector<ConllSentence> sentences = ReadConll(in, o.in);
    const std::vector<PostRecord> posts = LoadPosts(o.posts, TableOf(languages));
    if (sentences.size() != posts.size()) {
      throw ValidationError(o.in + " has " + std::to_string(sentences.size()) +
                            " samples but " + o.posts + " has " +
                            std::to_string(posts.size()) + " posts");
    }
    std::vector<AnnotatedSample> decoded(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i) {
      const std::vector<Token> tokens = Tokenize(posts[i].text);
      bool same = tokens.size() == sentences[i].tokens.size();
      for (std::size_t t = 0; same && t < tokens.size(); ++t) {
        same = tokens[t].text == sentences[i].tokens[t];
      }
      if (!same) {
        throw ValidationError("tokens of sample " + std::to_string(i + 1) + " in " + o.in +
                              " do not match post '" + posts[i].id + "'");
      }
      decoded[i].post = posts[i];
      decoded[i].spans = Decode(sentences[i].labels, tokens, scheme);
      spans += decoded[i].spans.size();
    }
    SaveAnnotated(o.out, decoded);
    samples = decoded.size();
  }
  if (g.json) {
    PrintJson(out, {{"command", "encode"},
                    {"mode", o.decode ? "decode" : "encode"},
                    {"scheme", SchemeName(scheme)},
                    {"samples", samples},
                    {"spans", spans}});
  } else {
    out << (o.decode ? "decoded  " : "encoded  ") << samples << " samples, " << spans
        << " spans (" << SchemeName(scheme) << ")\n";
  }
  return kExitOk;
}

int RunEval(const GlobalOptions& g, const EvalOptionsCli& o, const EvalFlags& f,
            std::ostream& out) {
  RequireFile(o.pred);
  RequireFile(o.gold);
  const EvalOptions options = ResolveEval(f);
  const auto languages = Languages(g);
  const SpanEvalResult r = EvaluateSamples(LoadAnnotated(o.pred, TableOf(languages)),
                                           LoadAnnotated(o.gold, TableOf(languages)),
                                           options, g.jobs);
  if (g.json) {
    ordered_json report = {{"command", "eval"},
                           {"unit", UnitName(options.unit)},
                           {"averaging", AveragingName(options.averaging)}};
    report.update(EvalJson(r, o.per_doc));
    PrintJson(out, report);
  } else {
    PrintEvalTable(out, r, o.per_doc);
  }
  return kExitOk;
}

int RunPrompt(const GlobalOptions& g, const PromptOptions& o, std::ostream& out) {
  RequireFile(o.posts);
  if (!o.train.empty()) RequireFile(o.train);
  RequireOutput(o.out);
  const PromptKind kind = ParsePromptKind(o.kind);
  const auto languages = Languages(g);
  const LanguageTable& table = TableOf(languages);
  std::vector<AnnotatedSample> train;
  if (!o.train.empty()) train = LoadAnnotated(o.train, table);
  if (o.shots > 0 && o.train.empty()) throw ConfigError("--k > 0 needs --train");
  const std::vector<PromptExample> examples = SelectExamples(train, o.shots, o.seed, table);

  std::vector<PostRecord> posts = LoadPosts(o.posts, table);
  if (!o.ids.empty()) {
    std::vector<PostRecord> chosen;
    for (const std::string& id : o.ids) {
      const auto it = std::find_if(posts.begin(), posts.end(),
                                   [&](const PostRecord& p) { return p.id == id; });
      if (it == posts.end()) throw ValidationError("no post with id '" + id + "'");
      chosen.push_back(*it);
    }
    posts = std::move(chosen);
  }
  std::vector<std::string> prompts;
  for (const PostRecord& post : posts) {
    prompts.push_back(BuildPrompt(kind, post, LanguageName(table, post.language), examples));
  }
  if (!o.out.empty()) {
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw IoError("cannot write " + o.out);
    for (std::size_t i = 0; i < posts.size(); ++i) {
      file << json{{"id", posts[i].id}, {"prompt", prompts[i]}}.dump() << '\n';
    }
    if (!file) throw IoError("write failed for " + o.out);
  }
  if (g.json) {
    ordered_json list = ordered_json::array();
    for (std::size_t i = 0; i < posts.size(); ++i) {
      list.push_back({{"id", posts[i].id}, {"prompt", prompts[i]}});
    }
    PrintJson(out, {{"command", "prompt"},
                    {"kind", PromptKindName(kind)},
                    {"k", o.shots},
                    {"prompts", list}});
  } else if (o.out.empty()) {
    for (std::size_t i = 0; i < posts.size(); ++i) {
      if (posts.size() > 1) out << "=== " << posts[i].id << " ===\n";
      out << prompts[i] << '\n';
      if (posts.size() > 1 && i + 1 < posts.size()) out << '\n';
    }
  } else {
    out << "wrote " << posts.size() << " prompts to " << o.out << '\n';
  }
  return kExitOk;
}

int RunLlm(const GlobalOptions& g, const LlmRunCliOptions& o, const AnnotateOptions& a,
           const EvalFlags& f, std::ostream& out) {
  RequireFile(o.test);
  if (!o.train.empty()) RequireFile(o.train);
  RequireOutput(o.out);
  if (o.endpoint.empty() == o.fixture.empty()) {
    throw ConfigError("give exactly one of --endpoint or --fixture");
  }
  if (!o.fixture.empty()) RequireFile(o.fixture);
  const auto languages = Languages(g);
  const ResolvedAnnotate resolved = ResolveAnnotate(a, languages);
  const LanguageTable& table = TableOf(languages);

  LlmConfig llm;
  llm.model = o.model;
  llm.temperature = o.temperature;
  llm.max_retries = o.retries;
  llm.backoff_base = std::chrono::milliseconds(o.backoff_ms);
  llm.cache_dir = o.cache;
  llm.example_seed = o.seed;

  LlmRunOptions options;
  options.kind = ParsePromptKind(o.kind);
  options.shots = o.shots;
  options.eval = ResolveEval(f);
  options.jobs = g.jobs;
  if (options.shots > 0 && o.train.empty()) throw ConfigError("--k > 0 needs --train");

  std::unique_ptr<ChatClient> client;
  if (!o.fixture.empty()) {
    client = std::make_unique<FixtureReplayer>(FixtureReplayer::Load(o.fixture));
  } else {
    client = std::make_unique<HttpChatClient>(o.endpoint, o.api_key_env);
  }
  const std::vector<AnnotatedSample> test = LoadAnnotated(o.test, table);
  std::vector<AnnotatedSample> train;
  if (!o.train.empty()) train = LoadAnnotated(o.train, table);

  const LlmRunResult run = RunLlmEval(test, train, *client, resolved.config, llm, options);
  if (!o.out.empty()) SaveAnnotated(o.out, run.predictions);
  if (g.json) {
    ordered_json report = {{"command", "llm-run"},
                           {"model", o.model},
                           {"kind", PromptKindName(options.kind)},
                           {"k", options.shots},
                           {"unit", UnitName(options.eval.unit)},
                           {"averaging", AveragingName(options.eval.averaging)},
                           {"empty_responses", run.empty_responses},
                           {"unaligned_responses", run.unaligned_responses}};
    report.update(EvalJson(run.eval, false));
    PrintJson(out, report);
  } else {
    PrintEvalTable(out, run.eval, false);
    out << "empty      " << run.empty_responses << '\n'
        << "unaligned  " << run.unaligned_responses << '\n';
  }
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilingual claim-span annotation toolkit", "xclaim"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (TOML/INI); command-line flags take precedence");
  app.set_version_flag("--version", kVersion);

  GlobalOptions g;
  app.add_flag("--json", g.json, "Print a machine-readable JSON report");
  app.add_option("--jobs,-j", g.jobs, "Worker threads")->capture_default_str();
  app.add_option("--languages", g.languages, "Language table JSON extending the defaults");

  FilterOptions filter;
  CLI::App* filter_cmd = app.add_subcommand("filter", "Apply collection-time noise filters");
  filter_cmd->add_option("--posts", filter.posts, "Posts JSONL")->required();
  filter_cmd->add_option("--claims", filter.claims, "Normalized claims JSONL")->required();
  filter_cmd->add_option("--out", filter.out, "Accepted posts JSONL")->required();
  filter_cmd->add_option("--out-claims", filter.out_claims, "Claims of accepted posts");
  filter_cmd->add_option("--rejects", filter.rejects, "Rejected ids with reasons (JSONL)");
  filter_cmd->add_option("--media-keyword", filter.media_keywords, "Media keywords")
      ->capture_default_str();
  filter_cmd->add_option("--min-words", filter.min_words)->capture_default_str();
  filter_cmd->add_option("--max-words", filter.max_words)->capture_default_str();

  SplitOptions split;
  CLI::App* split_cmd = app.add_subcommand("split", "Seeded train/dev split");
  split_cmd->add_option("--in", split.in, "Annotated JSONL")->required();
  split_cmd->add_option("--train", split.train, "Train output")->required();
  split_cmd->add_option("--dev", split.dev, "Dev output")->required();
  split_cmd->add_option("--ratio", split.ratio)->capture_default_str();
  split_cmd->add_option("--seed", split.seed)->capture_default_str();

  StatsOptions stats;
  CLI::App* stats_cmd = app.add_subcommand("stats", "Per split and language statistics");
  stats_cmd->add_option("--in", stats.in, "Annotated JSONL files")->required();
  stats_cmd->add_option("--split", stats.split,
                        "Split name for every input (default: from file name)");

  AnnotateCommandOptions annotate;
  AnnotateOptions annotate_flags;
  CLI::App* annotate_cmd = app.add_subcommand("annotate", "Claim-guided span annotation");
  annotate_cmd->add_option("--posts", annotate.posts, "Posts JSONL")->required();
  annotate_cmd->add_option("--claims", annotate.claims, "Normalized claims JSONL")->required();
  annotate_cmd->add_option("--out", annotate.out, "Annotated JSONL output")->required();
  annotate_cmd->add_option("--rejects", annotate.rejects, "Rejected ids with reasons (JSONL)");
  AddAnnotateFlags(annotate_cmd, annotate_flags);

  ProjectOptions project;
  AnnotateOptions project_flags;
  CLI::App* project_cmd =
      app.add_subcommand("project", "Project source spans onto translated posts");
  project_cmd->add_option("--source", project.source, "Annotated source-language JSONL")
      ->required();
  project_cmd->add_option("--target", project.target, "Translated posts JSONL (same ids)")
      ->required();
  project_cmd->add_option("--out", project.out, "Projected annotated JSONL")->required();
  project_cmd->add_option("--rejects", project.rejects, "Rejected ids with reasons (JSONL)");
  AddAnnotateFlags(project_cmd, project_flags);

  EncodeOptions encode;
  CLI::App* encode_cmd = app.add_subcommand("encode", "Export or decode token labels");
  encode_cmd->add_option("--in", encode.in, "Annotated JSONL, or CoNLL with --decode")
      ->required();
  encode_cmd->add_option("--out", encode.out, "CoNLL output, or annotated JSONL with --decode")
      ->required();
  encode_cmd->add_option("--scheme", encode.scheme, "IO, BIO, BEO or BEIO")
      ->capture_default_str();
  encode_cmd->add_flag("--decode", encode.decode, "Decode CoNLL labels back into spans");
  encode_cmd->add_option("--posts", encode.posts, "Posts for --decode, in CoNLL order");

  EvalOptionsCli eval;
  EvalFlags eval_flags;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Span-level precision, recall and F1");
  eval_cmd->add_option("--pred", eval.pred, "Predicted annotated JSONL")->required();
  eval_cmd->add_option("--gold", eval.gold, "Gold annotated JSONL")->required();
  eval_cmd->add_flag("--per-doc", eval.per_doc, "Include per-document numerators");
  AddEvalFlags(eval_cmd, eval_flags);

  PromptOptions prompt;
  CLI::App* prompt_cmd = app.add_subcommand("prompt", "Build LLM prompts");
  prompt_cmd->add_option("--posts", prompt.posts, "Posts or annotated JSONL")->required();
  prompt_cmd->add_option("--id", prompt.ids, "Only these post ids");
  prompt_cmd->add_option("--kind", prompt.kind, "identify, extract, span or language")
      ->capture_default_str();
  prompt_cmd->add_option("--k", prompt.shots, "In-context examples")->capture_default_str();
  prompt_cmd->add_option("--train", prompt.train, "Annotated examples source");
  prompt_cmd->add_option("--seed", prompt.seed, "Example shuffle seed")->capture_default_str();
  prompt_cmd->add_option("--out", prompt.out, "Write {id, prompt} JSONL here");

  LlmRunCliOptions llm;
  AnnotateOptions llm_flags;
  EvalFlags llm_eval_flags;
  CLI::App* llm_cmd = app.add_subcommand("llm-run", "Prompt a model and score its spans");
  llm_cmd->add_option("--test", llm.test, "Gold annotated test JSONL")->required();
  llm_cmd->add_option("--train", llm.train, "Annotated examples source");
  llm_cmd->add_option("--kind", llm.kind, "identify, extract, span or language")
      ->capture_default_str();
  llm_cmd->add_option("--k", llm.shots, "In-context examples: 0, 1, 4, 7 or 10")
      ->capture_default_str();
  llm_cmd->add_option("--model", llm.model, "Model id sent to the endpoint");
  llm_cmd->add_option("--endpoint", llm.endpoint, "Chat completion URL");
  llm_cmd->add_option("--api-key-env", llm.api_key_env, "Variable holding the API key")
      ->capture_default_str();
  llm_cmd->add_option("--fixture", llm.fixture, "Recorded prompt/response JSONL");
  llm_cmd->add_option("--cache", llm.cache, "Response cache directory");
  llm_cmd->add_option("--retries", llm.retries)->capture_default_str();
  llm_cmd->add_option("--backoff-ms", llm.backoff_ms)->capture_default_str();
  llm_cmd->add_option("--temperature", llm.temperature)->capture_default_str();
  llm_cmd->add_option("--seed", llm.seed, "Example shuffle seed")->capture_default_str();
  llm_cmd->add_option("--out", llm.out, "Predictions JSONL");
  AddAnnotateFlags(llm_cmd, llm_flags);
  AddEvalFlags(llm_cmd, llm_eval_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (g.jobs < 1) {
    err << "error: --jobs must be at least 1\n";
    return kExitValidation;
  }

  try {
    if (*filter_cmd) return RunFilter(g, filter, out);
    if (*split_cmd) return RunSplit(g, split, out);
    if (*stats_cmd) return RunStats(g, stats, out);
    if (*annotate_cmd) return RunAnnotate(g, annotate, annotate_flags, out);
    if (*project_cmd) return RunProject(g, project, project_flags, out);
    if (*encode_cmd) return RunEncode(g, encode, out);
    if (*eval_cmd) return RunEval(g, eval, eval_flags, out);
    if (*prompt_cmd) return RunPrompt(g, prompt, out);
    if (*llm_cmd) return RunLlm(g, llm, llm_flags, llm_eval_flags, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NoAlignmentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const EmptyResponseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const TransportError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace xclaim::cli
