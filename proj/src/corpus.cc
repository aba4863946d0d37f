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

#include "xclaim/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "json.hpp"
#include "xclaim/error.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

using nlohmann::json;

// Calls fn(object, line_number) for every nonblank line of a JSONL stream.
template <typename Fn>
void ForEachJsonLine(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(source, line_number, e.what());
    }
    if (!object.is_object()) {
      throw ParseError(source, line_number, "expected a JSON object");
    }
    try {
      fn(object, line_number);
    } catch (const json::exception& e) {
      throw ParseError(source, line_number, e.what());
    }
  }
}

PostRecord PostFromJson(const json& object) {
  PostRecord post;
  post.id = object.at("id").get<std::string>();
  post.language = object.at("language").get<std::string>();
  post.platform = object.value("platform", std::string());
  post.text = object.at("text").get<std::string>();
  if (auto it = object.find("source_url"); it != object.end() && !it->is_null()) {
    post.source_url = it->get<std::string>();
  }
  return post;
}

json PostToJson(const PostRecord& post) {
  json object = {{"id", post.id},
                 {"language", post.language},
                 {"platform", post.platform},
                 {"text", post.text}};
  if (post.source_url) object["source_url"] = *post.source_url;
  return object;
}

template <typename T, typename Fn>
std::vector<T> LoadFile(const std::string& path, Fn&& read) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read(in, path);
}

template <typename Fn>
void SaveFile(const std::string& path, Fn&& write) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

void CheckUniqueId(std::set<std::string>& seen, const std::string& id,
                   const std::string& source, int line) {
  if (!seen.insert(id).second) {
    throw ValidationError(source + ":" + std::to_string(line) +
                          ": duplicate id '" + id + "'");
  }
}

// Counts word tokens and checks media keywords in one pass.
struct TextScan {
  int words = 0;
  bool has_media_keyword = false;
};

TextScan ScanText(std::string_view text, const std::vector<std::string>& folded_keywords) {
  TextScan scan;
  for (const Token& token : WordTokens(text)) {
    ++scan.words;
    if (!scan.has_media_keyword) {
      const std::string folded = unicode::CaseFold(token.text);
      scan.has_media_keyword =
          std::find(folded_keywords.begin(), folded_keywords.end(), folded) !=
          folded_keywords.end();
    }
  }
  return scan;
}

}  // namespace

std::string_view ProvenanceName(Provenance provenance) {
  switch (provenance) {
    case Provenance::kAuto:
      return "auto";
    case Provenance::kManual:
      return "manual";
    case Provenance::kProjected:
      return "projected";
    case Provenance::kLlm:
      return "llm";
  }
  return "auto";
}

Provenance ParseProvenance(std::string_view name) {
  for (Provenance p : {Provenance::kAuto, Provenance::kManual,
                       Provenance::kProjected, Provenance::kLlm}) {
    if (ProvenanceName(p) == name) return p;
  }
  throw ValidationError("unknown provenance '" + std::string(name) + "'");
}

void ValidatePost(const PostRecord& post, const LanguageTable& languages) {
  if (post.id.empty()) throw ValidationError("post with empty id");
  if (post.text.empty()) {
    throw ValidationError("post '" + post.id + "' has empty text");
  }
  if (!languages.Contains(post.language)) {
    throw ValidationError("post '" + post.id + "' has unknown language '" +
                          post.language + "'");
  }
}

void ValidateSpans(std::string_view id, std::string_view text,
                   const std::vector<ClaimSpan>& spans) {
  const std::u32string chars = unicode::Decode(text);
  const int length = static_cast<int>(chars.size());
  const std::string name(id);
  int previous_end = -1;
  for (const ClaimSpan& span : spans) {
    const std::string where = "span [" + std::to_string(span.start_char) +
                              ", " + std::to_string(span.end_char) +
                              ") of '" + name + "'";
    if (span.start_char < 0 || span.start_char >= span.end_char ||
        span.end_char > length) {
      throw ValidationError(where + " is out of bounds for text of length " +
                            std::to_string(length));
    }
    const bool blank = std::all_of(chars.begin() + span.start_char,
                                   chars.begin() + span.end_char,
                                   [](char32_t c) { return unicode::IsSpace(c); });
    if (blank) throw ValidationError(where + " covers only whitespace");
    if (span.start_char < previous_end) {
      throw ValidationError(where + " overlaps or precedes the previous span");
    }
    previous_end = span.end_char;
  }
}

std::vector<PostRecord> ReadPosts(std::istream& in, const std::string& source,
                                  const LanguageTable& languages) {
  std::vector<PostRecord> posts;
  std::set<std::string> seen;
  ForEachJsonLine(in, source, [&](const json& object, int line) {
    PostRecord post = PostFromJson(object);
    ValidatePost(post, languages);
    CheckUniqueId(seen, post.id, source, line);
    posts.push_back(std::move(post));
  });
  return posts;
}

std::vector<AnnotatedSample> ReadAnnotated(std::istream& in,
                                           const std::string& source,
                                           const LanguageTable& languages) {
  std::vector<AnnotatedSample> samples;
  std::set<std::string> seen;
  ForEachJsonLine(in, source, [&](const json& object, int line) {
    AnnotatedSample sample;
    sample.post = PostFromJson(object);
    ValidatePost(sample.post, languages);
    CheckUniqueId(seen, sample.post.id, source, line);
    for (const json& pair : object.at("spans")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw ParseError(source, line, "span must be a [start, end] pair");
      }
      sample.spans.push_back({pair[0].get<int>(), pair[1].get<int>()});
    }
    sample.provenance =
        ParseProvenance(object.value("provenance", std::string("auto")));
    ValidateSpans(sample.post.id, sample.post.text, sample.spans);
    samples.push_back(std::move(sample));
  });
  return samples;
}

std::vector<NormalizedClaim> ReadClaims(std::istream& in,
                                        const std::string& source) {
  std::vector<NormalizedClaim> claims;
  ForEachJsonLine(in, source, [&](const json& object, int line) {
    NormalizedClaim claim{object.at("post_id").get<std::string>(),
                          object.at("text").get<std::string>()};
    if (claim.text.empty()) {
      throw ParseError(source, line,
                       "claim for '" + claim.post_id + "' has empty text");
    }
    claims.push_back(std::move(claim));
  });
  return claims;
}

std::vector<PostRecord> LoadPosts(const std::string& path,
                                  const LanguageTable& languages) {
  return LoadFile<PostRecord>(path, [&](std::istream& in, const std::string& src) {
    return ReadPosts(in, src, languages);
  });
}

std::vector<AnnotatedSample> LoadAnnotated(const std::string& path,
                                           const LanguageTable& languages) {
  return LoadFile<AnnotatedSample>(
      path, [&](std::istream& in, const std::string& src) {
        return ReadAnnotated(in, src, languages);
      });
}

std::vector<NormalizedClaim> LoadClaims(const std::string& path) {
  return LoadFile<NormalizedClaim>(path, ReadClaims);
}

void WritePosts(std::ostream& out, const std::vector<PostRecord>& posts) {
  for (const PostRecord& post : posts) out << PostToJson(post).dump() << '\n';
}

void WriteAnnotated(std::ostream& out,
                    const std::vector<AnnotatedSample>& samples) {
  for (const AnnotatedSample& sample : samples) {
    json object = PostToJson(sample.post);
    json spans = json::array();
    for (const ClaimSpan& span : sample.spans) {
      spans.push_back({span.start_char, span.end_char});
    }
    object["spans"] = std::move(spans);
    object["provenance"] = ProvenanceName(sample.provenance);
    out << object.dump() << '\n';
  }
}

void WriteClaims(std::ostream& out, const std::vector<NormalizedClaim>& claims) {
  for (const NormalizedClaim& claim : claims) {
    out << json{{"post_id", claim.post_id}, {"text", claim.text}}.dump() << '\n';
  }
}

void SavePosts(const std::string& path, const std::vector<PostRecord>& posts) {
  SaveFile(path, [&](std::ostream& out) { WritePosts(out, posts); });
}

void SaveAnnotated(const std::string& path,
                   const std::vector<AnnotatedSample>& samples) {
  SaveFile(path, [&](std::ostream& out) { WriteAnnotated(out, samples); });
}

void SaveClaims(const std::string& path,
                const std::vector<NormalizedClaim>& claims) {
  SaveFile(path, [&](std::ostream& out) { WriteClaims(out, claims); });
}

std::string_view FilterReasonName(FilterReason reason) {
  switch (reason) {
    case FilterReason::kOk:
      return "ok";
    case FilterReason::kMediaKeyword:
      return "media_keyword";
    case FilterReason::kTooShort:
      return "too_short";
    case FilterReason::kTooLong:
      return "too_long";
  }
  return "ok";
}

FilterVerdict FilterSample(const PostRecord& post, const NormalizedClaim& claim,
                           const FilterRules& rules) {
  std::vector<std::string> keywords;
  keywords.reserve(rules.media_keywords.size());
  for (const std::string& k : rules.media_keywords) {
    keywords.push_back(unicode::CaseFold(k));
  }
  const TextScan post_scan = ScanText(post.text, keywords);
  const TextScan claim_scan = ScanText(claim.text, keywords);
  if (post_scan.has_media_keyword || claim_scan.has_media_keyword) {
    return {false, FilterReason::kMediaKeyword};
  }
  if (post_scan.words < rules.min_words || claim_scan.words < rules.min_words) {
    return {false, FilterReason::kTooShort};
  }
  if (post_scan.words > rules.max_words || claim_scan.words > rules.max_words) {
    return {false, FilterReason::kTooLong};
  }
  return {true, FilterReason::kOk};
}

std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 engine(seed);
  // Bounded draws by rejection so the permutation does not depend on the
  // standard library's distribution implementation.
  const auto draw = [&](std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t value;
    do {
      value = engine();
    } while (value >= limit);
    return value % bound;
  };
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[draw(i)]);
  }
  return order;
}

TrainDevSplit SplitTrainDev(std::vector<AnnotatedSample> samples, double ratio,
                            std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("split ratio must lie in (0, 1)");
  }
  const std::size_t n = samples.size();
  // The epsilon absorbs products such as 0.29 * 100 = 28.999999999999996.
  const auto train_size =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
  TrainDevSplit split;
  const std::vector<std::size_t> order = SeededPermutation(n, seed);
  for (std::size_t k = 0; k < n; ++k) {
    auto& target = k < train_size ? split.train : split.dev;
    target.push_back(std::move(samples[order[k]]));
  }
  return split;
}

LengthStats Summarize(const std::vector<double>& values) {
  LengthStats stats;
  if (values.empty()) return stats;
  const double n = static_cast<double>(values.size());
  double sum = 0;
  for (double v : values) sum += v;
  stats.mean = sum / n;
  double squares = 0;
  for (double v : values) squares += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(squares / n);
  return stats;
}

int CorpusStats::Count(std::string_view split, std::string_view language) const {
  const GroupStats* group = Find(split, language);
  return group ? group->count : 0;
}

const GroupStats* CorpusStats::Find(std::string_view split,
                                    std::string_view language) const {
  for (const GroupStats& g : groups) {
    if (g.split == split && g.language == language) return &g;
  }
  return nullptr;
}

CorpusStats ComputeCorpusStats(const std::vector<SplitSamples>& splits,
                               const TokenizerFn& tokenizer) {
  struct Accumulator {
    int count = 0;
    std::vector<double> text_tokens, text_chars, span_tokens, span_chars;
  };
  std::map<std::pair<std::string, std::string>, Accumulator> groups;
  for (const SplitSamples& split : splits) {
    for (const AnnotatedSample& sample : split.samples) {
      Accumulator& acc = groups[{split.split, sample.post.language}];
      ++acc.count;
      const std::vector<Token> tokens = tokenizer(sample.post.text);
      acc.text_tokens.push_back(static_cast<double>(tokens.size()));
      acc.text_chars.push_back(unicode::Length(sample.post.text));
      for (const ClaimSpan& span : sample.spans) {
        const auto overlapping = std::count_if(
            tokens.begin(), tokens.end(), [&](const Token& t) {
              return t.start_char < span.end_char && span.start_char < t.end_char;
            });
        acc.span_tokens.push_back(static_cast<double>(overlapping));
        acc.span_chars.push_back(span.length());
      }
    }
  }
  CorpusStats stats;
  for (const auto& [key, acc] : groups) {
    GroupStats g;
    g.split = key.first;
    g.language = key.second;
    g.count = acc.count;
    g.span_count = static_cast<int>(acc.span_chars.size());
    if (!acc.text_tokens.empty()) {
      g.text_tokens = Summarize(acc.text_tokens);
      g.text_chars = Summarize(acc.text_chars);
    }
    if (!acc.span_tokens.empty()) {
      g.span_tokens = Summarize(acc.span_tokens);
      g.span_chars = Summarize(acc.span_chars);
    }
    stats.groups.push_back(std::move(g));
  }
  return stats;
}

}  // namespace xclaim
