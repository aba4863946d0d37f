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

#include "xclaim/align.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "xclaim/error.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

int EditDistance(std::u32string_view a, std::u32string_view b) {
  std::vector<int> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diagonal = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1,
                         diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

bool ParseIndex(std::string_view text, int& value) {
  if (text.empty()) return false;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && end == text.data() + text.size() && value >= 0;
}

const Token& SentenceToken(const SentenceSpan& sentence, int j) {
  if (j < 0 || j >= static_cast<int>(sentence.tokens.size())) {
    throw ValidationError("link references sentence token " + std::to_string(j) +
                          " but the sentence has " +
                          std::to_string(sentence.tokens.size()) + " tokens");
  }
  return sentence.tokens[j];
}

std::vector<int> AlignedSentenceIndices(const AlignmentLinks& links,
                                        std::string_view sample_id) {
  if (links.empty()) throw NoAlignmentError(std::string(sample_id));
  std::vector<int> indices;
  for (const AlignmentLink& link : links) indices.push_back(link.sentence);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return indices;
}

}  // namespace

void SoftAlignConfig::Validate() const {
  if (!(threshold > 0 && threshold < 1)) {
    throw ConfigError("alignment threshold must lie in (0, 1)");
  }
  if (!(temperature > 0) || !std::isfinite(temperature)) {
    throw ConfigError("alignment temperature must be positive");
  }
}

AlignmentLinks ExtractLinks(const Matrix& sim, const SoftAlignConfig& cfg) {
  cfg.Validate();
  const int m = sim.rows();
  const int n = sim.cols();
  if (m < 1 || n < 1) throw ValidationError("similarity matrix is empty");
  for (double v : sim.values()) {
    if (!std::isfinite(v)) {
      throw ValidationError("similarity matrix has a non-finite entry");
    }
  }

  Matrix scaled(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) scaled(i, j) = sim(i, j) / cfg.temperature;
  }

  // Max-shifted softmax along rows and along columns.
  Matrix row_prob(m, n);
  for (int i = 0; i < m; ++i) {
    double top = scaled(i, 0);
    for (int j = 1; j < n; ++j) top = std::max(top, scaled(i, j));
    double total = 0;
    for (int j = 0; j < n; ++j) total += row_prob(i, j) = std::exp(scaled(i, j) - top);
    for (int j = 0; j < n; ++j) row_prob(i, j) /= total;
  }
  Matrix col_prob(m, n);
  for (int j = 0; j < n; ++j) {
    double top = scaled(0, j);
    for (int i = 1; i < m; ++i) top = std::max(top, scaled(i, j));
    double total = 0;
    for (int i = 0; i < m; ++i) total += col_prob(i, j) = std::exp(scaled(i, j) - top);
    for (int i = 0; i < m; ++i) col_prob(i, j) /= total;
  }

  AlignmentLinks links;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (row_prob(i, j) * col_prob(i, j) > cfg.threshold) links.insert({i, j});
    }
  }
  return links;
}

double LevenshteinSimilarity(std::string_view a, std::string_view b) {
  const std::u32string fa = unicode::Decode(unicode::CaseFold(a));
  const std::u32string fb = unicode::Decode(unicode::CaseFold(b));
  const std::size_t longest = std::max(fa.size(), fb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(EditDistance(fa, fb)) / static_cast<double>(longest);
}

AlignmentLinks LexicalAlign(std::span<const Token> claim,
                            std::span<const Token> sentence) {
  AlignmentLinks links;
  if (claim.empty() || sentence.empty()) return links;
  std::vector<std::string> claim_folded, sentence_folded;
  for (const Token& t : claim) claim_folded.push_back(unicode::CaseFold(t.text));
  for (const Token& t : sentence) sentence_folded.push_back(unicode::CaseFold(t.text));

  std::vector<bool> claim_used(claim.size(), false);
  std::vector<bool> sentence_used(sentence.size(), false);
  for (std::size_t i = 0; i < claim.size(); ++i) {
    for (std::size_t j = 0; j < sentence.size(); ++j) {
      if (!sentence_used[j] && claim_folded[i] == sentence_folded[j]) {
        links.insert({static_cast<int>(i), static_cast<int>(j)});
        claim_used[i] = sentence_used[j] = true;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < claim.size(); ++i) {
    if (claim_used[i]) continue;
    int best = -1;
    double best_score = kLexicalMatchThreshold;
    for (std::size_t j = 0; j < sentence.size(); ++j) {
      if (sentence_used[j]) continue;
      const double s = LevenshteinSimilarity(claim_folded[i], sentence_folded[j]);
      if (s >= best_score && (best < 0 || s > best_score)) {
        best = static_cast<int>(j);
        best_score = s;
      }
    }
    if (best >= 0) {
      links.insert({static_cast<int>(i), best});
      sentence_used[best] = true;
    }
  }
  return links;
}

AlignmentLinks ParseLinks(std::string_view line, const std::string& source,
                          int line_number) {
  AlignmentLinks links;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    const std::string_view pair = line.substr(pos, end - pos);
    const std::size_t dash = pair.find('-');
    AlignmentLink link;
    if (dash == std::string_view::npos || !ParseIndex(pair.substr(0, dash), link.claim) ||
        !ParseIndex(pair.substr(dash + 1), link.sentence)) {
      throw ParseError(source, line_number,
                       "malformed alignment pair '" + std::string(pair) + "'");
    }
    links.insert(link);
    pos = end;
  }
  return links;
}

std::string FormatLinks(const AlignmentLinks& links) {
  std::string out;
  for (const AlignmentLink& link : links) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(link.claim) + "-" + std::to_string(link.sentence);
  }
  return out;
}

std::vector<AlignmentLinks> ReadLinks(std::istream& in, const std::string& source) {
  std::vector<AlignmentLinks> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    records.push_back(ParseLinks(line, source, line_number));
  }
  return records;
}

void WriteLinks(std::ostream& out, const std::vector<AlignmentLinks>& records) {
  for (const AlignmentLinks& links : records) out << FormatLinks(links) << '\n';
}

std::vector<AlignmentLinks> LoadLinks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ReadLinks(in, path);
}

void SaveLinks(const std::string& path, const std::vector<AlignmentLinks>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  WriteLinks(out, records);
  if (!out) throw IoError("write failed for " + path);
}

std::string_view SpanRuleName(SpanRule rule) {
  return rule == SpanRule::kFirstLast ? "first-last" : "longest-contig";
}

SpanRule ParseSpanRule(std::string_view name) {
  if (name == "first-last") return SpanRule::kFirstLast;
  if (name == "longest-contig") return SpanRule::kLongestContiguous;
  throw ConfigError("unknown span rule '" + std::string(name) + "'");
}

ClaimSpan DeriveSpanFirstLast(const AlignmentLinks& links,
                              const SentenceSpan& sentence,
                              std::string_view sample_id) {
  const std::vector<int> indices = AlignedSentenceIndices(links, sample_id);
  return {SentenceToken(sentence, indices.front()).start_char,
          SentenceToken(sentence, indices.back()).end_char};
}

ClaimSpan DeriveSpanLongestContiguous(const AlignmentLinks& links,
                                      const SentenceSpan& sentence,
                                      std::string_view sample_id) {
  const std::vector<int> indices = AlignedSentenceIndices(links, sample_id);
  std::size_t best_begin = 0, best_length = 0;
  for (std::size_t begin = 0; begin < indices.size();) {
    std::size_t end = begin + 1;
    while (end < indices.size() && indices[end] == indices[end - 1] + 1) ++end;
    if (end - begin > best_length) {
      best_begin = begin;
      best_length = end - begin;
    }
    begin = end;
  }
  return {SentenceToken(sentence, indices[best_begin]).start_char,
          SentenceToken(sentence, indices[best_begin + best_length - 1]).end_char};
}

ClaimSpan DeriveSpan(SpanRule rule, const AlignmentLinks& links,
                     const SentenceSpan& sentence, std::string_view sample_id) {
  return rule == SpanRule::kFirstLast
             ? DeriveSpanFirstLast(links, sentence, sample_id)
             : DeriveSpanLongestContiguous(links, sentence, sample_id);
}

}  // namespace xclaim
