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

#include "xclaim/tags.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>

#include "xclaim/error.h"

namespace xclaim {
namespace {

// Tracks the span being decoded.
class RangeBuilder {
 public:
  explicit RangeBuilder(std::vector<TokenRange>& out) : out_(out) {}

  bool open() const { return open_.has_value(); }
  void Open(int i) {
    Close();
    open_ = TokenRange{i, i};
  }
  void Extend(int i) { open_->last = i; }
  void Close() {
    if (open_) out_.push_back(*open_);
    open_.reset();
  }

 private:
  std::vector<TokenRange>& out_;
  std::optional<TokenRange> open_;
};

}  // namespace

std::string_view SchemeName(TagScheme scheme) {
  switch (scheme) {
    case TagScheme::kIO:
      return "IO";
    case TagScheme::kBIO:
      return "BIO";
    case TagScheme::kBEO:
      return "BEO";
    case TagScheme::kBEIO:
      return "BEIO";
  }
  return "IO";
}

TagScheme ParseScheme(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (TagScheme s : {TagScheme::kIO, TagScheme::kBIO, TagScheme::kBEO, TagScheme::kBEIO}) {
    if (upper == SchemeName(s)) return s;
  }
  throw ConfigError("unknown tag scheme '" + std::string(name) + "'");
}

char LabelChar(Label label) { return static_cast<char>(label); }

Label ParseLabel(std::string_view text) {
  if (text == "O") return Label::kO;
  if (text == "I") return Label::kI;
  if (text == "B") return Label::kB;
  if (text == "E") return Label::kE;
  throw ValidationError("unknown label '" + std::string(text) + "'");
}

bool IsLegal(Label label, TagScheme scheme) {
  switch (scheme) {
    case TagScheme::kIO:
      return label == Label::kO || label == Label::kI;
    case TagScheme::kBIO:
      return label != Label::kE;
    case TagScheme::kBEO:
      return label != Label::kI;
    case TagScheme::kBEIO:
      return true;
  }
  return false;
}

std::vector<TokenRange> SpansToTokenRanges(std::span<const Token> tokens,
                                           std::span<const ClaimSpan> spans) {
  std::vector<TokenRange> ranges;
  std::vector<int> owner(tokens.size(), -1);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const ClaimSpan& span = spans[s];
    int first = -1, last = -1;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].start_char < span.end_char && span.start_char < tokens[t].end_char) {
        if (owner[t] >= 0) {
          throw ValidationError("spans " + std::to_string(owner[t]) + " and " +
                                std::to_string(s) + " share token " + std::to_string(t));
        }
        owner[t] = static_cast<int>(s);
        if (first < 0) first = static_cast<int>(t);
        last = static_cast<int>(t);
      }
    }
    if (first < 0) {
      throw ValidationError("span [" + std::to_string(span.start_char) + ", " +
                            std::to_string(span.end_char) + ") covers no token");
    }
    ranges.push_back({first, last});
  }
  std::sort(ranges.begin(), ranges.end());
  return ranges;
}

TagSequence Encode(std::span<const Token> tokens, std::span<const ClaimSpan> spans,
                   TagScheme scheme) {
  TagSequence tags(tokens.size(), Label::kO);
  for (const TokenRange& r : SpansToTokenRanges(tokens, spans)) {
    for (int i = r.first; i <= r.last; ++i) {
      const bool first = i == r.first;
      const bool last = i == r.last;
      switch (scheme) {
        case TagScheme::kIO:
          tags[i] = Label::kI;
          break;
        case TagScheme::kBIO:
          tags[i] = first ? Label::kB : Label::kI;
          break;
        case TagScheme::kBEO:
          tags[i] = (last && !first) ? Label::kE : Label::kB;
          break;
        case TagScheme::kBEIO:
          tags[i] = first ? Label::kB : last ? Label::kE : Label::kI;
          break;
      }
    }
  }
  return tags;
}

std::vector<TokenRange> DecodeRanges(std::span<const Label> tags, TagScheme scheme) {
  std::vector<TokenRange> ranges;
  RangeBuilder span(ranges);
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const int i = static_cast<int>(t);
    const Label label = tags[t];
    if (!IsLegal(label, scheme)) {
      throw ValidationError(std::string("label ") + LabelChar(label) + " at token " +
                            std::to_string(i) + " is not part of the " +
                            std::string(SchemeName(scheme)) + " scheme");
    }
    switch (label) {
      case Label::kO:
        span.Close();
        break;
      case Label::kB:
        span.Open(i);
        break;
      case Label::kI:
        if (span.open()) {
          span.Extend(i);
        } else {
          span.Open(i);
        }
        break;
      case Label::kE:
        if (span.open()) {
          span.Extend(i);
        } else {
          span.Open(i);
        }
        span.Close();
        break;
    }
  }
  span.Close();
  return ranges;
}

std::vector<ClaimSpan> Decode(std::span<const Label> tags, std::span<const Token> tokens,
                              TagScheme scheme) {
  if (tags.size() != tokens.size()) {
    throw ValidationError(std::to_string(tags.size()) + " labels for " +
                          std::to_string(tokens.size()) + " tokens");
  }
  std::vector<ClaimSpan> spans;
  for (const TokenRange& r : DecodeRanges(tags, scheme)) {
    spans.push_back({tokens[r.first].start_char, tokens[r.last].end_char});
  }
  return spans;
}

void WriteConll(std::ostream& out, const std::vector<AnnotatedSample>& samples,
                TagScheme scheme) {
  for (const AnnotatedSample& sample : samples) {
    const std::vector<Token> tokens = Tokenize(sample.post.text);
    const TagSequence tags = Encode(tokens, sample.spans, scheme);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      out << tokens[i].text << '\t' << LabelChar(tags[i]) << '\n';
    }
    out << '\n';
  }
}

void ExportConll(const std::vector<AnnotatedSample>& samples, TagScheme scheme,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  WriteConll(out, samples, scheme);
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ConllSentence> ReadConll(std::istream& in, const std::string& source) {
  std::vector<ConllSentence> sentences;
  ConllSentence current;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.tokens.empty()) sentences.push_back(std::move(current));
      current = {};
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source, line_number, "expected 'token<TAB>label'");
    }
    try {
      current.labels.push_back(ParseLabel(std::string_view(line).substr(tab + 1)));
    } catch (const ValidationError& e) {
      throw ParseError(source, line_number, e.what());
    }
    current.tokens.push_back(line.substr(0, tab));
  }
  if (!current.tokens.empty()) sentences.push_back(std::move(current));
  return sentences;
}

}  // namespace xclaim
