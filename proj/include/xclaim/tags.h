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

// Token-label codecs for span tagging and CoNLL-style training export.

#ifndef XCLAIM_TAGS_H_
#define XCLAIM_TAGS_H_

#include <compare>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xclaim/corpus.h"
#include "xclaim/segment.h"

namespace xclaim {

enum class TagScheme { kIO, kBIO, kBEO, kBEIO };

std::string_view SchemeName(TagScheme scheme);
// Case-insensitive. Throws ConfigError for unknown names.
TagScheme ParseScheme(std::string_view name);

enum class Label : char { kO = 'O', kI = 'I', kB = 'B', kE = 'E' };

using TagSequence = std::vector<Label>;

char LabelChar(Label label);
// Throws ValidationError for anything but O, I, B or E.
Label ParseLabel(std::string_view text);
bool IsLegal(Label label, TagScheme scheme);

// Inclusive token index range.
struct TokenRange {
  int first = 0;
  int last = 0;

  auto operator<=>(const TokenRange&) const = default;
};

// Tokens whose character interval overlaps each span. Throws ValidationError
// when a span covers no token or two spans share a token.
std::vector<TokenRange> SpansToTokenRanges(std::span<const Token> tokens,
                                           std::span<const ClaimSpan> spans);

// Labels per scheme:
//   IO    in -> I
//   BIO   first -> B, rest -> I
//   BEO   first -> B, last -> E, middle -> B, singleton -> B
//   BEIO  first -> B, last -> E, interior -> I, singleton -> B
// Tokens outside every span get O.
TagSequence Encode(std::span<const Token> tokens, std::span<const ClaimSpan> spans,
                   TagScheme scheme);

// Total inverse over the scheme alphabet, with repairs:
//   IO    maximal I runs
//   BIO   B opens, I extends, an orphan I opens
//   BEO   B opens; the span ends at the next E, or before the next B or O
//   BEIO  B opens, I extends, E closes, an orphan I opens, an orphan E is a
//         one-token span
// Throws ValidationError for labels outside the scheme's alphabet.
std::vector<TokenRange> DecodeRanges(std::span<const Label> tags, TagScheme scheme);

// DecodeRanges mapped to characters: first token start to last token end.
// Throws ValidationError when tags and tokens differ in length.
std::vector<ClaimSpan> Decode(std::span<const Label> tags, std::span<const Token> tokens,
                              TagScheme scheme);

// One "token<TAB>label" line per token of Tokenize(post.text), a blank line
// after each sample.
void WriteConll(std::ostream& out, const std::vector<AnnotatedSample>& samples,
                TagScheme scheme);
void ExportConll(const std::vector<AnnotatedSample>& samples, TagScheme scheme,
                 const std::string& path);

struct ConllSentence {
  std::vector<std::string> tokens;
  TagSequence labels;
};

// Throws ParseError for malformed lines.
std::vector<ConllSentence> ReadConll(std::istream& in, const std::string& source);

}  // namespace xclaim

#endif  // XCLAIM_TAGS_H_
