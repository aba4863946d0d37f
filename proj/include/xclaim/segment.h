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

// Offset-preserving word tokenization and rule-based sentence splitting.

#ifndef XCLAIM_SEGMENT_H_
#define XCLAIM_SEGMENT_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace xclaim {

// A word token. Offsets are scalar-value indices into the parent text and
// `text` is exactly the covered slice.
struct Token {
  std::string text;
  int start_char = 0;
  int end_char = 0;

  bool operator==(const Token&) const = default;
};

struct SentenceSpan {
  int start_char = 0;
  int end_char = 0;
  std::vector<Token> tokens;

  bool operator==(const SentenceSpan&) const = default;
};

struct LanguageInfo {
  std::string name;          // English display name, used in prompts.
  bool segmentable = true;   // false: the whole post is one sentence.
  std::u32string extra_terminators;
};

// Registry of supported languages and their segmentation capabilities.
// Seeded with en, hi, pa, ta, te and bn; extensible from a JSON file of the
// form
//   {"languages": {"mr": {"name": "Marathi", "segmentable": true,
//                         "terminators": "।"}},
//    "abbreviations": ["Prof."]}
class LanguageTable {
 public:
  static const LanguageTable& Default();
  static LanguageTable LoadFile(const std::string& path);

  LanguageTable();

  bool Contains(std::string_view code) const;
  // Throws ValidationError for unknown codes.
  const LanguageInfo& Get(std::string_view code) const;
  void Set(const std::string& code, LanguageInfo info);
  void AddAbbreviation(std::string_view abbreviation);

  bool IsAbbreviation(std::string_view text_with_period) const;
  const std::map<std::string, LanguageInfo, std::less<>>& languages() const {
    return languages_;
  }

 private:
  std::map<std::string, LanguageInfo, std::less<>> languages_;
  std::vector<std::string> abbreviations_;  // case-folded
};

// Splits text into word tokens: Unicode default word boundaries, with URLs,
// @mentions and #hashtags kept whole and runs of adjacent punctuation merged.
// Whitespace never appears inside a token.
std::vector<Token> Tokenize(std::string_view text);

// Tokens that count as words: pure-punctuation tokens are dropped.
std::vector<Token> WordTokens(std::string_view text);

// Sentence segmentation. Segmentable languages split after a terminator
// (. ! ? … । ॥ plus per-language extras) that is followed by whitespace or
// the end of the text, unless the terminator closes a known abbreviation.
// Other languages yield one sentence over the whole text.
// Throws ValidationError when the text contains no tokens.
std::vector<SentenceSpan> SplitSentences(
    std::string_view text, std::string_view language,
    const LanguageTable& table = LanguageTable::Default());

}  // namespace xclaim

#endif  // XCLAIM_SEGMENT_H_
