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

#include "xclaim/segment.h"

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "xclaim/error.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

constexpr std::u32string_view kTerminators = U".!?…।॥";

// Characters stripped from the end of a URL candidate.
constexpr std::u32string_view kUrlTrailers = U".,;:!?)]}'\"»”’";

struct Range {
  int begin;
  int end;
};

bool StartsWithFolded(std::u32string_view text, std::size_t pos,
                      std::u32string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char32_t c = text[pos + k];
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
    if (c != prefix[k]) return false;
  }
  return true;
}

// Finds URLs, @mentions and #hashtags, which must survive as single tokens.
std::vector<Range> FindAtomicRuns(std::u32string_view text) {
  std::vector<Range> runs;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const bool at_boundary = i == 0 || !unicode::IsWordChar(text[i - 1]);
    if (!at_boundary) {
      ++i;
      continue;
    }
    std::size_t prefix = 0;
    for (std::u32string_view scheme : {U"https://", U"http://", U"www."}) {
      if (StartsWithFolded(text, i, scheme)) {
        prefix = scheme.size();
        break;
      }
    }
    if (prefix > 0) {
      std::size_t end = i;
      while (end < n && !unicode::IsSpace(text[end])) ++end;
      while (end > i + prefix && kUrlTrailers.find(text[end - 1]) !=
                                     std::u32string_view::npos) {
        --end;
      }
      if (end > i + prefix) {
        runs.push_back({static_cast<int>(i), static_cast<int>(end)});
        i = end;
        continue;
      }
    }
    if ((text[i] == U'#' || text[i] == U'@') && i + 1 < n &&
        unicode::IsWordChar(text[i + 1])) {
      std::size_t end = i + 1;
      while (end < n && unicode::IsWordChar(text[end])) ++end;
      runs.push_back({static_cast<int>(i), static_cast<int>(end)});
      i = end;
      continue;
    }
    ++i;
  }
  return runs;
}

icu::BreakIterator& WordBreaker() {
  thread_local std::unique_ptr<icu::BreakIterator> breaker = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) {
      throw Error(std::string("ICU word break iterator: ") +
                  u_errorName(status));
    }
    return it;
  }();
  return *breaker;
}

// Appends tokens for text[begin, end), which contains no atomic runs.
void TokenizeRegion(std::u32string_view text, int begin, int end,
                    std::vector<Token>& out) {
  if (begin >= end) return;
  const std::u32string_view region = text.substr(begin, end - begin);
  icu::UnicodeString utf16 = icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32*>(region.data()),
      static_cast<int32_t>(region.size()));
  // UTF-16 index -> scalar offset within the region.
  std::vector<int> to_scalar(utf16.length() + 1, 0);
  {
    int u16 = 0;
    for (std::size_t k = 0; k < region.size(); ++k) {
      to_scalar[u16] = static_cast<int>(k);
      u16 += region[k] > 0xFFFF ? 2 : 1;
      if (region[k] > 0xFFFF) to_scalar[u16 - 1] = static_cast<int>(k);
    }
    to_scalar[u16] = static_cast<int>(region.size());
  }

  icu::BreakIterator& breaker = WordBreaker();
  breaker.setText(utf16);

  std::vector<Range> pieces;
  int32_t prev = breaker.first();
  for (int32_t next = breaker.next(); next != icu::BreakIterator::DONE;
       prev = next, next = breaker.next()) {
    const int a = to_scalar[prev];
    const int b = to_scalar[next];
    // Split the segment further on whitespace.
    int k = a;
    while (k < b) {
      while (k < b && unicode::IsSpace(region[k])) ++k;
      const int piece_begin = k;
      while (k < b && !unicode::IsSpace(region[k])) ++k;
      if (k > piece_begin) pieces.push_back({piece_begin, k});
    }
  }

  // Merge touching pure-punctuation pieces into runs.
  const auto is_punct = [&](const Range& r) {
    return unicode::IsPunctuation(region.substr(r.begin, r.end - r.begin));
  };
  std::vector<Range> merged;
  for (const Range& piece : pieces) {
    if (!merged.empty() && merged.back().end == piece.begin &&
        is_punct(merged.back()) && is_punct(piece)) {
      merged.back().end = piece.end;
    } else {
      merged.push_back(piece);
    }
  }
  for (const Range& r : merged) {
    out.push_back({unicode::Encode(region.substr(r.begin, r.end - r.begin)),
                   begin + r.begin, begin + r.end});
  }
}

LanguageTable MakeDefaultTable() {
  LanguageTable table;
  table.Set("en", {"English", true, {}});
  table.Set("hi", {"Hindi", true, {}});
  table.Set("pa", {"Punjabi", false, {}});
  table.Set("ta", {"Tamil", true, {}});
  table.Set("te", {"Telugu", true, {}});
  table.Set("bn", {"Bengali", false, {}});
  for (const char* abbreviation :
       {"Dr.", "Mr.", "Mrs.", "Ms.", "St.", "U.S.", "U.K.", "vs.", "etc."}) {
    table.AddAbbreviation(abbreviation);
  }
  return table;
}

}  // namespace

LanguageTable::LanguageTable() = default;

const LanguageTable& LanguageTable::Default() {
  static const LanguageTable table = MakeDefaultTable();
  return table;
}

LanguageTable LanguageTable::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open language table " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("language table " + path + ": " + e.what());
  }
  LanguageTable table = Default();
  try {
    if (doc.contains("languages")) {
      for (const auto& [code, entry] : doc.at("languages").items()) {
        LanguageInfo info;
        if (table.Contains(code)) info = table.Get(code);
        info.name = entry.value("name", info.name.empty() ? code : info.name);
        info.segmentable = entry.value("segmentable", info.segmentable);
        if (entry.contains("terminators")) {
          info.extra_terminators =
              unicode::Decode(entry.at("terminators").get<std::string>());
        }
        table.Set(code, std::move(info));
      }
    }
    if (doc.contains("abbreviations")) {
      for (const auto& a : doc.at("abbreviations")) {
        table.AddAbbreviation(a.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("language table " + path + ": " + e.what());
  }
  return table;
}

bool LanguageTable::Contains(std::string_view code) const {
  return languages_.find(code) != languages_.end();
}

const LanguageInfo& LanguageTable::Get(std::string_view code) const {
  auto it = languages_.find(code);
  if (it == languages_.end()) {
    throw ValidationError("unknown language code '" + std::string(code) + "'");
  }
  return it->second;
}

void LanguageTable::Set(const std::string& code, LanguageInfo info) {
  languages_[code] = std::move(info);
}

void LanguageTable::AddAbbreviation(std::string_view abbreviation) {
  abbreviations_.push_back(unicode::CaseFold(abbreviation));
}

bool LanguageTable::IsAbbreviation(std::string_view text_with_period) const {
  const std::string folded = unicode::CaseFold(text_with_period);
  return std::find(abbreviations_.begin(), abbreviations_.end(), folded) !=
         abbreviations_.end();
}

std::vector<Token> Tokenize(std::string_view text) {
  const std::u32string chars = unicode::Decode(text);
  const std::u32string_view view(chars);
  std::vector<Token> tokens;
  int cursor = 0;
  for (const Range& run : FindAtomicRuns(view)) {
    TokenizeRegion(view, cursor, run.begin, tokens);
    tokens.push_back({unicode::Encode(view.substr(run.begin, run.end - run.begin)),
                      run.begin, run.end});
    cursor = run.end;
  }
  TokenizeRegion(view, cursor, static_cast<int>(view.size()), tokens);
  return tokens;
}

std::vector<Token> WordTokens(std::string_view text) {
  std::vector<Token> tokens = Tokenize(text);
  std::erase_if(tokens, [](const Token& t) {
    return unicode::IsPunctuation(std::string_view(t.text));
  });
  return tokens;
}

std::vector<SentenceSpan> SplitSentences(std::string_view text,
                                         std::string_view language,
                                         const LanguageTable& table) {
  const LanguageInfo& info = table.Get(language);
  std::vector<Token> tokens = Tokenize(text);
  if (tokens.empty()) throw ValidationError("nothing to segment: no tokens");
  const std::u32string chars = unicode::Decode(text);
  const int length = static_cast<int>(chars.size());

  if (!info.segmentable) {
    return {SentenceSpan{0, length, std::move(tokens)}};
  }

  const auto is_terminator = [&](char32_t c) {
    return kTerminators.find(c) != std::u32string_view::npos ||
           info.extra_terminators.find(c) != std::u32string::npos;
  };

  std::vector<SentenceSpan> sentences;
  SentenceSpan current;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const Token& token = tokens[k];
    if (current.tokens.empty()) current.start_char = token.start_char;
    current.tokens.push_back(token);
    current.end_char = token.end_char;

    const std::u32string_view token_chars = std::u32string_view(chars).substr(
        token.start_char, token.end_char - token.start_char);
    if (!std::all_of(token_chars.begin(), token_chars.end(), [&](char32_t c) {
          return unicode::IsPunct(c) || is_terminator(c);
        })) {
      continue;
    }
    if (std::none_of(token_chars.begin(), token_chars.end(), is_terminator)) {
      continue;
    }
    if (token.end_char < length && !unicode::IsSpace(chars[token.end_char])) {
      continue;
    }
    if (token.text == "." && k > 0 &&
        tokens[k - 1].end_char == token.start_char &&
        table.IsAbbreviation(tokens[k - 1].text + ".")) {
      continue;
    }
    sentences.push_back(std::move(current));
    current = SentenceSpan{};
  }
  if (!current.tokens.empty()) sentences.push_back(std::move(current));
  return sentences;
}

}  // namespace xclaim
