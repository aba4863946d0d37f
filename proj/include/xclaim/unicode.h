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

// UTF-8 / code point helpers. All character offsets in the toolkit count
// Unicode scalar values.

#ifndef XCLAIM_UNICODE_H_
#define XCLAIM_UNICODE_H_

#include <string>
#include <string_view>

namespace xclaim::unicode {

// Throws ValidationError on ill-formed UTF-8.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view text);

// Number of scalar values in a UTF-8 string.
int Length(std::string_view utf8);

// Substring [begin, end) in scalar-value offsets.
std::string Slice(std::string_view utf8, int begin, int end);

std::string CaseFold(std::string_view utf8);

bool IsSpace(char32_t c);
bool IsPunct(char32_t c);
// Letters, digits, combining marks, underscore and the zero-width joiners
// used inside Indic words.
bool IsWordChar(char32_t c);

// True iff every scalar value is punctuation (and the string is nonempty).
bool IsPunctuation(std::u32string_view text);
bool IsPunctuation(std::string_view utf8);

// Strips leading and trailing Unicode whitespace.
std::string Trim(std::string_view utf8);

}  // namespace xclaim::unicode

#endif  // XCLAIM_UNICODE_H_
