// Copyright 2026 The GNR Authors.
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

// Small UTF-8 helpers. Tables are generated from Unicode 13.0.

#ifndef GNR_UNICODE_H_
#define GNR_UNICODE_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace gnr {

// Decodes the code point starting at text[pos] and stores its byte length.
// Invalid bytes decode as U+FFFD with length 1.
char32_t DecodeUtf8(std::string_view text, std::size_t pos, std::size_t *length);
void AppendUtf8(std::string &out, char32_t cp);

// General category P*, plus the ASCII symbols in "$+<=>^`|~".
bool IsPunctuation(char32_t cp);
bool IsSpace(char32_t cp);
// General category Ll.
bool IsLowercase(char32_t cp);
// Simple one-to-one lowercase mapping.
char32_t ToLower(char32_t cp);
std::string Lowercase(std::string_view text);

// Byte offset of the code point with the given index; text.size() when the
// index equals the code point count. Throws InputError past the end.
std::size_t CodepointToByteOffset(std::string_view text, std::size_t index);
std::size_t ByteToCodepointOffset(std::string_view text, std::size_t offset);

}  // namespace gnr

#endif  // GNR_UNICODE_H_
