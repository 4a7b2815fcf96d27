/* Copyright 2026 The promptrt Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace promptrt {

/// Decodes UTF-8 into codepoints. Invalid byte sequences decode to U+FFFD
/// (one replacement per bad byte) rather than failing.
std::vector<char32_t> utf8_decode(std::string_view text);

std::string utf8_encode(char32_t cp);

/// Whitespace in the sense used for tokenizer splitting: ASCII space
/// controls plus the Unicode space separators.
bool is_unicode_space(char32_t cp);

}  // namespace promptrt
