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

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "promptrt/errors.hpp"
#include "promptrt/template_dsl.hpp"

namespace promptrt {

/// One solved translation example. Both sides are non-empty and single-line
/// (multi-line subjects break the colon constraint, so they are rejected at
/// ingestion rather than escaped).
struct ExamplePair {
  std::string source;  // French
  std::string target;  // English

  void validate() const;  // throws Error on empty/multi-line fields

  bool operator==(const ExamplePair&) const = default;
};

enum class FormatName { simple_colon, master_translator, naive_translate };

const char* to_string(FormatName name);
std::optional<FormatName> format_name_from_string(const std::string& s);

struct FirstK {};
struct SeededRandom {
  std::uint64_t seed = 0;
};
using Selection = std::variant<FirstK, SeededRandom>;

/// Which translation prompt to build and with how many solved examples.
/// master_translator and naive_translate are 0-shot only.
struct FormatSpec {
  FormatName name = FormatName::simple_colon;
  std::uint32_t shots = 0;
  Selection selection = FirstK{};

  void validate() const;  // throws FormatShotMismatch
};

/// first_k keeps pool order; seeded_random draws k distinct pairs with a
/// deterministic PRNG. Throws PoolTooSmall when k exceeds the pool.
std::vector<ExamplePair> select_examples(const std::vector<ExamplePair>& pool,
                                         std::size_t k, const Selection& selection);

/// Builds the prompt text for one query. simple_colon emits
/// `French: {src}\nEnglish: {tgt}` blocks separated by one blank line and
/// ends with the query block `French: {query}\nEnglish:`; the other two
/// formats render their catalog templates with the query bound.
std::string build_prompt(const FormatSpec& spec,
                         const std::vector<ExamplePair>& pool,
                         const std::string& query_source,
                         const RenderOptions& opts = {});

/// Reads `source<TAB>target` lines (UTF-8, no header). Throws Error with a
/// 1-based line number for missing tabs or empty fields.
std::vector<ExamplePair> load_pool_tsv(const std::filesystem::path& path);
std::vector<ExamplePair> parse_pool_tsv(const std::string& text,
                                        const std::string& origin = "<tsv>");

}  // namespace promptrt
