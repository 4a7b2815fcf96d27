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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "promptrt/errors.hpp"

namespace promptrt {

// How a generation hole decides where its counterfactual anchor comes from.
enum class AnchorMode {
  none,          // open-ended hole, no anchor scoring
  next_literal,  // anchor = the literal segment that follows the hole
  text,          // anchor = explicit text given in the template
};

struct HoleParams {
  std::uint32_t max_tokens = 128;
  std::vector<std::string> stop;
  AnchorMode anchor_mode = AnchorMode::none;
  std::string anchor_text;  // set when anchor_mode == text
  // min_tokens / patience are left unset unless the template spells them out,
  // so a run-level InjectionPolicy can fill them in.
  std::optional<std::uint32_t> min_tokens;
  std::optional<std::uint32_t> patience;

  std::uint32_t min_tokens_or(std::uint32_t fallback = 1) const {
    return min_tokens.value_or(fallback);
  }
  std::uint32_t patience_or(std::uint32_t fallback = 5) const {
    return patience.value_or(fallback);
  }

  bool operator==(const HoleParams&) const = default;
};

/// One piece of a parsed template: literal text, a variable slot, or a
/// generation hole.
struct Segment {
  enum class Kind { literal, var, hole };

  Kind kind = Kind::literal;
  std::string text;  // literal text (kind == literal)
  std::string name;  // identifier (kind == var or hole)
  HoleParams hole;   // meaningful only when kind == hole

  static Segment make_literal(std::string text);
  static Segment make_var(std::string name);
  static Segment make_hole(std::string name, HoleParams params = {});

  bool operator==(const Segment&) const = default;
};

/// A parsed multi-part prompt: literals, variable slots, and generation
/// holes, in template order. Adjacent literals are always coalesced and
/// empty literals dropped.
struct PromptTemplate {
  std::vector<Segment> segments;
  std::string source_text;

  bool has_holes() const;
  std::vector<std::string> var_names() const;  // distinct, in first-use order
};

/// Parses template text. Syntax:
///   {{var:NAME}}                      variable slot
///   {{gen:NAME key=value ...}}        generation hole
///   \{{                               literal "{{"
/// Hole keys: max_tokens, stop (quoted, repeatable), anchor (next or a
/// quoted text), min_tokens, patience. Quoted values understand \n, \t,
/// \" and \\.
///
/// Throws SyntaxError (with 1-based line/column) on unterminated
/// directives, unknown keys, bad values, duplicate names, or anchor=next
/// with no literal following the hole.
///
/// A variable may appear more than once (every occurrence substitutes the
/// same binding); hole names are unique and may not collide with any
/// variable name.
PromptTemplate parse_template(const std::string& text);

struct RenderOptions {
  // Emit one trailing space after the rendered text. Catalog templates strip
  // line-end whitespace; prompts in the colon style are sometimes written
  // with a trailing space after the final cue, and this restores it.
  bool trailing_space = false;
};

/// Renders a hole-free template: literals verbatim, variables substituted
/// verbatim (no re-parsing of substituted values). Extra bindings are
/// ignored. Throws MissingBinding / HolePresent.
std::string render(const PromptTemplate& t,
                   const std::map<std::string, std::string>& bindings,
                   const RenderOptions& opts = {});

/// Writes segments back to template syntax. parse(serialize(parse(x)))
/// reproduces the segment structure of parse(x).
std::string serialize(const PromptTemplate& t);

/// Built-in metaprompt and translation templates, keyed by name:
/// simple_colon, master_translator, naive_translate, split_steps,
/// analyze_options, expert_generator.
const std::map<std::string, PromptTemplate>& catalog();

/// Raw template text for the catalog entries (what `catalog --export`
/// writes to .pt files).
const std::map<std::string, std::string>& catalog_sources();

}  // namespace promptrt
