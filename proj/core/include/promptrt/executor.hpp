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
#include <variant>
#include <vector>

#include "promptrt/lm.hpp"
#include "promptrt/template_dsl.hpp"

namespace promptrt {

/// Anchor log-probability recorded after each generated token of a hole.
struct SignalPoint {
  std::uint32_t token_index = 0;
  double anchor_logprob = 0.0;

  bool operator==(const SignalPoint&) const = default;
};

struct SignalSeries {
  std::vector<SignalPoint> points;

  bool operator==(const SignalSeries&) const = default;
};

enum class SpanKind { template_literal, variable, generated, injected_anchor };

const char* to_string(SpanKind k);

struct Span {
  SpanKind kind = SpanKind::template_literal;
  std::string text;
  std::optional<std::string> hole_name;
  std::optional<SignalSeries> signal;  // generated spans of anchored holes only
};

/// Full record of one template execution: provenance-tagged spans whose
/// concatenation is exactly the document the model ended up conditioned on.
struct Transcript {
  std::vector<Span> spans;
  std::optional<std::string> verdict;
  std::string model_id;
  GenParams params;
  std::int64_t wall_ms = 0;
  bool derailed = false;

  std::string text() const;
};

std::string transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const std::string& json_text);

/// Run-level injection defaults and the runaway guard. Holes that spell out
/// their own patience / min_tokens win over the policy values.
struct InjectionPolicy {
  std::uint32_t patience = 5;
  std::uint32_t min_tokens = 1;
  std::uint32_t hard_budget = 256;

  void validate() const;  // min_tokens < hard_budget
};

/// Runs a template against a model. Literals and variables append as spans;
/// each hole generates one token at a time. After every token of an
/// anchored hole the anchor's counterfactual likelihood is recorded; once
/// the running maximum has not improved for `patience` consecutive tokens
/// (counting only token indices >= min_tokens), the generated span is
/// truncated back to the argmax token and the anchor is appended as an
/// injected_anchor span. A hole ends early on its stop sequences or
/// max_tokens; at the policy hard budget an anchored hole injects in place,
/// and an unanchored one is flagged as derailed.
Transcript execute(const PromptTemplate& t,
                   const std::map<std::string, std::string>& bindings,
                   const LanguageModel& model, const GenParams& params,
                   const InjectionPolicy& policy = {});

// Verdict schemas for extract_verdict.
struct MultipleChoice {
  char first = 'A';
  char last = 'E';
};
struct IntegerAnswer {};
struct FreeText {};
using VerdictSchema = std::variant<MultipleChoice, IntegerAnswer, FreeText>;

/// Reads a closed-form verdict from the text after the final
/// injected_anchor span (or from the final generated span when nothing was
/// injected). Absence is a value, not an error.
std::optional<std::string> extract_verdict(const Transcript& tr,
                                           const VerdictSchema& schema);

}  // namespace promptrt
