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
#include <optional>
#include <string>
#include <vector>

#include "promptrt/errors.hpp"

namespace promptrt {

/// Sampling parameters for one generation request.
struct GenParams {
  double temperature = 0.0;  // 0 = greedy
  double top_p = 1.0;        // nucleus mass, in (0, 1]
  std::uint32_t max_tokens = 64;
  std::vector<std::string> stop;  // at most 4 (endpoint compatibility)
  bool logprobs = false;

  /// Throws std::invalid_argument when a field is out of contract.
  void validate() const;

  bool operator==(const GenParams&) const = default;
};

enum class FinishReason { stop_sequence, max_tokens, end_of_text, injected };

const char* to_string(FinishReason r);
std::optional<FinishReason> finish_reason_from_string(const std::string& s);

struct Token {
  std::string text;
  std::optional<double> logprob;  // <= 0 when present

  bool operator==(const Token&) const = default;
};

/// What a model returned for one generation request.
struct Completion {
  std::vector<Token> tokens;
  FinishReason finish_reason = FinishReason::end_of_text;

  std::string text() const;  // concatenation of token texts

  bool operator==(const Completion&) const = default;
};

/// JSON codec used by the completion cache and the run log.
std::string completion_to_json(const Completion& c);
Completion completion_from_json(const std::string& json_text);

/// Uniform surface over autoregressive language models. Implementations
/// must be safe to share across concurrent evaluation workers.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::string id() const = 0;

  /// Generates a continuation of `prompt` until a stop sequence,
  /// params.max_tokens, or end of text. The prompt must be non-empty.
  virtual Completion generate(const std::string& prompt,
                              const GenParams& params) const = 0;

  /// Sum of token log-probabilities of `fragment` conditioned on `context`.
  /// The fragment must be non-empty. Always <= 0.
  virtual double score_continuation(const std::string& context,
                                    const std::string& fragment) const = 0;
};

}  // namespace promptrt
