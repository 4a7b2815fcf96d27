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
#include <unordered_map>
#include <vector>

#include "promptrt/lm.hpp"

namespace promptrt {

/// Deterministic test double. An entry fires when its `suffix` (plus any
/// already-served response prefix) is a suffix of the prompt, so callers
/// that re-issue the grown prompt token by token keep reading from the
/// same entry. Scores come from an exact (context, fragment) table.
///
/// Configure fully before use; lookups are const and thread-safe.
class ScriptedModel : public LanguageModel {
 public:
  explicit ScriptedModel(std::string id = "mock:script") : id_(std::move(id)) {}

  void add_entry(std::string prompt_suffix, std::vector<Token> response);
  void add_score(const std::string& context, const std::string& fragment,
                 double logprob);

  /// Registers a consistent scoring chain: every contiguous sub-run of
  /// `steps` is scored as the sum of its per-token logprobs, conditioned on
  /// `context` plus the tokens before the run. Makes split-additivity hold
  /// by construction.
  void add_chain(const std::string& context, const std::vector<Token>& steps);

  /// Loads entries/scores/chains from a JSON document (the `script:` model
  /// spec; schema documented in the project README).
  static ScriptedModel from_json(const std::string& json_text,
                                 std::string id = "mock:script");

  std::string id() const override { return id_; }
  Completion generate(const std::string& prompt,
                      const GenParams& params) const override;
  double score_continuation(const std::string& context,
                            const std::string& fragment) const override;

 private:
  struct Entry {
    std::string suffix;
    std::vector<Token> response;
  };

  static std::string score_key(const std::string& context,
                               const std::string& fragment);

  std::string id_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, double> scores_;
};

}  // namespace promptrt
