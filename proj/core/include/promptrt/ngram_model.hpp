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
#include <string>
#include <unordered_map>

#include "promptrt/lm.hpp"

namespace promptrt {

/// Order-2 character model trained at construction on a small embedded
/// French/English parallel corpus. Deterministic: generation is a pure
/// function of (prompt, params, seed), so identical calls return identical
/// completions and handles are freely shareable across threads.
///
/// Generation applies temperature as a softmax scaling of character counts
/// (0 = greedy) plus nucleus truncation; reported logprobs and
/// score_continuation always use the untempered conditional distribution.
class NgramModel : public LanguageModel {
 public:
  explicit NgramModel(std::uint64_t seed = 0, std::string id = "");

  std::string id() const override { return id_; }
  std::uint64_t seed() const { return seed_; }

  Completion generate(const std::string& prompt,
                      const GenParams& params) const override;
  double score_continuation(const std::string& context,
                            const std::string& fragment) const override;

 private:
  using CountMap = std::map<char32_t, std::uint32_t>;

  const CountMap& distribution(char32_t c1, char32_t c2) const;
  double char_logprob(char32_t c1, char32_t c2, char32_t next) const;

  std::uint64_t seed_;
  std::string id_;
  std::unordered_map<std::uint64_t, CountMap> bigram_;
  std::unordered_map<std::uint32_t, CountMap> unigram_;
  CountMap base_;
};

}  // namespace promptrt
