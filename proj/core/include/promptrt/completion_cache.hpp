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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "promptrt/lm.hpp"

namespace promptrt {

/// Canonical, formatting-stable serialization of generation parameters:
/// fixed field order, reals with 6 decimal places. Feeds cache keys.
std::string canonical_params(const GenParams& params);

/// Content address for a completion: SHA-256 over model id, prompt, and
/// canonicalized params.
std::string cache_key(const std::string& model_id, const std::string& prompt,
                      const GenParams& params);

/// Directory of `<hexdigest>.json` files, one completion per file. Writes
/// go to a temp name and are renamed into place, so concurrent readers
/// never observe partial files.
class CompletionCache {
 public:
  explicit CompletionCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<Completion> get(const std::string& key) const;
  void put(const std::string& key, const Completion& value) const;

 private:
  std::filesystem::path dir_;
};

/// Wraps a model with a CompletionCache. generate() consults the cache;
/// score_continuation() is cached as a single-token completion under a
/// key that marks the scoring operation.
class CachingModel : public LanguageModel {
 public:
  CachingModel(std::shared_ptr<const LanguageModel> inner, CompletionCache cache);

  std::string id() const override { return inner_->id(); }
  Completion generate(const std::string& prompt,
                      const GenParams& params) const override;
  double score_continuation(const std::string& context,
                            const std::string& fragment) const override;

 private:
  std::shared_ptr<const LanguageModel> inner_;
  CompletionCache cache_;
};

}  // namespace promptrt
