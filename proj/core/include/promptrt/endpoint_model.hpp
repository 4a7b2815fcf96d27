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

#include <chrono>
#include <string>

#include "promptrt/lm.hpp"

namespace promptrt {

struct EndpointConfig {
  std::string base_url;  // e.g. http://localhost:8000; empty = $PROMPTRT_API_BASE
  std::string api_key;   // empty = $PROMPTRT_API_KEY
  std::string model_id;  // opaque; sent as the `model` field
  int max_retries = 3;   // idempotent requests only
  std::chrono::milliseconds backoff_base{500};
  std::chrono::seconds timeout{60};
};

/// Client for an OpenAI-style `POST <base>/v1/completions` endpoint.
/// score_continuation() requests the context+fragment concatenation with
/// echoed prompt logprobs and sums the logprobs of exactly the fragment's
/// tokens, aligned by character offset; a token straddling the boundary
/// counts as part of the fragment.
class EndpointModel : public LanguageModel {
 public:
  explicit EndpointModel(EndpointConfig config);

  std::string id() const override { return config_.model_id; }
  const EndpointConfig& config() const { return config_; }

  Completion generate(const std::string& prompt,
                      const GenParams& params) const override;
  double score_continuation(const std::string& context,
                            const std::string& fragment) const override;

 private:
  std::string post_completions(const std::string& body_json) const;

  EndpointConfig config_;
  std::string host_;        // scheme://host[:port]
  std::string path_prefix_; // anything after the authority
};

}  // namespace promptrt
