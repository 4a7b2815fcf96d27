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

#include "promptrt/lm.hpp"

#include <stdexcept>

#include "json.hpp"

namespace promptrt {

void GenParams::validate() const {
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be >= 1");
  if (stop.size() > 4) throw std::invalid_argument("at most 4 stop sequences");
  if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
  if (!(top_p > 0.0) || top_p > 1.0) throw std::invalid_argument("top_p must be in (0, 1]");
}

const char* to_string(FinishReason r) {
  switch (r) {
    case FinishReason::stop_sequence: return "stop_sequence";
    case FinishReason::max_tokens: return "max_tokens";
    case FinishReason::end_of_text: return "end_of_text";
    case FinishReason::injected: return "injected";
  }
  return "end_of_text";
}

std::optional<FinishReason> finish_reason_from_string(const std::string& s) {
  if (s == "stop_sequence") return FinishReason::stop_sequence;
  if (s == "max_tokens") return FinishReason::max_tokens;
  if (s == "end_of_text") return FinishReason::end_of_text;
  if (s == "injected") return FinishReason::injected;
  return std::nullopt;
}

std::string Completion::text() const {
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

std::string completion_to_json(const Completion& c) {
  nlohmann::ordered_json j;
  j["finish_reason"] = to_string(c.finish_reason);
  auto& toks = j["tokens"] = nlohmann::ordered_json::array();
  for (const auto& t : c.tokens) {
    nlohmann::ordered_json entry = nlohmann::ordered_json::array();
    entry.push_back(t.text);
    if (t.logprob) {
      entry.push_back(*t.logprob);
    } else {
      entry.push_back(nullptr);
    }
    toks.push_back(std::move(entry));
  }
  return j.dump();
}

Completion completion_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  Completion c;
  auto reason = finish_reason_from_string(j.at("finish_reason").get<std::string>());
  if (!reason) throw Error("unknown finish_reason in completion record");
  c.finish_reason = *reason;
  for (const auto& entry : j.at("tokens")) {
    Token t;
    t.text = entry.at(0).get<std::string>();
    if (!entry.at(1).is_null()) t.logprob = entry.at(1).get<double>();
    c.tokens.push_back(std::move(t));
  }
  return c;
}

}  // namespace promptrt
