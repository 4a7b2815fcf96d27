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

#include "promptrt/scripted_model.hpp"

#include <algorithm>

#include "json.hpp"
#include "promptrt/digest.hpp"

namespace promptrt {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Truncates `tokens` so the concatenated text ends right before the first
// occurrence of any stop sequence. Returns true when a stop fired.
bool apply_stops(std::vector<Token>& tokens, const std::vector<std::string>& stops) {
  if (stops.empty() || tokens.empty()) return false;
  std::string text;
  for (const auto& t : tokens) text += t.text;
  std::size_t cut = std::string::npos;
  for (const auto& s : stops) {
    if (s.empty()) continue;
    auto pos = text.find(s);
    if (pos != std::string::npos) cut = std::min(cut, pos);
  }
  if (cut == std::string::npos) return false;
  std::vector<Token> kept;
  std::size_t used = 0;
  for (auto& t : tokens) {
    if (used >= cut) break;
    if (used + t.text.size() <= cut) {
      used += t.text.size();
      kept.push_back(std::move(t));
    } else {
      Token partial = t;
      partial.text = t.text.substr(0, cut - used);
      if (!partial.text.empty()) kept.push_back(std::move(partial));
      used = cut;
    }
  }
  tokens = std::move(kept);
  return true;
}

}  // namespace

void ScriptedModel::add_entry(std::string prompt_suffix, std::vector<Token> response) {
  entries_.push_back({std::move(prompt_suffix), std::move(response)});
}

std::string ScriptedModel::score_key(const std::string& context,
                                     const std::string& fragment) {
  return sha256_hex(context) + '\x1f' + fragment;
}

void ScriptedModel::add_score(const std::string& context,
                              const std::string& fragment, double logprob) {
  scores_[score_key(context, fragment)] = logprob;
}

void ScriptedModel::add_chain(const std::string& context,
                              const std::vector<Token>& steps) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string ctx = context;
    for (std::size_t k = 0; k < i; ++k) ctx += steps[k].text;
    std::string fragment;
    double sum = 0.0;
    for (std::size_t j = i; j < steps.size(); ++j) {
      fragment += steps[j].text;
      sum += steps[j].logprob.value_or(0.0);
      add_score(ctx, fragment, sum);
    }
  }
}

Completion ScriptedModel::generate(const std::string& prompt,
                                   const GenParams& params) const {
  if (prompt.empty()) throw std::invalid_argument("prompt must be non-empty");
  params.validate();

  bool exhausted_match = false;
  for (const auto& entry : entries_) {
    // Find the furthest point in the scripted response that the prompt has
    // already incorporated; serve from there.
    std::string grown = entry.suffix;
    std::size_t best_k = std::string::npos;
    if (ends_with(prompt, grown)) best_k = 0;
    for (std::size_t k = 0; k < entry.response.size(); ++k) {
      grown += entry.response[k].text;
      if (ends_with(prompt, grown)) best_k = k + 1;
    }
    if (best_k == std::string::npos) continue;
    if (best_k == entry.response.size()) {
      exhausted_match = true;
      continue;
    }

    Completion c;
    for (std::size_t k = best_k;
         k < entry.response.size() && c.tokens.size() < params.max_tokens; ++k) {
      c.tokens.push_back(entry.response[k]);
    }
    c.finish_reason = (best_k + c.tokens.size() == entry.response.size())
                          ? FinishReason::end_of_text
                          : FinishReason::max_tokens;
    if (apply_stops(c.tokens, params.stop)) {
      c.finish_reason = FinishReason::stop_sequence;
    }
    if (!params.logprobs) {
      for (auto& t : c.tokens) t.logprob.reset();
    }
    return c;
  }

  if (exhausted_match) {
    Completion c;
    c.finish_reason = FinishReason::end_of_text;
    return c;
  }
  throw ScriptExhausted("no scripted entry matches prompt tail: ..." +
                        prompt.substr(prompt.size() > 48 ? prompt.size() - 48 : 0));
}

double ScriptedModel::score_continuation(const std::string& context,
                                         const std::string& fragment) const {
  if (fragment.empty()) throw std::invalid_argument("fragment must be non-empty");
  auto it = scores_.find(score_key(context, fragment));
  if (it == scores_.end()) {
    throw ScriptExhausted("no scripted score for fragment: " + fragment);
  }
  return it->second;
}

ScriptedModel ScriptedModel::from_json(const std::string& json_text, std::string id) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.contains("id")) id = j["id"].get<std::string>();
  ScriptedModel m(std::move(id));

  auto parse_tokens = [](const nlohmann::json& arr) {
    std::vector<Token> tokens;
    for (const auto& e : arr) {
      Token t;
      if (e.is_string()) {
        t.text = e.get<std::string>();
        t.logprob = -1.0;
      } else {
        t.text = e.at(0).get<std::string>();
        if (e.size() > 1 && !e.at(1).is_null()) t.logprob = e.at(1).get<double>();
      }
      tokens.push_back(std::move(t));
    }
    return tokens;
  };

  for (const auto& e : j.value("entries", nlohmann::json::array())) {
    m.add_entry(e.at("suffix").get<std::string>(), parse_tokens(e.at("tokens")));
  }
  for (const auto& s : j.value("scores", nlohmann::json::array())) {
    m.add_score(s.at("context").get<std::string>(),
                s.at("fragment").get<std::string>(), s.at("logprob").get<double>());
  }
  for (const auto& c : j.value("chains", nlohmann::json::array())) {
    m.add_chain(c.at("context").get<std::string>(), parse_tokens(c.at("tokens")));
  }
  return m;
}

}  // namespace promptrt
