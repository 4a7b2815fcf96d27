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

#include "promptrt/endpoint_model.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace promptrt {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

bool retryable_status(int status) {
  return status == 429 || status == 500 || status == 502 || status == 503 ||
         status == 504;
}

std::string excerpt(const std::string& s, std::size_t n = 256) {
  return s.size() <= n ? s : s.substr(0, n) + "...";
}

}  // namespace

EndpointModel::EndpointModel(EndpointConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    config_.base_url = env_or("PROMPTRT_API_BASE", "");
  }
  if (config_.api_key.empty()) {
    config_.api_key = env_or("PROMPTRT_API_KEY", "");
  }
  if (config_.base_url.empty()) {
    throw EndpointError("no endpoint base URL (set PROMPTRT_API_BASE)", 0, "");
  }
  // Split scheme://authority from an optional path prefix.
  auto scheme_end = config_.base_url.find("://");
  auto path_start = scheme_end == std::string::npos
                        ? config_.base_url.find('/')
                        : config_.base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_ = config_.base_url;
  } else {
    host_ = config_.base_url.substr(0, path_start);
    path_prefix_ = config_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

std::string EndpointModel::post_completions(const std::string& body_json) const {
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  std::string path = path_prefix_ + "/v1/completions";

  int attempts = config_.max_retries + 1;
  std::string last_error = "unreachable";
  int last_status = 0;
  std::string last_body;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
    }
    httplib::Client client(host_);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto res = client.Post(path, headers, body_json, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      last_status = 0;
      last_body.clear();
      continue;
    }
    if (res->status == 200) return res->body;
    last_error = "endpoint returned HTTP " + std::to_string(res->status);
    last_status = res->status;
    last_body = res->body;
    if (!retryable_status(res->status)) break;
  }
  throw EndpointError(last_error + (last_body.empty() ? "" : ": " + excerpt(last_body)),
                      last_status, excerpt(last_body));
}

Completion EndpointModel::generate(const std::string& prompt,
                                   const GenParams& params) const {
  if (prompt.empty()) throw std::invalid_argument("prompt must be non-empty");
  params.validate();

  nlohmann::ordered_json req;
  req["model"] = config_.model_id;
  req["prompt"] = prompt;
  req["max_tokens"] = params.max_tokens;
  req["temperature"] = params.temperature;
  req["top_p"] = params.top_p;
  if (!params.stop.empty()) req["stop"] = params.stop;
  if (params.logprobs) req["logprobs"] = 1;
  req["echo"] = false;

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(post_completions(req.dump()));
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError(std::string("malformed endpoint response: ") + e.what(), 200, "");
  }

  try {
    const auto& choice = body.at("choices").at(0);
    Completion c;
    std::string finish = choice.value("finish_reason", "");
    if (finish == "length") {
      c.finish_reason = FinishReason::max_tokens;
    } else if (finish == "stop") {
      c.finish_reason = FinishReason::stop_sequence;
    } else {
      c.finish_reason = FinishReason::end_of_text;
    }
    if (params.logprobs && choice.contains("logprobs") && !choice["logprobs"].is_null()) {
      const auto& lp = choice["logprobs"];
      const auto& toks = lp.at("tokens");
      const auto& probs = lp.at("token_logprobs");
      for (std::size_t i = 0; i < toks.size(); ++i) {
        Token t;
        t.text = toks[i].get<std::string>();
        if (i < probs.size() && !probs[i].is_null()) {
          t.logprob = std::min(probs[i].get<double>(), 0.0);
        }
        c.tokens.push_back(std::move(t));
      }
    } else {
      Token t;
      t.text = choice.at("text").get<std::string>();
      if (!t.text.empty()) c.tokens.push_back(std::move(t));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError(std::string("unexpected endpoint response shape: ") + e.what(),
                        200, excerpt(body.dump()));
  }
}

double EndpointModel::score_continuation(const std::string& context,
                                         const std::string& fragment) const {
  if (fragment.empty()) throw std::invalid_argument("fragment must be non-empty");

  nlohmann::ordered_json req;
  req["model"] = config_.model_id;
  req["prompt"] = context + fragment;
  req["max_tokens"] = 0;
  req["temperature"] = 0.0;
  req["top_p"] = 1.0;
  req["logprobs"] = 1;
  req["echo"] = true;

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(post_completions(req.dump()));
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError(std::string("malformed endpoint response: ") + e.what(), 200, "");
  }

  try {
    const auto& lp = body.at("choices").at(0).at("logprobs");
    if (!lp.contains("text_offset") || lp["text_offset"].is_null()) {
      throw BoundaryUnalignable("endpoint returned no text offsets; cannot "
                                "locate the fragment boundary");
    }
    const auto& offsets = lp["text_offset"];
    const auto& toks = lp.at("tokens");
    const auto& probs = lp.at("token_logprobs");
    const std::size_t boundary = context.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < offsets.size() && i < toks.size(); ++i) {
      std::size_t begin = offsets[i].get<std::size_t>();
      std::size_t end = begin + toks[i].get<std::string>().size();
      // A token straddling the boundary belongs to the fragment.
      if (end <= boundary) continue;
      if (i < probs.size() && !probs[i].is_null()) {
        sum += std::min(probs[i].get<double>(), 0.0);
      }
    }
    return sum;
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError(std::string("unexpected endpoint response shape: ") + e.what(),
                        200, excerpt(body.dump()));
  }
}

}  // namespace promptrt
