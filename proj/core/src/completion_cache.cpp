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

#include "promptrt/completion_cache.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "promptrt/digest.hpp"

namespace promptrt {

std::string canonical_params(const GenParams& params) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "temperature=%.6f;top_p=%.6f;max_tokens=%u;logprobs=%d;stop=",
                params.temperature, params.top_p, params.max_tokens,
                params.logprobs ? 1 : 0);
  std::string out = buf;
  for (const auto& s : params.stop) {
    out += std::to_string(s.size());
    out += ':';
    out += s;
    out += ';';
  }
  return out;
}

std::string cache_key(const std::string& model_id, const std::string& prompt,
                      const GenParams& params) {
  std::string material;
  material.reserve(model_id.size() + prompt.size() + 96);
  material += model_id;
  material += '\n';
  material += canonical_params(params);
  material += '\n';
  material += prompt;
  return sha256_hex(material);
}

CompletionCache::CompletionCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw StorageError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::optional<Completion> CompletionCache::get(const std::string& key) const {
  std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return completion_from_json(buf.str());
  } catch (const std::exception&) {
    return std::nullopt;  // a corrupt entry behaves like a miss
  }
}

void CompletionCache::put(const std::string& key, const Completion& value) const {
  static std::atomic<unsigned> counter{0};
  auto final_path = dir_ / (key + ".json");
  auto tmp_path = dir_ / (key + ".tmp" + std::to_string(counter.fetch_add(1)) +
                          "." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cache directory not writable: " + dir_.string());
    out << completion_to_json(value);
    out.flush();
    if (!out) throw StorageError("short write to " + tmp_path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp_path);
    throw StorageError("cannot publish cache entry: " + ec.message());
  }
}

CachingModel::CachingModel(std::shared_ptr<const LanguageModel> inner,
                           CompletionCache cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

Completion CachingModel::generate(const std::string& prompt,
                                  const GenParams& params) const {
  std::string key = cache_key(inner_->id(), prompt, params);
  if (auto hit = cache_.get(key)) return *hit;
  Completion fresh = inner_->generate(prompt, params);
  cache_.put(key, fresh);
  return fresh;
}

double CachingModel::score_continuation(const std::string& context,
                                        const std::string& fragment) const {
  GenParams marker;
  marker.max_tokens = 1;
  marker.logprobs = true;
  std::string key = cache_key(inner_->id() + "#score",
                              context + '\x1f' + fragment, marker);
  if (auto hit = cache_.get(key); hit && !hit->tokens.empty() &&
                                  hit->tokens[0].logprob) {
    return *hit->tokens[0].logprob;
  }
  double lp = inner_->score_continuation(context, fragment);
  Completion record;
  record.tokens.push_back({fragment, lp});
  record.finish_reason = FinishReason::end_of_text;
  cache_.put(key, record);
  return lp;
}

}  // namespace promptrt
