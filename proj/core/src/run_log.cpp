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

#include "promptrt/run_log.hpp"

#include <ctime>

#include "json.hpp"

namespace promptrt {

std::string run_log_entry_to_json(const RunLogEntry& entry) {
  nlohmann::ordered_json j;
  j["ts"] = entry.timestamp;
  j["config_digest"] = entry.config_digest;
  j["kind"] = entry.kind;
  j["payload"] = nlohmann::ordered_json::parse(entry.payload_json);
  return j.dump();
}

RunLogEntry run_log_entry_from_json(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line);
  RunLogEntry entry;
  entry.timestamp = j.at("ts").get<std::string>();
  entry.config_digest = j.at("config_digest").get<std::string>();
  entry.kind = j.at("kind").get<std::string>();
  entry.payload_json = j.at("payload").dump();
  return entry;
}

std::string utc_timestamp_rfc3339() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string run_log_filename(const std::string& config_digest) {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return std::string(buf) + "-" + config_digest.substr(0, 12) + ".jsonl";
}

RunLog::RunLog(std::filesystem::path path, std::string config_digest)
    : path_(std::move(path)), config_digest_(std::move(config_digest)) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
    if (ec) throw StorageError("cannot create run log directory: " + ec.message());
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw StorageError("cannot open run log " + path_.string());
}

void RunLog::append(const std::string& kind, const std::string& payload_json) {
  RunLogEntry entry{utc_timestamp_rfc3339(), config_digest_, kind, payload_json};
  std::string line = run_log_entry_to_json(entry);
  std::lock_guard<std::mutex> lock(mutex_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw StorageError("run log write failed: " + path_.string());
}

}  // namespace promptrt
