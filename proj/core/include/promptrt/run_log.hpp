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
#include <fstream>
#include <mutex>
#include <string>

#include "promptrt/errors.hpp"

namespace promptrt {

/// One line of a run log. `payload_json` holds the per-item document
/// (transcript, eval record, report, or item error).
struct RunLogEntry {
  std::string timestamp;      // RFC 3339, UTC
  std::string config_digest;  // hex SHA-256 of the canonical run config
  std::string kind;
  std::string payload_json;
};

std::string run_log_entry_to_json(const RunLogEntry& entry);
RunLogEntry run_log_entry_from_json(const std::string& line);

std::string utc_timestamp_rfc3339();

/// `<timestamp>-<digest prefix>.jsonl`, timestamp in the filesystem-safe
/// basic ISO form.
std::string run_log_filename(const std::string& config_digest);

/// Append-only line-delimited JSON writer. All appends funnel through one
/// internally locked appender, so concurrent workers can share it.
class RunLog {
 public:
  RunLog(std::filesystem::path path, std::string config_digest);

  const std::filesystem::path& path() const { return path_; }
  void append(const std::string& kind, const std::string& payload_json);

 private:
  std::filesystem::path path_;
  std::string config_digest_;
  std::ofstream out_;
  std::mutex mutex_;
};

}  // namespace promptrt
