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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "promptrt/errors.hpp"

namespace promptrt {

/// mteval-13a tokenization (the WMT default): pads punctuation with spaces
/// except periods/commas flanked by digits on both sides, splits dashes
/// after digits, and splits on (Unicode) whitespace. Case is preserved.
std::vector<std::string> tokenize_13a(const std::string& text);

/// Clipped n-gram statistics for n = 1..4. Additive across sentences; the
/// corpus score is computed from summed stats.
struct BleuStats {
  std::array<std::int64_t, 4> clipped{};   // clipped_matches[n-1]
  std::array<std::int64_t, 4> hyp_ngrams{};  // hypothesis n-gram totals
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;  // closest reference length (ties -> shorter)

  BleuStats& operator+=(const BleuStats& other);

  bool operator==(const BleuStats&) const = default;
};

struct Smoothing {
  enum class Kind { none, add_k };
  Kind kind = Kind::none;
  double k = 1.0;

  static Smoothing none() { return {Kind::none, 0.0}; }
  static Smoothing add_k(double k = 1.0) { return {Kind::add_k, k}; }
};

/// Clipped matches against union-max reference counts.
BleuStats sentence_stats(const std::string& hypothesis,
                         const std::vector<std::string>& references);

/// 100 * BP * exp(mean log precision). With no smoothing any zero
/// precision gives exactly 0; add_k smooths orders n >= 2 only. Throws
/// EmptyCorpus when the hypothesis side is empty.
double corpus_bleu(const BleuStats& stats, const Smoothing& smoothing = {});

enum class FailureKind { blank_or_underscore, same_language_continuation, source_copy };

const char* to_string(FailureKind k);

struct FailureReason {
  FailureKind kind = FailureKind::blank_or_underscore;
  std::string evidence;  // substring of the hypothesis (or matched source span)
  double score = 0.0;    // in [0, 1]

  bool operator==(const FailureReason&) const = default;
};

/// Operating points for the catastrophic-failure detector. The defaults are
/// the shipped configuration; all three are overridable.
struct DetectorConfig {
  double underscore_fraction = 0.5;
  double stopword_margin = 0.15;
  std::size_t margin_min_tokens = 3;
  double copy_ratio = 0.8;
};

/// First matching reason in priority order: blank/underscore output, then a
/// French rather than English continuation (stopword-ratio margin over
/// embedded 40-word lists), then a near-copy of the source (normalized
/// longest common substring). Deterministic and total.
std::optional<FailureReason> detect_failure(const std::string& source,
                                            const std::string& hypothesis,
                                            const DetectorConfig& config = {});

const std::vector<std::string>& french_stopwords();
const std::vector<std::string>& english_stopwords();

struct EvalItem {
  std::string source;
  std::vector<std::string> references;
  std::string hypothesis;
};

struct EvalRecord {
  std::string source;
  std::vector<std::string> references;
  std::string hypothesis;
  BleuStats stats;
  std::optional<FailureReason> failure;
};

struct Report {
  std::size_t n_records = 0;
  std::map<FailureKind, std::size_t> n_failures;
  double failure_rate = 0.0;
  double bleu_all = 0.0;
  // Empty when every record failed: an all-failure corpus has no clean
  // score, which is reported as undefined rather than 0.
  std::optional<double> bleu_clean;
};

std::pair<std::vector<EvalRecord>, Report> evaluate_corpus(
    const std::vector<EvalItem>& items, const Smoothing& smoothing = {},
    const DetectorConfig& detector = {});

std::string report_to_json(const Report& report);
std::string eval_record_to_json(const EvalRecord& record);

/// Aligned plain-text table, prompt-format rows by model columns.
std::string render_report_table(
    const std::vector<std::string>& model_columns,
    const std::vector<std::pair<std::string, std::map<std::string, Report>>>& rows);

}  // namespace promptrt
