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

#include "promptrt/mt_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "promptrt/unicode.hpp"

namespace promptrt {

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// ASCII characters the 13a rule set always pads with spaces: punctuation
// except apostrophe, comma, hyphen, and period.
bool is_13a_padded_punct(char c) {
  switch (c) {
    case '!': case '"': case '#': case '$': case '%': case '&':
    case '(': case ')': case '*': case '+': case '/':
    case ':': case ';': case '<': case '=': case '>': case '?': case '@':
    case '[': case '\\': case ']': case '^': case '_': case '`':
    case '{': case '|': case '}': case '~':
      return true;
    default:
      return false;
  }
}

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// The period/comma rules mirror the reference implementation's two
// sequential substitution passes, including their left-to-right
// non-overlapping match behavior.
std::string pad_period_comma_after_nondigit(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 16);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && !is_ascii_digit(s[i]) &&
        (s[i + 1] == '.' || s[i + 1] == ',')) {
      out.push_back(s[i]);
      out.push_back(' ');
      out.push_back(s[i + 1]);
      out.push_back(' ');
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

std::string pad_period_comma_before_nondigit(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 16);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && (s[i] == '.' || s[i] == ',') &&
        !is_ascii_digit(s[i + 1])) {
      out.push_back(' ');
      out.push_back(s[i]);
      out.push_back(' ');
      out.push_back(s[i + 1]);
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

std::string pad_dash_after_digit(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && is_ascii_digit(s[i]) && s[i + 1] == '-') {
      out.push_back(s[i]);
      out.push_back(' ');
      out.push_back(s[i + 1]);
      out.push_back(' ');
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize_13a(const std::string& text) {
  std::string s = text;
  replace_all(s, "<skipped>", "");
  replace_all(s, "-\n", "");
  replace_all(s, "\n", " ");
  if (s.find('&') != std::string::npos) {
    replace_all(s, "&quot;", "\"");
    replace_all(s, "&amp;", "&");
    replace_all(s, "&lt;", "<");
    replace_all(s, "&gt;", ">");
  }

  // Unicode space separators split tokens exactly like ASCII space.
  {
    std::string normalized;
    normalized.reserve(s.size());
    for (char32_t cp : utf8_decode(s)) {
      if (is_unicode_space(cp)) {
        normalized.push_back(' ');
      } else {
        normalized += utf8_encode(cp);
      }
    }
    s = std::move(normalized);
  }

  s = " " + s + " ";

  {
    std::string padded;
    padded.reserve(s.size() + 32);
    for (char c : s) {
      if (is_13a_padded_punct(c)) {
        padded.push_back(' ');
        padded.push_back(c);
        padded.push_back(' ');
      } else {
        padded.push_back(c);
      }
    }
    s = std::move(padded);
  }

  s = pad_period_comma_after_nondigit(s);
  s = pad_period_comma_before_nondigit(s);
  s = pad_dash_after_digit(s);

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) tokens.push_back(s.substr(start, i - start));
  }
  return tokens;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    clipped[n] += other.clipped[n];
    hyp_ngrams[n] += other.hyp_ngrams[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

namespace {

using NgramCounts = std::unordered_map<std::string, std::int64_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuStats sentence_stats(const std::string& hypothesis,
                         const std::vector<std::string>& references) {
  if (references.empty()) throw Error("sentence_stats needs at least one reference");

  std::vector<std::string> hyp_tokens = tokenize_13a(hypothesis);
  std::vector<std::vector<std::string>> ref_tokens;
  ref_tokens.reserve(references.size());
  for (const auto& r : references) ref_tokens.push_back(tokenize_13a(r));

  BleuStats stats;
  stats.hyp_len = static_cast<std::int64_t>(hyp_tokens.size());

  // closest reference length; ties go to the shorter reference
  std::int64_t best_len = static_cast<std::int64_t>(ref_tokens[0].size());
  for (const auto& rt : ref_tokens) {
    auto len = static_cast<std::int64_t>(rt.size());
    auto diff = std::llabs(len - stats.hyp_len);
    auto best_diff = std::llabs(best_len - stats.hyp_len);
    if (diff < best_diff || (diff == best_diff && len < best_len)) best_len = len;
  }
  stats.ref_len = best_len;

  for (std::size_t n = 1; n <= 4; ++n) {
    NgramCounts hyp_counts = count_ngrams(hyp_tokens, n);
    NgramCounts max_ref;
    for (const auto& rt : ref_tokens) {
      for (const auto& [gram, count] : count_ngrams(rt, n)) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    std::int64_t clipped = 0;
    std::int64_t total = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) clipped += std::min(count, it->second);
    }
    stats.clipped[n - 1] = clipped;
    stats.hyp_ngrams[n - 1] = total;
  }
  return stats;
}

double corpus_bleu(const BleuStats& stats, const Smoothing& smoothing) {
  if (stats.hyp_len <= 0) throw EmptyCorpus("corpus has an empty hypothesis side");

  double log_precision_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double m = static_cast<double>(stats.clipped[n]);
    double t = static_cast<double>(stats.hyp_ngrams[n]);
    double p;
    if (smoothing.kind == Smoothing::Kind::add_k && n >= 1) {
      p = (m + smoothing.k) / (t + smoothing.k);
    } else {
      if (m <= 0.0 || t <= 0.0) return 0.0;
      p = m / t;
    }
    if (p <= 0.0) return 0.0;
    log_precision_sum += std::log(p);
  }

  double bp = 1.0;
  if (stats.hyp_len <= stats.ref_len) {
    bp = std::exp(1.0 - static_cast<double>(stats.ref_len) /
                            static_cast<double>(stats.hyp_len));
  }
  return 100.0 * bp * std::exp(log_precision_sum / 4.0);
}

const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::blank_or_underscore: return "blank_or_underscore";
    case FailureKind::same_language_continuation: return "same_language_continuation";
    case FailureKind::source_copy: return "source_copy";
  }
  return "blank_or_underscore";
}

namespace {

// 40 high-frequency words per language. ASCII-only so that plain
// lowercasing is enough for membership tests.
const char* const kFrenchStopwords[] = {
    "le",   "la",   "les",  "un",   "une",  "des",  "du",   "de",
    "et",   "est",  "en",   "que",  "qui",  "ne",   "pas",  "pour",
    "dans", "ce",   "cette", "il",  "elle", "je",   "nous", "vous",
    "ils",  "sur",  "avec", "au",   "aux",  "se",   "son",  "sa",
    "ses",  "mais", "ou",   "si",   "plus", "par",  "sont", "aussi"};

const char* const kEnglishStopwords[] = {
    "the",  "of",   "and",  "a",    "to",   "in",   "is",   "it",
    "you",  "that", "he",   "was",  "for",  "on",   "are",  "as",
    "with", "his",  "they", "i",    "at",   "be",   "this", "have",
    "from", "or",   "one",  "had",  "by",   "not",  "but",  "what",
    "all",  "were", "we",   "when", "your", "can",  "said", "there"};

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
  }
  return out;
}

bool in_list(const std::string& lowered, const std::vector<std::string>& words) {
  return std::find(words.begin(), words.end(), lowered) != words.end();
}

// Longest common substring length (bytes), plus the hypothesis-side span.
std::pair<std::size_t, std::string> longest_common_substring(
    const std::string& a, const std::string& hyp) {
  if (a.empty() || hyp.empty()) return {0, ""};
  std::vector<std::size_t> prev(hyp.size() + 1, 0), cur(hyp.size() + 1, 0);
  std::size_t best = 0, best_end = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      if (a[i - 1] == hyp[j - 1]) {
        cur[j] = prev[j - 1] + 1;
        if (cur[j] > best) {
          best = cur[j];
          best_end = j;
        }
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return {best, hyp.substr(best_end - best, best)};
}

std::string excerpt_of(const std::string& s, std::size_t n = 48) {
  return s.size() <= n ? s : s.substr(0, n);
}

}  // namespace

const std::vector<std::string>& french_stopwords() {
  static const std::vector<std::string> words(std::begin(kFrenchStopwords),
                                              std::end(kFrenchStopwords));
  return words;
}

const std::vector<std::string>& english_stopwords() {
  static const std::vector<std::string> words(std::begin(kEnglishStopwords),
                                              std::end(kEnglishStopwords));
  return words;
}

std::optional<FailureReason> detect_failure(const std::string& source,
                                            const std::string& hypothesis,
                                            const DetectorConfig& config) {
  // 1. blanks or underscores
  std::size_t non_space = 0;
  std::size_t underscores = 0;
  for (char32_t cp : utf8_decode(hypothesis)) {
    if (is_unicode_space(cp)) continue;
    ++non_space;
    if (cp == U'_') ++underscores;
  }
  if (non_space == 0) {
    return FailureReason{FailureKind::blank_or_underscore, "", 1.0};
  }
  double underscore_fraction =
      static_cast<double>(underscores) / static_cast<double>(non_space);
  if (underscore_fraction >= config.underscore_fraction) {
    auto first = hypothesis.find('_');
    auto last = hypothesis.find_first_not_of('_', first);
    std::string evidence = hypothesis.substr(
        first, last == std::string::npos ? std::string::npos : last - first);
    return FailureReason{FailureKind::blank_or_underscore, excerpt_of(evidence),
                         underscore_fraction};
  }

  // 2. continuation in the source language instead of a translation
  std::vector<std::string> tokens = tokenize_13a(hypothesis);
  if (tokens.size() >= config.margin_min_tokens) {
    std::size_t fr = 0, en = 0;
    std::string first_french;
    for (const auto& tok : tokens) {
      std::string lowered = ascii_lower(tok);
      if (in_list(lowered, french_stopwords())) {
        ++fr;
        if (first_french.empty()) first_french = tok;
      }
      if (in_list(lowered, english_stopwords())) ++en;
    }
    double margin = (static_cast<double>(fr) - static_cast<double>(en)) /
                    static_cast<double>(tokens.size());
    if (margin >= config.stopword_margin) {
      std::string evidence = first_french;
      if (hypothesis.find(evidence) == std::string::npos) {
        evidence = excerpt_of(hypothesis);
      }
      return FailureReason{FailureKind::same_language_continuation, evidence,
                           std::min(margin, 1.0)};
    }
  }

  // 3. the hypothesis mostly copies the source
  std::size_t shorter = std::min(source.size(), hypothesis.size());
  if (shorter > 0) {
    auto [lcs_len, span] = longest_common_substring(source, hypothesis);
    double ratio = static_cast<double>(lcs_len) / static_cast<double>(shorter);
    if (ratio >= config.copy_ratio) {
      return FailureReason{FailureKind::source_copy, excerpt_of(span),
                           std::min(ratio, 1.0)};
    }
  }

  return std::nullopt;
}

std::pair<std::vector<EvalRecord>, Report> evaluate_corpus(
    const std::vector<EvalItem>& items, const Smoothing& smoothing,
    const DetectorConfig& detector) {
  if (items.empty()) throw EmptyCorpus("no evaluation records");

  std::vector<EvalRecord> records;
  records.reserve(items.size());
  BleuStats all;
  BleuStats clean;
  std::size_t n_clean = 0;

  Report report;
  report.n_records = items.size();

  for (const auto& item : items) {
    EvalRecord rec;
    rec.source = item.source;
    rec.references = item.references;
    rec.hypothesis = item.hypothesis;
    rec.stats = sentence_stats(item.hypothesis, item.references);
    rec.failure = detect_failure(item.source, item.hypothesis, detector);

    all += rec.stats;
    if (rec.failure) {
      ++report.n_failures[rec.failure->kind];
    } else {
      clean += rec.stats;
      ++n_clean;
    }
    records.push_back(std::move(rec));
  }

  std::size_t n_failed = items.size() - n_clean;
  report.failure_rate =
      static_cast<double>(n_failed) / static_cast<double>(items.size());
  report.bleu_all = corpus_bleu(all, smoothing);
  if (n_clean > 0 && clean.hyp_len > 0) {
    report.bleu_clean = corpus_bleu(clean, smoothing);
  }
  return {std::move(records), report};
}

std::string report_to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["n_records"] = report.n_records;
  nlohmann::ordered_json failures;
  for (FailureKind kind : {FailureKind::blank_or_underscore,
                           FailureKind::same_language_continuation,
                           FailureKind::source_copy}) {
    auto it = report.n_failures.find(kind);
    failures[to_string(kind)] = it == report.n_failures.end() ? 0 : it->second;
  }
  j["n_failures"] = std::move(failures);
  j["failure_rate"] = report.failure_rate;
  j["bleu_all"] = report.bleu_all;
  if (report.bleu_clean) {
    j["bleu_clean"] = *report.bleu_clean;
  } else {
    j["bleu_clean"] = nullptr;
  }
  return j.dump();
}

std::string eval_record_to_json(const EvalRecord& record) {
  nlohmann::ordered_json j;
  j["source"] = record.source;
  j["references"] = record.references;
  j["hypothesis"] = record.hypothesis;
  j["stats"] = {{"clipped", record.stats.clipped},
                {"hyp_ngrams", record.stats.hyp_ngrams},
                {"hyp_len", record.stats.hyp_len},
                {"ref_len", record.stats.ref_len}};
  if (record.failure) {
    j["failure"] = {{"reason", to_string(record.failure->kind)},
                    {"evidence", record.failure->evidence},
                    {"score", record.failure->score}};
  } else {
    j["failure"] = nullptr;
  }
  return j.dump();
}

std::string render_report_table(
    const std::vector<std::string>& model_columns,
    const std::vector<std::pair<std::string, std::map<std::string, Report>>>& rows) {
  std::size_t label_width = std::string("Prompt").size();
  for (const auto& [label, cells] : rows) label_width = std::max(label_width, label.size());

  std::vector<std::size_t> widths;
  for (const auto& col : model_columns) widths.push_back(std::max<std::size_t>(col.size(), 6));

  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out << s;
    for (std::size_t i = s.size(); i < w; ++i) out << ' ';
  };

  pad("Prompt", label_width);
  for (std::size_t c = 0; c < model_columns.size(); ++c) {
    out << "  ";
    pad(model_columns[c], widths[c]);
  }
  out << '\n';

  for (const auto& [label, cells] : rows) {
    pad(label, label_width);
    for (std::size_t c = 0; c < model_columns.size(); ++c) {
      out << "  ";
      auto it = cells.find(model_columns[c]);
      if (it == cells.end()) {
        pad("-", widths[c]);
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", it->second.bleu_all);
        pad(buf, widths[c]);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace promptrt
