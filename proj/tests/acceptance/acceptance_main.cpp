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

Acceptance suite. Runs every shipping criterion at its stated tolerance and
prints one line per criterion.
==============================================================================*/

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "promptrt/executor.hpp"
#include "promptrt/mt_eval.hpp"
#include "promptrt/ngram_model.hpp"
#include "promptrt/prompt_formats.hpp"
#include "promptrt/scripted_model.hpp"
#include "promptrt/template_dsl.hpp"

using namespace promptrt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << number << ". " << name;
  if (!detail.empty()) std::cout << "  (" << detail << ")";
  std::cout << "\n";
  if (!pass) ++g_failures;
}

std::string data_path(const std::string& name) {
  return std::string(PROMPTRT_TEST_DATA_DIR) + "/" + name;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

void criterion_1_oracle_parity() {
  auto start = Clock::now();
  auto hyps = read_lines(data_path("oracle_hyp.txt"));
  auto refs = read_lines(data_path("oracle_ref.txt"));
  double expected = std::stod(read_lines(data_path("oracle_bleu_expected.txt"))[0]);

  std::ostringstream out, err;
  int code = cli::run({"score", data_path("oracle_hyp.txt"), data_path("oracle_ref.txt")},
                      out, err);

  BleuStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    total += sentence_stats(hyps[i], {refs[i]});
  }
  double got = corpus_bleu(total);
  double elapsed = seconds_since(start);

  bool pass = code == 0 && hyps.size() == 20 && std::abs(got - expected) <= 0.01 &&
              elapsed < 1.0 &&
              out.str().find("BLEU = " + fmt(expected, 2)) != std::string::npos;
  report(1, "BLEU oracle parity on the 20-sentence corpus", pass,
         "|delta| = " + fmt(std::abs(got - expected)) + " <= 0.01, " +
             fmt(elapsed, 2) + "s < 1s");
}

// ---------------------------------------------------------------- criterion 2

void criterion_2_identities() {
  std::vector<EvalItem> identity(
      8, EvalItem{"src", {"the quick brown fox jumps over the lazy dog"},
                  "the quick brown fox jumps over the lazy dog"});
  BleuStats stats;
  for (const auto& item : identity) {
    stats += sentence_stats(item.hypothesis, item.references);
  }
  double perfect = corpus_bleu(stats);

  BleuStats no4;
  for (int i = 0; i < 5; ++i) {
    no4 += sentence_stats("the cat sat on", {"the dog sat on"});
  }
  double zero = corpus_bleu(no4);

  bool pass = perfect == 100.0 && zero == 0.0;
  report(2, "BLEU identities (hyp=ref -> 100.00, zero 4-gram -> 0.00)", pass,
         "got " + fmt(perfect, 2) + " and " + fmt(zero, 2));
}

// ---------------------------------------------------------------- criterion 3

std::vector<BleuStats> random_record_stats(std::mt19937& rng) {
  static const char* words[] = {"the", "cat", "sat", "on", "mat", "dog",
                                "ran", "fast", "blue", "sky", "old", "tree"};
  std::uniform_int_distribution<int> len(1, 9);
  std::uniform_int_distribution<int> word(0, 11);
  auto sentence = [&] {
    std::string s;
    int k = len(rng);
    for (int w = 0; w < k; ++w) {
      if (w) s += ' ';
      s += words[word(rng)];
    }
    return s;
  };
  std::vector<BleuStats> stats;
  int n = 2 + static_cast<int>(rng() % 7);
  for (int i = 0; i < n; ++i) {
    std::string ref = sentence();
    std::string hyp = (rng() % 3 == 0) ? ref : sentence();
    stats.push_back(sentence_stats(hyp, {ref}));
  }
  return stats;
}

void criterion_3_permutation_partition() {
  std::mt19937 rng(20260809);
  int checked = 0;
  bool pass = true;
  for (int iter = 0; iter < 200 && pass; ++iter) {
    auto per_record = random_record_stats(rng);
    BleuStats in_order;
    for (const auto& s : per_record) in_order += s;
    if (in_order.hyp_len == 0) continue;
    double base = corpus_bleu(in_order);

    std::vector<std::size_t> perm(per_record.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    BleuStats shuffled;
    for (auto idx : perm) shuffled += per_record[idx];

    std::size_t cut = rng() % (per_record.size() + 1);
    BleuStats left, right;
    for (std::size_t i = 0; i < per_record.size(); ++i) {
      (i < cut ? left : right) += per_record[i];
    }
    left += right;

    pass = corpus_bleu(shuffled) == base && corpus_bleu(left) == base;
    ++checked;
  }
  report(3, "permutation/partition invariance over random corpora", pass,
         std::to_string(checked) + " corpora, exact equality");
}

// ---------------------------------------------------------------- criterion 4

struct PeakOracle {
  bool fires = false;
  std::size_t inject_idx = 0;
};

PeakOracle peak_oracle(const std::vector<double>& series, std::size_t patience,
                       std::size_t min_tokens) {
  for (std::size_t t = min_tokens; t < series.size(); ++t) {
    std::size_t arg = min_tokens;
    for (std::size_t i = min_tokens; i <= t; ++i) {
      if (series[i] > series[arg]) arg = i;
    }
    if (t - arg >= patience) return {true, arg};
  }
  return {};
}

void criterion_4_injection_peak() {
  auto start = Clock::now();
  const double grid[] = {-0.5, -1.0, -1.5, -2.0, -2.5};
  const std::uint32_t patience = 2;
  const std::uint32_t min_tokens = 1;

  PromptTemplate t = parse_template(
      "B {{gen:h anchor=next max_tokens=64 min_tokens=1 patience=2}} A.");
  InjectionPolicy policy;
  policy.patience = patience;
  policy.min_tokens = min_tokens;

  std::vector<std::string> token_text;
  std::vector<std::string> prefixes;  // document after k+1 tokens
  for (int k = 0; k < 8; ++k) {
    token_text.push_back(std::string(1, static_cast<char>('a' + k)) + " ");
    prefixes.push_back((k ? prefixes[k - 1] : std::string("B ")) + token_text[k]);
  }

  long long total_cases = 0, fired_cases = 0, wrong = 0;
  std::vector<double> series;
  // enumerate every series of length 1..8 over the 5-value grid
  std::function<void(std::size_t)> recurse = [&](std::size_t depth) {
    if (!series.empty()) {
      ++total_cases;
      ScriptedModel model;
      std::vector<Token> response;
      for (std::size_t k = 0; k < series.size(); ++k) {
        response.push_back({token_text[k], -1.0});
      }
      model.add_entry("B ", response);
      for (std::size_t k = 0; k < series.size(); ++k) {
        model.add_score(prefixes[k], " A.", series[k]);
      }

      Transcript tr = execute(t, {}, model, GenParams{}, policy);
      const Span* injected = nullptr;
      for (const auto& s : tr.spans) {
        if (s.kind == SpanKind::injected_anchor) injected = &s;
      }

      PeakOracle expect = peak_oracle(series, patience, min_tokens);
      if (expect.fires) {
        ++fired_cases;
        std::string kept;
        for (std::size_t k = 0; k <= expect.inject_idx; ++k) kept += token_text[k];
        if (injected == nullptr || tr.spans[1].text != kept) ++wrong;
      } else if (injected != nullptr) {
        ++wrong;
      }
    }
    if (depth == 8) return;
    for (double v : grid) {
      series.push_back(v);
      recurse(depth + 1);
      series.pop_back();
    }
  };
  recurse(0);

  double elapsed = seconds_since(start);
  bool pass = wrong == 0 && total_cases == 488280 && elapsed < 10.0;
  report(4, "injection index equals brute-force argmax (exhaustive)", pass,
         std::to_string(total_cases) + " series, " + std::to_string(fired_cases) +
             " fired, " + std::to_string(wrong) + " mismatches, " + fmt(elapsed, 2) +
             "s < 10s");
}

// ---------------------------------------------------------------- criterion 5

// Model wrapper that checks the autoregressive contract from the model's
// side as calls arrive, and records prompts for the chain check.
class ContractRecorder : public LanguageModel {
 public:
  ContractRecorder(const LanguageModel& inner, std::vector<std::string> anchors)
      : inner_(inner), anchors_(std::move(anchors)) {}

  std::string id() const override { return inner_.id(); }

  Completion generate(const std::string& prompt, const GenParams& params) const override {
    prompts.push_back(prompt);
    Completion c = inner_.generate(prompt, params);
    last_prompt_ = prompt;
    last_token_ = c.tokens.empty() ? "" : c.tokens.front().text;
    return c;
  }

  double score_continuation(const std::string& context,
                            const std::string& fragment) const override {
    // scores are always requested for the freshly extended document
    if (context != last_prompt_ + last_token_) ++violations;
    if (std::find(anchors_.begin(), anchors_.end(), fragment) == anchors_.end()) {
      ++violations;
    }
    return inner_.score_continuation(context, fragment);
  }

  mutable std::vector<std::string> prompts;
  mutable int violations = 0;

 private:
  const LanguageModel& inner_;
  std::vector<std::string> anchors_;
  mutable std::string last_prompt_;
  mutable std::string last_token_;
};

std::size_t common_prefix_len(const std::string& a, const std::string& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

// True when `next` is reachable from `prev` by rewinding generated text and
// appending one of the anchors at the rewind point.
bool rewind_consistent(const std::string& prev, const std::string& next,
                       const std::vector<std::string>& anchors) {
  std::size_t lcp = common_prefix_len(prev, next);
  for (const auto& anchor : anchors) {
    if (anchor.empty()) continue;
    for (std::size_t c = lcp + 1; c-- > 0;) {
      if (next.compare(c, anchor.size(), anchor) == 0) return true;
    }
  }
  return false;
}

void criterion_5_transcript_invariant() {
  auto start = Clock::now();
  std::mt19937 rng(5150);
  int violations = 0;
  int runs = 0;
  int anchored_runs = 0;

  for (int iter = 0; iter < 1000; ++iter) {
    // random template: literal [var] hole literal [hole literal]
    std::uniform_int_distribution<int> coin(0, 1);
    bool with_var = coin(rng) == 1;
    bool anchored1 = coin(rng) == 1;
    bool second_hole = coin(rng) == 1;
    bool anchored2 = coin(rng) == 1;
    int budget1 = 3 + static_cast<int>(rng() % 8);
    int budget2 = 3 + static_cast<int>(rng() % 8);

    std::string text = "French: Bonjour";
    if (with_var) text += "{{var:v}}";
    text += "\nEnglish:";
    text += "{{gen:h1" + std::string(anchored1 ? " anchor=next" : "") +
            " max_tokens=" + std::to_string(budget1) + "}}";
    text += " et puis";
    if (second_hole) {
      text += "{{gen:h2" + std::string(anchored2 ? " anchor=next" : "") +
              " max_tokens=" + std::to_string(budget2) + "}}";
      text += " la fin.";
    }

    PromptTemplate t = parse_template(text);
    std::vector<std::string> anchors;
    for (std::size_t i = 0; i < t.segments.size(); ++i) {
      if (t.segments[i].kind == Segment::Kind::hole &&
          t.segments[i].hole.anchor_mode == AnchorMode::next_literal) {
        anchors.push_back(t.segments[i + 1].text);
      }
    }
    bool has_anchor = !anchors.empty();
    if (has_anchor) ++anchored_runs;

    NgramModel model(static_cast<std::uint64_t>(iter));
    ContractRecorder recorder(model, anchors);

    GenParams params;
    params.temperature = 0.7;
    params.top_p = 0.95;
    params.logprobs = true;
    InjectionPolicy policy;
    policy.patience = 1 + static_cast<std::uint32_t>(rng() % 3);
    policy.min_tokens = static_cast<std::uint32_t>(rng() % 2);
    policy.hard_budget = 24;

    std::map<std::string, std::string> bindings;
    if (with_var) bindings["v"] = " encore";

    Transcript tr = execute(t, bindings, recorder, params, policy);
    ++runs;

    // (a) the documented text is exactly the span concatenation
    std::string concat;
    for (const auto& s : tr.spans) concat += s.text;
    if (concat != tr.text()) ++violations;

    // (b) prompts grow monotonically; a non-extension must be a rewind
    // explained by an anchor injection
    for (std::size_t k = 0; k + 1 < recorder.prompts.size(); ++k) {
      const std::string& a = recorder.prompts[k];
      const std::string& b = recorder.prompts[k + 1];
      if (b.size() >= a.size() && b.compare(0, a.size(), a) == 0) continue;
      if (has_anchor && rewind_consistent(a, b, anchors)) continue;
      ++violations;
    }

    // (c) every prompt reconciles with the final document the same way
    for (const auto& p : recorder.prompts) {
      bool is_prefix = tr.text().compare(0, p.size(), p) == 0 && p.size() <= tr.text().size();
      if (is_prefix) continue;
      if (has_anchor && rewind_consistent(p, tr.text(), anchors)) continue;
      ++violations;
    }

    violations += recorder.violations;
  }

  double elapsed = seconds_since(start);
  bool pass = violations == 0 && runs == 1000;
  report(5, "transcript/prefix invariants over fuzzed executions", pass,
         std::to_string(runs) + " runs (" + std::to_string(anchored_runs) +
             " anchored), " + std::to_string(violations) + " violations, " +
             fmt(elapsed, 2) + "s");
}

// ---------------------------------------------------------------- criterion 6

void criterion_6_prompt_fidelity() {
  std::vector<ExamplePair> pool;
  for (int i = 0; i < 10; ++i) {
    pool.push_back({"source " + std::to_string(i), "target " + std::to_string(i)});
  }

  bool pass = true;
  for (std::uint32_t k = 0; k <= 10 && pass; ++k) {
    FormatSpec spec;
    spec.shots = k;
    std::string prompt = build_prompt(spec, pool, "query");
    std::size_t count = 0, pos = 0;
    while ((pos = prompt.find("French:", pos)) != std::string::npos) {
      ++count;
      pos += 7;
    }
    pass = count == k + 1 && prompt.size() >= 8 &&
           prompt.compare(prompt.size() - 8, 8, "English:") == 0;
  }

  FormatSpec master;
  master.name = FormatName::master_translator;
  pass = pass && build_prompt(master, {}, "Bonjour") ==
                     "A French phrase is provided: Bonjour\n"
                     "The masterful French translator flawlessly translates the "
                     "phrase into English:";

  FormatSpec naive;
  naive.name = FormatName::naive_translate;
  std::string naive_src =
      "Mon corps est un transformateur de soi, mais aussi un transformateur "
      "pour cette cire de langage.";
  pass = pass && build_prompt(naive, {}, naive_src) ==
                     "Translate French to English:\n" + naive_src;

  report(6, "prompt-format fidelity (shots, suffixes, fixture texts)", pass, "");
}

// ---------------------------------------------------------------- criterion 7

void criterion_7_failure_detector() {
  auto lines = read_lines(data_path("failure_cases.tsv"));
  int correct = 0;
  for (const auto& line : lines) {
    auto tab1 = line.find('\t');
    auto tab2 = line.find('\t', tab1 + 1);
    std::string label = line.substr(0, tab1);
    std::string source = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string hyp = line.substr(tab2 + 1);
    auto f = detect_failure(source, hyp);
    std::string got = f ? to_string(f->kind) : "none";
    if (got == label) ++correct;
  }
  bool pass = lines.size() == 30 && correct == 30;
  report(7, "failure detector accuracy on the 30-case fixture", pass,
         std::to_string(correct) + "/30 at default thresholds");
}

// ---------------------------------------------------------------- criterion 8

void criterion_8_report_consistency() {
  std::mt19937 rng(808);
  static const char* words[] = {"the", "cat", "sat", "on", "mat", "dog", "ran"};
  std::uniform_int_distribution<int> len(4, 9);
  std::uniform_int_distribution<int> word(0, 6);

  bool pass = true;
  for (int iter = 0; iter < 100 && pass; ++iter) {
    std::vector<EvalItem> items;
    int n = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      auto sentence = [&] {
        std::string s;
        int k = len(rng);
        for (int w = 0; w < k; ++w) {
          if (w) s += ' ';
          s += words[word(rng)];
        }
        return s;
      };
      EvalItem item;
      item.source = "source";
      item.references = {sentence()};
      item.hypothesis = (rng() % 3 == 0) ? "____ ____" : sentence();
      items.push_back(std::move(item));
    }

    auto [records, rep] = evaluate_corpus(items);
    BleuStats clean;
    std::size_t n_clean = 0;
    for (const auto& rec : records) {
      if (!rec.failure) {
        clean += sentence_stats(rec.hypothesis, rec.references);
        ++n_clean;
      }
    }
    if (n_clean == 0) {
      pass = !rep.bleu_clean.has_value();
    } else {
      pass = rep.bleu_clean.has_value() && *rep.bleu_clean == corpus_bleu(clean);
    }
  }

  std::vector<EvalItem> all_flagged(4, EvalItem{"s", {"the cat sat on a mat"}, "____"});
  auto [records, rep] = evaluate_corpus(all_flagged);
  pass = pass && !rep.bleu_clean.has_value() && rep.failure_rate == 1.0;

  report(8, "bleu_clean equals an independent clean-subset recomputation", pass,
         "100 random corpora + all-flagged corpus");
}

// ---------------------------------------------------------------- criterion 9

void criterion_9_end_to_end_offline() {
  auto dir = fs::temp_directory_path() /
             ("promptrt_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::string tsv;
  for (int i = 0; i < 100; ++i) {
    tsv += "La phrase numéro " + std::to_string(i) + " est ici.\t";
    tsv += "Sentence number " + std::to_string(i) + " is right here.\n";
  }
  auto dataset = dir / "dataset.tsv";
  {
    std::ofstream f(dataset, std::ios::binary);
    f << tsv;
  }

  setenv("PROMPTRT_API_BASE", "http://127.0.0.1:1", 1);
  auto start = Clock::now();
  std::ostringstream out, err;
  int code = cli::run({"translate-eval", "--dataset", dataset.string(), "--model",
                       "echo", "--out", (dir / "runs").string()},
                      out, err);
  double elapsed = seconds_since(start);
  unsetenv("PROMPTRT_API_BASE");

  bool pass = code == 0 && elapsed < 5.0 &&
              out.str().find("BLEU(all): 100.00") != std::string::npos;
  report(9, "offline translate-eval on a 100-line TSV with the echo mock", pass,
         "exit " + std::to_string(code) + ", " + fmt(elapsed, 2) + "s < 5s");
}

}  // namespace

int main() {
  criterion_1_oracle_parity();
  criterion_2_identities();
  criterion_3_permutation_partition();
  criterion_4_injection_peak();
  criterion_5_transcript_invariant();
  criterion_6_prompt_fidelity();
  criterion_7_failure_detector();
  criterion_8_report_consistency();
  criterion_9_end_to_end_offline();

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
