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

#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "promptrt/completion_cache.hpp"
#include "promptrt/digest.hpp"
#include "promptrt/endpoint_model.hpp"
#include "promptrt/executor.hpp"
#include "promptrt/mt_eval.hpp"
#include "promptrt/ngram_model.hpp"
#include "promptrt/prompt_formats.hpp"
#include "promptrt/run_log.hpp"
#include "promptrt/scripted_model.hpp"
#include "promptrt/template_dsl.hpp"

namespace promptrt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<std::string> read_lines_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// stop sequences arrive from flags with printable escapes
std::string unescape_stop(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char e = s[i + 1];
      if (e == 'n') {
        out.push_back('\n');
        ++i;
        continue;
      }
      if (e == 't') {
        out.push_back('\t');
        ++i;
        continue;
      }
      if (e == '\\') {
        out.push_back('\\');
        ++i;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

struct ModelChoice {
  std::shared_ptr<const LanguageModel> model;
  bool is_endpoint = false;
};

// "echo" needs the dataset to script itself; prompts/refs are paired.
ModelChoice make_model(const std::string& spec, const std::string& endpoint_base,
                       const std::vector<std::pair<std::string, std::string>>& echo_pairs) {
  if (spec == "echo" || spec.rfind("echo:", 0) == 0) {
    auto scripted = std::make_shared<ScriptedModel>("mock:echo");
    for (const auto& [prompt, reply] : echo_pairs) {
      scripted->add_entry(prompt, {{" " + reply, -0.5}, {"\n", -0.1}});
    }
    return {scripted, false};
  }
  if (spec == "ngram" || spec.rfind("ngram:", 0) == 0) {
    std::uint64_t seed = 0;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
      seed = std::stoull(spec.substr(colon + 1));
    }
    return {std::make_shared<NgramModel>(seed), false};
  }
  if (spec.rfind("script:", 0) == 0) {
    std::string path = spec.substr(7);
    auto scripted = std::make_shared<ScriptedModel>(
        ScriptedModel::from_json(read_file_or_throw(path)));
    return {scripted, false};
  }
  if (spec.rfind("endpoint:", 0) == 0) {
    EndpointConfig cfg;
    cfg.model_id = spec.substr(9);
    cfg.base_url = endpoint_base;  // empty -> $PROMPTRT_API_BASE
    return {std::make_shared<EndpointModel>(std::move(cfg)), true};
  }
  throw Error("unknown model spec '" + spec +
              "' (expected echo, ngram[:seed], script:FILE, endpoint:MODEL)");
}

std::shared_ptr<const LanguageModel> maybe_cached(ModelChoice choice,
                                                  const std::string& cache_dir) {
  if (cache_dir.empty()) return choice.model;
  return std::make_shared<CachingModel>(choice.model, CompletionCache(cache_dir));
}

Smoothing smoothing_from_flags(const std::string& name, double k) {
  if (name == "none") return Smoothing::none();
  if (name == "add-k" || name == "add_k") return Smoothing::add_k(k);
  throw Error("unknown smoothing '" + name + "'");
}

std::string shots_label(const FormatSpec& spec) {
  std::string pretty = to_string(spec.name);
  for (auto& c : pretty) {
    if (c == '_') c = ' ';
  }
  pretty[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(pretty[0])));
  return pretty + " " + std::to_string(spec.shots) + "-shot";
}

int cmd_score(const std::string& hyp_path, const std::string& ref_path,
              const std::string& source_path, const Smoothing& smoothing,
              std::ostream& out, std::ostream& err) {
  std::vector<std::string> hyps, refs, sources;
  try {
    hyps = read_lines_or_throw(hyp_path);
    refs = read_lines_or_throw(ref_path);
    if (!source_path.empty()) sources = read_lines_or_throw(source_path);
  } catch (const Error& e) {
    err << "score: " << e.what() << "\n";
    return 2;
  }
  if (hyps.size() != refs.size()) {
    err << "score: line count mismatch: " << hyp_path << " has " << hyps.size()
        << " lines, " << ref_path << " has " << refs.size()
        << " lines; first unmatched line is "
        << (std::min(hyps.size(), refs.size()) + 1) << "\n";
    return 2;
  }
  if (!sources.empty() && sources.size() != hyps.size()) {
    err << "score: line count mismatch: " << source_path << " has "
        << sources.size() << " lines, " << hyp_path << " has " << hyps.size()
        << " lines; first unmatched line is "
        << (std::min(sources.size(), hyps.size()) + 1) << "\n";
    return 2;
  }
  if (hyps.empty()) {
    err << "score: empty corpus\n";
    return 2;
  }

  if (sources.empty()) {
    BleuStats total;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      total += sentence_stats(hyps[i], {refs[i]});
    }
    out << "BLEU = " << fmt2(corpus_bleu(total, smoothing)) << "\n";
    return 0;
  }

  std::vector<EvalItem> items;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    items.push_back({sources[i], {refs[i]}, hyps[i]});
  }
  auto [records, report] = evaluate_corpus(items, smoothing);
  out << "BLEU = " << fmt2(report.bleu_all) << "\n";
  std::size_t failed = static_cast<std::size_t>(report.failure_rate * items.size() + 0.5);
  if (report.bleu_clean) {
    out << "BLEU (clean) = " << fmt2(*report.bleu_clean) << "  [" << failed
        << "/" << items.size() << " catastrophic failures removed]\n";
  } else {
    out << "BLEU (clean) = undefined  [all " << items.size()
        << " records are catastrophic failures]\n";
  }
  return 0;
}

struct TranslateEvalOptions {
  std::string dataset;
  std::string dataset_src;  // parallel-file alternative to the TSV
  std::string dataset_ref;
  std::string pool_path;
  std::string format = "simple_colon";
  std::uint32_t shots = 0;
  std::string selection = "first_k";
  std::uint64_t seed = 0;
  std::string model = "ngram:0";
  std::string endpoint_base;
  std::string cache_dir;
  std::string out_dir = "runs";
  std::uint32_t max_tokens = 64;
  double temperature = 0.0;
  double top_p = 1.0;
  std::uint32_t workers = 4;
  std::vector<std::string> stop;
  bool keep_newlines = false;
  bool trailing_space = false;
  std::string smoothing = "none";
  double smooth_k = 1.0;
};

// Fills option defaults from a JSON config file; values given as flags
// override these because the config pass runs before argument parsing.
void apply_te_config(TranslateEvalOptions& o, const std::string& path) {
  auto j = nlohmann::json::parse(read_file_or_throw(path));
  auto get_str = [&](const char* key, std::string& slot) {
    if (j.contains(key)) slot = j[key].get<std::string>();
  };
  get_str("dataset", o.dataset);
  get_str("dataset-src", o.dataset_src);
  get_str("dataset-ref", o.dataset_ref);
  get_str("pool", o.pool_path);
  get_str("format", o.format);
  get_str("selection", o.selection);
  get_str("model", o.model);
  get_str("endpoint-base", o.endpoint_base);
  get_str("cache", o.cache_dir);
  get_str("out", o.out_dir);
  get_str("smoothing", o.smoothing);
  if (j.contains("shots")) o.shots = j["shots"].get<std::uint32_t>();
  if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("max-tokens")) o.max_tokens = j["max-tokens"].get<std::uint32_t>();
  if (j.contains("temperature")) o.temperature = j["temperature"].get<double>();
  if (j.contains("top-p")) o.top_p = j["top-p"].get<double>();
  if (j.contains("workers")) o.workers = j["workers"].get<std::uint32_t>();
  if (j.contains("keep-newlines")) o.keep_newlines = j["keep-newlines"].get<bool>();
  if (j.contains("trailing-space")) o.trailing_space = j["trailing-space"].get<bool>();
  if (j.contains("smooth-k")) o.smooth_k = j["smooth-k"].get<double>();
  if (j.contains("stop")) o.stop = j["stop"].get<std::vector<std::string>>();
}

// Canonical description of the experiment. Storage locations (run log and
// cache directories) stay out of it so the digest identifies what was run,
// not where its artifacts landed.
ordered_json translate_eval_config_json(const TranslateEvalOptions& o) {
  ordered_json j;
  j["command"] = "translate-eval";
  j["dataset"] = o.dataset;
  j["dataset_src"] = o.dataset_src;
  j["dataset_ref"] = o.dataset_ref;
  j["pool"] = o.pool_path;
  j["format"] = o.format;
  j["shots"] = o.shots;
  j["selection"] = o.selection;
  j["seed"] = o.seed;
  j["model"] = o.model;
  j["endpoint_base"] = o.endpoint_base;
  GenParams params;
  params.temperature = o.temperature;
  params.top_p = o.top_p;
  params.max_tokens = o.max_tokens;
  for (const auto& s : o.stop) params.stop.push_back(unescape_stop(s));
  j["gen_params"] = canonical_params(params);
  j["workers"] = o.workers;
  j["keep_newlines"] = o.keep_newlines;
  j["trailing_space"] = o.trailing_space;
  j["smoothing"] = o.smoothing;
  j["smooth_k"] = o.smooth_k;
  return j;
}

int cmd_translate_eval(const TranslateEvalOptions& o, std::ostream& out,
                       std::ostream& err) {
  const bool parallel = !o.dataset_src.empty() || !o.dataset_ref.empty();
  if (o.dataset.empty() && !parallel) {
    err << "translate-eval: --dataset (TSV) or --dataset-src/--dataset-ref "
           "is required (flag or config file)\n";
    return 2;
  }
  if (!o.dataset.empty() && parallel) {
    err << "translate-eval: give either --dataset or the parallel-file pair, "
           "not both\n";
    return 2;
  }
  std::vector<ExamplePair> dataset;
  try {
    if (parallel) {
      if (o.dataset_src.empty() || o.dataset_ref.empty()) {
        err << "translate-eval: --dataset-src and --dataset-ref go together\n";
        return 2;
      }
      auto src_lines = read_lines_or_throw(o.dataset_src);
      auto ref_lines = read_lines_or_throw(o.dataset_ref);
      if (src_lines.size() != ref_lines.size()) {
        err << "translate-eval: line count mismatch: " << o.dataset_src
            << " has " << src_lines.size() << " lines, " << o.dataset_ref
            << " has " << ref_lines.size() << " lines\n";
        return 2;
      }
      for (std::size_t i = 0; i < src_lines.size(); ++i) {
        ExamplePair pair{src_lines[i], ref_lines[i]};
        pair.validate();
        dataset.push_back(std::move(pair));
      }
    } else {
      dataset = load_pool_tsv(o.dataset);
    }
  } catch (const Error& e) {
    err << "translate-eval: " << e.what() << "\n";
    return 2;
  }
  if (dataset.empty()) {
    err << "translate-eval: dataset is empty\n";
    return 2;
  }

  std::optional<std::vector<ExamplePair>> shared_pool;
  if (!o.pool_path.empty()) {
    try {
      shared_pool = load_pool_tsv(o.pool_path);
    } catch (const Error& e) {
      err << "translate-eval: " << e.what() << "\n";
      return 2;
    }
  }

  auto format_name = format_name_from_string(o.format);
  if (!format_name) {
    err << "translate-eval: unknown format '" << o.format << "'\n";
    return 2;
  }

  GenParams params;
  params.temperature = o.temperature;
  params.top_p = o.top_p;
  params.max_tokens = o.max_tokens;
  for (const auto& s : o.stop) params.stop.push_back(unescape_stop(s));
  params.validate();

  // Build every prompt up front; the echo mock is scripted from these
  // exact prompts. Examples come from --pool, or from the dataset itself
  // with the query item excluded (per-item seed = seed + index).
  std::vector<std::string> prompts(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    FormatSpec spec;
    spec.name = *format_name;
    spec.shots = o.shots;
    std::vector<ExamplePair> pool;
    if (shared_pool) {
      pool = *shared_pool;
    } else {
      pool.reserve(dataset.size() - 1);
      for (std::size_t k = 0; k < dataset.size(); ++k) {
        if (k != i) pool.push_back(dataset[k]);
      }
    }
    if (o.selection == "first_k") {
      spec.selection = FirstK{};
    } else if (o.selection == "random") {
      spec.selection = SeededRandom{o.seed + i};
    } else {
      err << "translate-eval: unknown selection '" << o.selection << "'\n";
      return 2;
    }
    RenderOptions ropts;
    ropts.trailing_space = o.trailing_space;
    prompts[i] = build_prompt(spec, pool, dataset[i].source, ropts);
  }

  std::vector<std::pair<std::string, std::string>> echo_pairs;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    echo_pairs.emplace_back(prompts[i], dataset[i].target);
  }

  // all paths are resolved and validated before the first model call
  std::string digest = sha256_hex(translate_eval_config_json(o).dump());
  std::unique_ptr<RunLog> log;
  std::shared_ptr<const LanguageModel> model;
  try {
    if (!o.out_dir.empty()) {
      log = std::make_unique<RunLog>(fs::path(o.out_dir) / run_log_filename(digest),
                                     digest);
    }
    model = maybe_cached(make_model(o.model, o.endpoint_base, echo_pairs), o.cache_dir);
  } catch (const Error& e) {
    err << "translate-eval: " << e.what() << "\n";
    return 2;
  }

  struct ItemResult {
    bool ok = false;
    std::string hypothesis;
    std::string error;
  };
  std::vector<ItemResult> results(dataset.size());
  std::atomic<std::size_t> next{0};

  auto truncate_and_trim = [&](std::string text) {
    if (!o.keep_newlines) {
      if (auto nl = text.find('\n'); nl != std::string::npos) text.resize(nl);
    }
    std::size_t begin = text.find_first_not_of(" \t");
    std::size_t end = text.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return std::string();
    return text.substr(begin, end - begin + 1);
  };

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= dataset.size()) break;
      try {
        Completion c = model->generate(prompts[i], params);
        results[i].hypothesis = truncate_and_trim(c.text());
        results[i].ok = true;
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> threads;
  std::size_t n_workers = std::max<std::size_t>(1, std::min<std::size_t>(o.workers, dataset.size()));
  for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  std::vector<EvalItem> items;
  std::vector<std::size_t> item_index;
  std::size_t n_errors = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!results[i].ok) {
      ++n_errors;
      continue;
    }
    items.push_back({dataset[i].source, {dataset[i].target}, results[i].hypothesis});
    item_index.push_back(i);
  }

  if (log) {
    ordered_json cfg_entry;
    cfg_entry["config"] = translate_eval_config_json(o);
    log->append("config", cfg_entry.dump());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (!results[i].ok) {
        ordered_json e;
        e["index"] = i;
        e["error"] = results[i].error;
        log->append("item_error", e.dump());
      }
    }
  }

  if (items.empty()) {
    err << "translate-eval: every item failed (" << n_errors << " errors)\n";
    return 1;
  }

  auto [records, report] =
      evaluate_corpus(items, smoothing_from_flags(o.smoothing, o.smooth_k));

  if (log) {
    for (std::size_t k = 0; k < records.size(); ++k) {
      log->append("eval_record", eval_record_to_json(records[k]));
    }
    log->append("report", report_to_json(report));
  }

  FormatSpec label_spec;
  label_spec.name = *format_name;
  label_spec.shots = o.shots;
  std::map<std::string, Report> cells = {{model->id(), report}};
  out << render_report_table({model->id()}, {{shots_label(label_spec), cells}});
  out << "records: " << report.n_records << "  failure rate: "
      << fmt2(report.failure_rate * 100.0) << "%  BLEU(all): " << fmt2(report.bleu_all)
      << "  BLEU(clean): "
      << (report.bleu_clean ? fmt2(*report.bleu_clean) : std::string("undefined"))
      << "\n";
  if (n_errors > 0) {
    err << "translate-eval: " << n_errors << "/" << dataset.size()
        << " items errored\n";
  }
  if (log) out << "run log: " << log->path().string() << "\n";

  if (n_errors * 10 > dataset.size()) return 1;
  return 0;
}

struct RunCmdOptions {
  std::string template_arg;
  std::vector<std::string> bindings;
  std::string model = "ngram:0";
  std::string endpoint_base;
  std::string cache_dir;
  std::string out_dir = "runs";
  std::string schema;
  bool strict = false;
  std::uint32_t max_tokens = 64;
  double temperature = 0.0;
  double top_p = 1.0;
  std::uint32_t patience = 5;
  std::uint32_t min_tokens = 1;
  std::uint32_t hard_budget = 256;
  std::vector<std::string> stop;
};

std::optional<VerdictSchema> parse_schema(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "int" || s == "integer") return VerdictSchema{IntegerAnswer{}};
  if (s == "free" || s == "free_text") return VerdictSchema{FreeText{}};
  if (s.rfind("mc:", 0) == 0 && s.size() == 6 && s[4] == '-') {
    return VerdictSchema{MultipleChoice{s[3], s[5]}};
  }
  throw Error("unknown schema '" + s + "' (expected mc:A-E, int, or free)");
}

int cmd_run(const RunCmdOptions& o, std::ostream& out, std::ostream& err) {
  PromptTemplate t;
  try {
    const auto& builtin = catalog();
    if (auto it = builtin.find(o.template_arg); it != builtin.end()) {
      t = it->second;
    } else {
      t = parse_template(read_file_or_throw(o.template_arg));
    }
  } catch (const SyntaxError& e) {
    err << "run: " << o.template_arg << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "run: " << e.what() << "\n";
    return 2;
  }

  std::map<std::string, std::string> bindings;
  for (const auto& b : o.bindings) {
    auto eq = b.find('=');
    if (eq == std::string::npos) {
      err << "run: --bind expects NAME=VALUE, got '" << b << "'\n";
      return 2;
    }
    bindings[b.substr(0, eq)] = b.substr(eq + 1);
  }

  GenParams params;
  params.temperature = o.temperature;
  params.top_p = o.top_p;
  params.max_tokens = o.max_tokens;
  for (const auto& s : o.stop) params.stop.push_back(unescape_stop(s));
  params.logprobs = true;

  InjectionPolicy policy;
  policy.patience = o.patience;
  policy.min_tokens = o.min_tokens;
  policy.hard_budget = o.hard_budget;

  ordered_json cfg;
  cfg["command"] = "run";
  cfg["template"] = o.template_arg;
  cfg["model"] = o.model;
  cfg["gen_params"] = canonical_params(params);
  cfg["patience"] = policy.patience;
  cfg["min_tokens"] = policy.min_tokens;
  cfg["hard_budget"] = policy.hard_budget;
  cfg["bind"] = ordered_json::array();
  for (const auto& b : o.bindings) cfg["bind"].push_back(b);
  std::string digest = sha256_hex(cfg.dump());

  // validate storage and model wiring before anything is generated
  std::optional<VerdictSchema> schema;
  std::shared_ptr<const LanguageModel> model;
  std::unique_ptr<RunLog> log;
  try {
    schema = parse_schema(o.schema);
    model = maybe_cached(make_model(o.model, o.endpoint_base, {}), o.cache_dir);
    if (!o.out_dir.empty()) {
      log = std::make_unique<RunLog>(fs::path(o.out_dir) / run_log_filename(digest),
                                     digest);
    }
  } catch (const Error& e) {
    err << "run: " << e.what() << "\n";
    return 2;
  }

  Transcript tr;
  try {
    tr = execute(t, bindings, *model, params, policy);
  } catch (const MissingBinding& e) {
    err << "run: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "run: model error: " << e.what() << "\n";
    return 1;
  }

  if (schema) tr.verdict = extract_verdict(tr, *schema);

  for (const auto& span : tr.spans) {
    switch (span.kind) {
      case SpanKind::template_literal:
        out << "-- template --\n";
        break;
      case SpanKind::variable:
        out << "-- input --\n";
        break;
      case SpanKind::generated:
        out << "-- generated (" << span.hole_name.value_or("?") << ") --\n";
        break;
      case SpanKind::injected_anchor:
        out << "-- injected anchor (" << span.hole_name.value_or("?") << ") --\n";
        break;
    }
    out << span.text << "\n";
  }
  if (schema) {
    out << "verdict: " << tr.verdict.value_or("(none)") << "\n";
  }
  if (tr.derailed) out << "derailed: true\n";

  if (log) {
    log->append("transcript", transcript_to_json(tr));
    out << "run log: " << log->path().string() << "\n";
  }

  if (tr.derailed && o.strict) return 3;
  return 0;
}

int cmd_detect(const std::string& hyp_path, const std::string& source_path,
               bool as_json, std::ostream& out, std::ostream& err) {
  std::vector<std::string> hyps, sources;
  try {
    hyps = read_lines_or_throw(hyp_path);
    sources = read_lines_or_throw(source_path);
  } catch (const Error& e) {
    err << "detect: " << e.what() << "\n";
    return 2;
  }
  if (hyps.size() != sources.size()) {
    err << "detect: line count mismatch: " << hyp_path << " has " << hyps.size()
        << " lines, " << source_path << " has " << sources.size()
        << " lines; first unmatched line is "
        << (std::min(hyps.size(), sources.size()) + 1) << "\n";
    return 2;
  }

  std::map<FailureKind, std::size_t> counts;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    auto f = detect_failure(sources[i], hyps[i]);
    if (f) ++counts[f->kind];
    if (as_json) {
      ordered_json j;
      j["line"] = i + 1;
      if (f) {
        j["reason"] = to_string(f->kind);
        j["evidence"] = f->evidence;
        j["score"] = f->score;
      } else {
        j["reason"] = nullptr;
      }
      out << j.dump() << "\n";
    } else {
      out << (i + 1) << "\t" << (f ? to_string(f->kind) : "ok") << "\n";
    }
  }
  std::size_t failed = 0;
  for (const auto& [kind, n] : counts) failed += n;
  if (!as_json) {
    out << "failures: " << failed << "/" << hyps.size() << "\n";
  }
  return 0;
}

int cmd_catalog(const std::string& name, const std::string& export_dir,
                std::ostream& out, std::ostream& err) {
  const auto& sources = catalog_sources();
  if (!export_dir.empty()) {
    std::error_code ec;
    fs::create_directories(export_dir, ec);
    if (ec) {
      err << "catalog: cannot create " << export_dir << ": " << ec.message() << "\n";
      return 2;
    }
    for (const auto& [tmpl_name, text] : sources) {
      std::ofstream f(fs::path(export_dir) / (tmpl_name + ".pt"), std::ios::binary);
      f << text;
      if (!f) {
        err << "catalog: cannot write " << tmpl_name << ".pt\n";
        return 2;
      }
      out << "wrote " << (fs::path(export_dir) / (tmpl_name + ".pt")).string() << "\n";
    }
    return 0;
  }
  if (!name.empty()) {
    auto it = sources.find(name);
    if (it == sources.end()) {
      err << "catalog: no template named '" << name << "'\n";
      return 2;
    }
    out << it->second << "\n";
    return 0;
  }
  for (const auto& [tmpl_name, text] : sources) {
    PromptTemplate t = parse_template(text);
    out << tmpl_name << "  (" << t.var_names().size() << " vars, "
        << (t.has_holes() ? "fill-in-the-blank" : "plain") << ")\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"prompt-programming runtime and translation evaluation harness"};
  app.require_subcommand(1);
  app.footer(
      "exit codes: 0 success, 1 too many per-item errors, 2 input error,\n"
      "            3 derailment under --strict\n"
      "environment: PROMPTRT_API_KEY (bearer token), PROMPTRT_API_BASE "
      "(endpoint base URL)");

  // score
  std::string score_hyp, score_ref, score_source;
  std::string score_smoothing = "none";
  double score_k = 1.0;
  auto* score = app.add_subcommand("score", "corpus BLEU for a hypothesis file");
  score->add_option("hyp", score_hyp, "hypothesis file, one segment per line")->required();
  score->add_option("ref", score_ref, "reference file, one segment per line")->required();
  score->add_option("--source", score_source,
                    "source file; enables catastrophic-failure detection");
  score->add_option("--smoothing", score_smoothing, "none or add-k");
  score->add_option("--smooth-k", score_k, "k for add-k smoothing");

  // translate-eval; a config file fills defaults before flags are parsed
  TranslateEvalOptions te;
  std::string te_config;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") te_config = args[i + 1];
  }
  if (!te_config.empty()) {
    try {
      apply_te_config(te, te_config);
    } catch (const std::exception& e) {
      err << "config: " << e.what() << "\n";
      return 2;
    }
  }
  auto* teval = app.add_subcommand(
      "translate-eval", "build prompts for a TSV dataset, generate, and score");
  teval->add_option("--dataset", te.dataset, "TSV: source<TAB>reference");
  teval->add_option("--dataset-src", te.dataset_src,
                    "source side as a parallel text file (with --dataset-ref)");
  teval->add_option("--dataset-ref", te.dataset_ref,
                    "reference side as a parallel text file");
  teval->add_option("--pool", te.pool_path, "TSV example pool (default: dataset minus query)");
  teval->add_option("--format", te.format, "simple_colon|master_translator|naive_translate");
  teval->add_option("--shots", te.shots, "solved examples per prompt");
  teval->add_option("--selection", te.selection, "first_k|random");
  teval->add_option("--seed", te.seed, "selection seed");
  teval->add_option("--model", te.model, "echo | ngram[:seed] | script:FILE | endpoint:ID");
  teval->add_option("--endpoint-base", te.endpoint_base, "override $PROMPTRT_API_BASE");
  teval->add_option("--cache", te.cache_dir, "completion cache directory");
  teval->add_option("--out", te.out_dir, "run log directory ('' disables)");
  teval->add_option("--max-tokens", te.max_tokens, "generation budget per item");
  teval->add_option("--temperature", te.temperature, "sampling temperature");
  teval->add_option("--top-p", te.top_p, "nucleus mass");
  teval->add_option("--workers", te.workers, "parallel evaluation workers");
  teval->add_option("--stop", te.stop, "stop sequence (repeatable, max 4; \\n and \\t escapes)")
      ->take_all();
  teval->add_flag("--keep-newlines", te.keep_newlines,
                  "do not truncate hypotheses at the first newline");
  teval->add_flag("--trailing-space", te.trailing_space,
                  "emit the trailing cue space in prompts");
  teval->add_option("--smoothing", te.smoothing, "none or add-k");
  teval->add_option("--smooth-k", te.smooth_k, "k for add-k smoothing");
  teval->add_option("--config", te_config, "JSON config file (flags win)");

  // run
  RunCmdOptions rc;
  auto* runc = app.add_subcommand("run", "execute a template (catalog name or .pt file)");
  runc->add_option("template", rc.template_arg, "catalog name or template file")->required();
  runc->add_option("--bind", rc.bindings, "variable binding NAME=VALUE")->take_all();
  runc->add_option("--model", rc.model, "echo | ngram[:seed] | script:FILE | endpoint:ID");
  runc->add_option("--endpoint-base", rc.endpoint_base, "override $PROMPTRT_API_BASE");
  runc->add_option("--cache", rc.cache_dir, "completion cache directory");
  runc->add_option("--out", rc.out_dir, "run log directory ('' disables)");
  runc->add_option("--schema", rc.schema, "verdict schema: mc:A-E, int, free");
  runc->add_flag("--strict", rc.strict, "exit 3 when the run derails");
  runc->add_option("--max-tokens", rc.max_tokens, "per-call generation budget");
  runc->add_option("--temperature", rc.temperature, "sampling temperature");
  runc->add_option("--top-p", rc.top_p, "nucleus mass");
  runc->add_option("--patience", rc.patience, "peak-rule patience (policy default)");
  runc->add_option("--min-tokens", rc.min_tokens, "minimum tokens before injection");
  runc->add_option("--hard-budget", rc.hard_budget, "hard per-hole token guard");
  runc->add_option("--stop", rc.stop, "run-level stop sequence (repeatable, max 4)")
      ->take_all();

  // detect
  std::string det_hyp, det_source;
  bool det_json = false;
  auto* detect = app.add_subcommand("detect", "catastrophic-failure detection only");
  detect->add_option("--hyp", det_hyp, "hypothesis file")->required();
  detect->add_option("--source", det_source, "source file")->required();
  detect->add_flag("--json", det_json, "one JSON object per line");

  // catalog
  std::string cat_name, cat_export;
  auto* cat = app.add_subcommand("catalog", "list or export built-in templates");
  cat->add_option("name", cat_name, "print one template's source");
  cat->add_option("--export", cat_export, "write all templates as .pt files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*score) {
      return cmd_score(score_hyp, score_ref, score_source,
                       smoothing_from_flags(score_smoothing, score_k), out, err);
    }
    if (*teval) return cmd_translate_eval(te, out, err);
    if (*runc) return cmd_run(rc, out, err);
    if (*detect) return cmd_detect(det_hyp, det_source, det_json, out, err);
    if (*cat) return cmd_catalog(cat_name, cat_export, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace promptrt::cli
