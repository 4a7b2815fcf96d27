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

#include <benchmark/benchmark.h>

#include "promptrt/executor.hpp"
#include "promptrt/mt_eval.hpp"
#include "promptrt/ngram_model.hpp"
#include "promptrt/prompt_formats.hpp"
#include "promptrt/scripted_model.hpp"
#include "promptrt/template_dsl.hpp"

namespace {

using namespace promptrt;

const std::string kSentence =
    "The train leaves at 8:15 in the morning, and the old station-master "
    "waves; everyone on platform 2 waves back!";

void BM_Tokenize13a(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenize_13a(kSentence));
  }
}
BENCHMARK(BM_Tokenize13a);

void BM_SentenceStats(benchmark::State& state) {
  std::vector<std::string> refs = {
      "The train departs at 8:15 in the morning and the station-master waves."};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sentence_stats(kSentence, refs));
  }
}
BENCHMARK(BM_SentenceStats);

void BM_DetectFailure(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        detect_failure("Le train part à huit heures et quart.", kSentence));
  }
}
BENCHMARK(BM_DetectFailure);

void BM_EvaluateCorpus100(benchmark::State& state) {
  std::vector<EvalItem> items;
  for (int i = 0; i < 100; ++i) {
    items.push_back({"La phrase numéro " + std::to_string(i) + ".",
                     {"Sentence number " + std::to_string(i) + " is right here."},
                     "Sentence number " + std::to_string(i) + " is here."});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_corpus(items));
  }
}
BENCHMARK(BM_EvaluateCorpus100);

void BM_ParseTemplate(benchmark::State& state) {
  const std::string& source = catalog_sources().at("expert_generator");
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_template(source));
  }
}
BENCHMARK(BM_ParseTemplate);

void BM_BuildPrompt10Shot(benchmark::State& state) {
  std::vector<ExamplePair> pool;
  for (int i = 0; i < 64; ++i) {
    pool.push_back({"phrase " + std::to_string(i), "sentence " + std::to_string(i)});
  }
  FormatSpec spec;
  spec.shots = 10;
  spec.selection = SeededRandom{7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_prompt(spec, pool, "une phrase de test"));
  }
}
BENCHMARK(BM_BuildPrompt10Shot);

void BM_NgramGenerate64(benchmark::State& state) {
  NgramModel model(3);
  GenParams params;
  params.max_tokens = 64;
  params.temperature = 0.7;
  params.logprobs = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.generate("French: Bonjour\nEnglish:", params));
  }
}
BENCHMARK(BM_NgramGenerate64);

void BM_ExecuteAnchoredHole(benchmark::State& state) {
  ScriptedModel model;
  std::vector<Token> response;
  std::string doc = "Q ";
  std::vector<std::string> prefixes;
  for (int k = 0; k < 16; ++k) {
    std::string tok = "w" + std::to_string(k) + " ";
    response.push_back({tok, -1.0});
    doc += tok;
    prefixes.push_back(doc);
  }
  model.add_entry("Q ", response);
  for (int k = 0; k < 16; ++k) {
    model.add_score(prefixes[k], " Thus,", -8.0 + (k < 6 ? k : 6 - k));
  }
  PromptTemplate t = parse_template(
      "Q {{gen:h anchor=next max_tokens=32 min_tokens=1 patience=3}} Thus,");
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute(t, {}, model, GenParams{}));
  }
}
BENCHMARK(BM_ExecuteAnchoredHole);

}  // namespace

BENCHMARK_MAIN();
