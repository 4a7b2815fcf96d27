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

#include "promptrt/template_dsl.hpp"

namespace promptrt {

namespace {

// Built-in templates. Line-end whitespace is stripped relative to the
// typeset originals; RenderOptions::trailing_space restores the trailing
// cue space where a caller wants it.

constexpr const char* kSimpleColon = "French: {{var:src}}\nEnglish:";

constexpr const char* kMasterTranslator =
    "A French phrase is provided: {{var:src}}\n"
    "The masterful French translator flawlessly translates the phrase into "
    "English:";

constexpr const char* kNaiveTranslate = "Translate French to English:\n{{var:src}}";

constexpr const char* kSplitSteps =
    "{{var:q}}\n"
    "Let's solve this problem by splitting it into steps.\n"
    "{{gen:solution max_tokens=256}}";

// The stretches between prompt fragments are generated; each stretch is a
// hole anchored on the fragment that follows it, so injection timing is
// decided by the anchor's counterfactual likelihood rather than scripted
// lengths.
constexpr const char* kAnalyzeOptions =
    "{{var:q}}\n"
    "\n"
    "In order to solve this problem, we will analyze each of the options "
    "and determine {{gen:criterion anchor=next max_tokens=48}} Let's begin.\n"
    "{{gen:analysis max_tokens=256}}";

constexpr const char* kExpertGenerator =
    "\"{{var:question}}\"\n"
    "I entered my question into the Expert Generator and waited. "
    "The Expert Generator will render a simulation of an expert to answer "
    "my question. The expert could be anyone, dead or alive, real or "
    "fictional; the machine will find the person most qualified to answer "
    "the question. For this question in particular, the expert must be "
    "someone who has thought a lot about the problem of artificial "
    "intelligence and its alignment. The Expert Generator beeped, "
    "indicating that it has found the most qualified expert. The name "
    "displayed on the screen: \"{{gen:expert_reveal anchor=next max_tokens=192}}\n"
    "I am ready to ask my question.\n"
    "\"{{gen:expert_name anchor=next max_tokens=16}},\" I say,\n"
    "\"{{var:question}}\"\n"
    "{{gen:answer max_tokens=256}}";

}  // namespace

const std::map<std::string, std::string>& catalog_sources() {
  static const std::map<std::string, std::string> sources = {
      {"simple_colon", kSimpleColon},
      {"master_translator", kMasterTranslator},
      {"naive_translate", kNaiveTranslate},
      {"split_steps", kSplitSteps},
      {"analyze_options", kAnalyzeOptions},
      {"expert_generator", kExpertGenerator},
  };
  return sources;
}

const std::map<std::string, PromptTemplate>& catalog() {
  static const std::map<std::string, PromptTemplate> templates = [] {
    std::map<std::string, PromptTemplate> out;
    for (const auto& [name, text] : catalog_sources()) {
      out.emplace(name, parse_template(text));
    }
    return out;
  }();
  return templates;
}

}  // namespace promptrt
