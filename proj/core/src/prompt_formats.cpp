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

#include "promptrt/prompt_formats.hpp"

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace promptrt {

void ExamplePair::validate() const {
  if (source.empty() || target.empty()) {
    throw Error("example pair has an empty side");
  }
  if (source.find('\n') != std::string::npos ||
      target.find('\n') != std::string::npos) {
    throw Error("example pair contains an interior newline");
  }
}

const char* to_string(FormatName name) {
  switch (name) {
    case FormatName::simple_colon: return "simple_colon";
    case FormatName::master_translator: return "master_translator";
    case FormatName::naive_translate: return "naive_translate";
  }
  return "simple_colon";
}

std::optional<FormatName> format_name_from_string(const std::string& s) {
  if (s == "simple_colon") return FormatName::simple_colon;
  if (s == "master_translator") return FormatName::master_translator;
  if (s == "naive_translate") return FormatName::naive_translate;
  return std::nullopt;
}

void FormatSpec::validate() const {
  if (name != FormatName::simple_colon && shots != 0) {
    throw FormatShotMismatch(std::string(to_string(name)) +
                             " is defined 0-shot only (got shots=" +
                             std::to_string(shots) + ")");
  }
}

std::vector<ExamplePair> select_examples(const std::vector<ExamplePair>& pool,
                                         std::size_t k, const Selection& selection) {
  if (k > pool.size()) {
    throw PoolTooSmall("need " + std::to_string(k) + " examples, pool has " +
                       std::to_string(pool.size()));
  }
  if (std::holds_alternative<FirstK>(selection)) {
    return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)};
  }
  // partial Fisher-Yates over indices; draw order is the result order
  std::mt19937_64 rng(std::get<SeededRandom>(selection).seed);
  std::vector<std::size_t> indices(pool.size());
  std::iota(indices.begin(), indices.end(), 0);
  std::vector<ExamplePair> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pickdist(i, indices.size() - 1);
    std::swap(indices[i], indices[pickdist(rng)]);
    out.push_back(pool[indices[i]]);
  }
  return out;
}

std::string build_prompt(const FormatSpec& spec,
                         const std::vector<ExamplePair>& pool,
                         const std::string& query_source,
                         const RenderOptions& opts) {
  spec.validate();
  if (query_source.empty()) throw Error("query source must be non-empty");

  if (spec.name == FormatName::simple_colon) {
    std::vector<ExamplePair> examples =
        select_examples(pool, spec.shots, spec.selection);
    std::string out;
    for (const auto& ex : examples) {
      out += "French: " + ex.source + "\nEnglish: " + ex.target + "\n\n";
    }
    out += "French: " + query_source + "\nEnglish:";
    if (opts.trailing_space) out.push_back(' ');
    return out;
  }

  const auto& templates = catalog();
  const PromptTemplate& t = templates.at(to_string(spec.name));
  return render(t, {{"src", query_source}}, opts);
}

std::vector<ExamplePair> parse_pool_tsv(const std::string& text,
                                        const std::string& origin) {
  std::vector<ExamplePair> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(origin + ":" + std::to_string(lineno) + ": expected source<TAB>target");
    }
    ExamplePair pair{line.substr(0, tab), line.substr(tab + 1)};
    try {
      pair.validate();
    } catch (const Error& e) {
      throw Error(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<ExamplePair> load_pool_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pool_tsv(buf.str(), path.string());
}

}  // namespace promptrt
