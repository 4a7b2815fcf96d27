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

#include "promptrt/ngram_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "promptrt/unicode.hpp"

namespace promptrt {

namespace {

// Training text for the mock: short parallel sentences in the colon prompt
// layout, so completions of translation-style prompts look plausible.
constexpr const char* kCorpus =
    "French: Bonjour, comment allez-vous ?\nEnglish: Hello, how are you?\n\n"
    "French: Le chat dort sur la chaise.\nEnglish: The cat sleeps on the chair.\n\n"
    "French: Il fait beau aujourd'hui.\nEnglish: The weather is nice today.\n\n"
    "French: Je voudrais un café, s'il vous plaît.\nEnglish: I would like a coffee, please.\n\n"
    "French: Où est la gare ?\nEnglish: Where is the train station?\n\n"
    "French: Nous allons au marché ce matin.\nEnglish: We are going to the market this morning.\n\n"
    "French: Elle lit un livre dans le jardin.\nEnglish: She reads a book in the garden.\n\n"
    "French: Le train part à huit heures.\nEnglish: The train leaves at eight o'clock.\n\n"
    "French: Merci beaucoup pour votre aide.\nEnglish: Thank you very much for your help.\n\n"
    "French: La mer est calme ce soir.\nEnglish: The sea is calm tonight.\n\n"
    "French: Mon frère habite à Paris.\nEnglish: My brother lives in Paris.\n\n"
    "French: Les enfants jouent dans la rue.\nEnglish: The children play in the street.\n\n"
    "French: Je ne comprends pas la question.\nEnglish: I do not understand the question.\n\n"
    "French: Il pleut depuis ce matin.\nEnglish: It has been raining since this morning.\n\n"
    "French: Nous avons mangé du pain et du fromage.\nEnglish: We ate bread and cheese.\n\n"
    "French: La porte de la maison est ouverte.\nEnglish: The door of the house is open.\n\n"
    "French: Elle chante une chanson très belle.\nEnglish: She sings a very beautiful song.\n\n"
    "French: Le professeur explique la leçon.\nEnglish: The teacher explains the lesson.\n\n"
    "French: Je cherche la rue principale.\nEnglish: I am looking for the main street.\n\n"
    "French: Le musée ouvre à dix heures.\nEnglish: The museum opens at ten o'clock.\n\n"
    "French: Il y a beaucoup de monde ici.\nEnglish: There are many people here.\n\n"
    "French: La réponse est très simple.\nEnglish: The answer is very simple.\n\n"
    "French: Nous partons demain matin.\nEnglish: We leave tomorrow morning.\n\n"
    "French: Le livre est sur la table.\nEnglish: The book is on the table.\n\n"
    "French: Elle achète des fleurs au marché.\nEnglish: She buys flowers at the market.\n\n"
    "French: Le soleil brille dans le ciel.\nEnglish: The sun shines in the sky.\n\n"
    "French: J'ai oublié mon parapluie.\nEnglish: I forgot my umbrella.\n\n"
    "French: La ville est calme la nuit.\nEnglish: The city is quiet at night.\n\n"
    "French: Il écrit une lettre à son ami.\nEnglish: He writes a letter to his friend.\n\n"
    "French: Nous regardons les étoiles.\nEnglish: We watch the stars.\n\n"
    "Thus, the correct answer is 27.\n"
    "Let's solve this problem by splitting it into steps.\n"
    "The correct answer is C.\n";

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t bigram_key(char32_t c1, char32_t c2) {
  return (static_cast<std::uint64_t>(c1) << 21) | static_cast<std::uint64_t>(c2);
}

constexpr double kFloorLogprob = -20.72326583694641;  // ln(1e-9)

}  // namespace

NgramModel::NgramModel(std::uint64_t seed, std::string id)
    : seed_(seed), id_(std::move(id)) {
  if (id_.empty()) id_ = "mock:ngram:" + std::to_string(seed);
  std::vector<char32_t> cps = utf8_decode(kCorpus);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    ++base_[cps[i]];
    if (i >= 1) ++unigram_[cps[i - 1]][cps[i]];
    if (i >= 2) ++bigram_[bigram_key(cps[i - 2], cps[i - 1])][cps[i]];
  }
}

const NgramModel::CountMap& NgramModel::distribution(char32_t c1, char32_t c2) const {
  auto b = bigram_.find(bigram_key(c1, c2));
  if (b != bigram_.end()) return b->second;
  auto u = unigram_.find(c2);
  if (u != unigram_.end()) return u->second;
  return base_;
}

double NgramModel::char_logprob(char32_t c1, char32_t c2, char32_t next) const {
  const CountMap& dist = distribution(c1, c2);
  double total = 0.0;
  for (const auto& [cp, n] : dist) total += n;
  auto it = dist.find(next);
  if (it == dist.end() || total <= 0.0) return kFloorLogprob;
  return std::log(static_cast<double>(it->second) / total);
}

Completion NgramModel::generate(const std::string& prompt,
                                const GenParams& params) const {
  if (prompt.empty()) throw std::invalid_argument("prompt must be non-empty");
  params.validate();

  std::mt19937_64 rng(mix64(seed_ ^ fnv1a64(prompt)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<char32_t> context = utf8_decode(prompt);
  char32_t c1 = context.size() >= 2 ? context[context.size() - 2] : U' ';
  char32_t c2 = !context.empty() ? context.back() : U' ';

  Completion c;
  std::string generated;
  while (c.tokens.size() < params.max_tokens) {
    const CountMap& dist = distribution(c1, c2);
    if (dist.empty()) break;

    // Sampling weights: counts raised to 1/T; greedy at T = 0.
    char32_t pick;
    if (params.temperature == 0.0) {
      pick = dist.begin()->first;
      std::uint32_t best = dist.begin()->second;
      for (const auto& [cp, n] : dist) {
        if (n > best) {
          best = n;
          pick = cp;
        }
      }
    } else {
      std::vector<std::pair<char32_t, double>> weights;
      weights.reserve(dist.size());
      double total = 0.0;
      for (const auto& [cp, n] : dist) {
        double w = std::pow(static_cast<double>(n), 1.0 / params.temperature);
        weights.emplace_back(cp, w);
        total += w;
      }
      if (params.top_p < 1.0) {
        std::stable_sort(weights.begin(), weights.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        double kept = 0.0;
        std::size_t cut = 0;
        while (cut < weights.size() && kept < params.top_p * total) {
          kept += weights[cut].second;
          ++cut;
        }
        weights.resize(cut);
        total = kept;
      }
      double r = unit(rng) * total;
      pick = weights.back().first;
      for (const auto& [cp, w] : weights) {
        if (r < w) {
          pick = cp;
          break;
        }
        r -= w;
      }
    }

    Token tok;
    tok.text = utf8_encode(pick);
    if (params.logprobs) tok.logprob = char_logprob(c1, c2, pick);
    generated += tok.text;
    c.tokens.push_back(std::move(tok));
    c1 = c2;
    c2 = pick;

    // stop sequences end the span before the stop text itself
    std::size_t cut = std::string::npos;
    for (const auto& s : params.stop) {
      if (s.empty()) continue;
      auto pos = generated.find(s);
      if (pos != std::string::npos) cut = std::min(cut, pos);
    }
    if (cut != std::string::npos) {
      std::vector<Token> kept;
      std::size_t used = 0;
      for (auto& t : c.tokens) {
        if (used + t.text.size() > cut) break;
        used += t.text.size();
        kept.push_back(std::move(t));
      }
      c.tokens = std::move(kept);
      c.finish_reason = FinishReason::stop_sequence;
      return c;
    }
  }
  c.finish_reason = FinishReason::max_tokens;
  return c;
}

double NgramModel::score_continuation(const std::string& context,
                                      const std::string& fragment) const {
  if (fragment.empty()) throw std::invalid_argument("fragment must be non-empty");
  std::vector<char32_t> ctx = utf8_decode(context);
  char32_t c1 = ctx.size() >= 2 ? ctx[ctx.size() - 2] : U' ';
  char32_t c2 = !ctx.empty() ? ctx.back() : U' ';
  double sum = 0.0;
  for (char32_t cp : utf8_decode(fragment)) {
    sum += char_logprob(c1, c2, cp);
    c1 = c2;
    c2 = cp;
  }
  return sum;
}

}  // namespace promptrt
