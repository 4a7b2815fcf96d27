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

#include "promptrt/executor.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

#include "json.hpp"

namespace promptrt {

const char* to_string(SpanKind k) {
  switch (k) {
    case SpanKind::template_literal: return "template_literal";
    case SpanKind::variable: return "variable";
    case SpanKind::generated: return "generated";
    case SpanKind::injected_anchor: return "injected_anchor";
  }
  return "template_literal";
}

namespace {

std::optional<SpanKind> span_kind_from_string(const std::string& s) {
  if (s == "template_literal") return SpanKind::template_literal;
  if (s == "variable") return SpanKind::variable;
  if (s == "generated") return SpanKind::generated;
  if (s == "injected_anchor") return SpanKind::injected_anchor;
  return std::nullopt;
}

}  // namespace

std::string Transcript::text() const {
  std::string out;
  for (const auto& s : spans) out += s.text;
  return out;
}

void InjectionPolicy::validate() const {
  if (patience < 1) throw std::invalid_argument("patience must be positive");
  if (hard_budget < 1) throw std::invalid_argument("hard_budget must be positive");
  if (min_tokens >= hard_budget) {
    throw std::invalid_argument("min_tokens must be smaller than hard_budget");
  }
}

namespace {

struct HoleOutcome {
  std::vector<Token> tokens;
  SignalSeries signal;
  bool inject = false;         // append the anchor as an injected span
  bool hit_hard_budget = false;
};

// Generates one hole, tracking the anchor signal and the peak rule.
// `doc` is extended with kept tokens only; on peak injection the generated
// text is rewound to the argmax token.
HoleOutcome run_hole(const LanguageModel& model, std::string& doc,
                     const HoleParams& hole, const std::string& anchor,
                     const GenParams& run_params, const InjectionPolicy& policy) {
  HoleOutcome out;
  const bool anchored = !anchor.empty();
  const std::uint32_t patience = hole.patience_or(policy.patience);
  const std::uint32_t min_tokens = hole.min_tokens_or(policy.min_tokens);

  GenParams step = run_params;
  step.max_tokens = 1;
  step.stop.clear();  // stop sequences are matched over the whole hole text

  const std::string base_doc = doc;
  std::string hole_text;

  bool have_best = false;
  double best_lp = 0.0;
  std::uint32_t best_idx = 0;
  std::uint32_t stale = 0;

  auto rewind_to = [&](std::uint32_t keep_idx) {
    out.tokens.resize(keep_idx + 1);
    hole_text.clear();
    for (const auto& t : out.tokens) hole_text += t.text;
    doc = base_doc + hole_text;
  };

  while (true) {
    // Budget checks happen before the next token is requested, so a hole
    // never generates past its limits.
    const std::uint32_t n = static_cast<std::uint32_t>(out.tokens.size());
    if (anchored && n >= policy.hard_budget) {
      out.inject = true;  // fallback: inject at the current position
      out.hit_hard_budget = true;
      return out;
    }
    if (n >= hole.max_tokens) return out;
    if (!anchored && n >= policy.hard_budget) {
      out.hit_hard_budget = true;
      return out;
    }

    Completion step_result = model.generate(doc, step);
    if (step_result.tokens.empty()) return out;  // model ran out of text

    Token tok = step_result.tokens.front();
    const std::uint32_t idx = n;
    out.tokens.push_back(tok);
    hole_text += tok.text;
    doc += tok.text;

    // (a) stop sequences fire anywhere in the accumulated hole text
    std::size_t cut = std::string::npos;
    for (const auto& s : hole.stop) {
      if (s.empty()) continue;
      auto pos = hole_text.find(s);
      if (pos != std::string::npos) cut = std::min(cut, pos);
    }
    if (cut != std::string::npos) {
      std::vector<Token> kept;
      std::size_t used = 0;
      for (auto& t : out.tokens) {
        if (used >= cut) break;
        if (used + t.text.size() <= cut) {
          used += t.text.size();
          kept.push_back(std::move(t));
        } else {
          Token partial = t;
          partial.text = t.text.substr(0, cut - used);
          if (!partial.text.empty()) kept.push_back(std::move(partial));
          used = cut;
        }
      }
      out.tokens = std::move(kept);
      hole_text = hole_text.substr(0, cut);
      doc = base_doc + hole_text;
      return out;
    }

    if (!anchored) continue;

    // (c) peak rule on the counterfactual anchor likelihood
    double lp = model.score_continuation(doc, anchor);
    out.signal.points.push_back({idx, lp});
    if (idx >= min_tokens) {
      if (!have_best || lp > best_lp) {
        have_best = true;
        best_lp = lp;
        best_idx = idx;
        stale = 0;
      } else {
        ++stale;
      }
      if (have_best && stale >= patience) {
        rewind_to(best_idx);
        out.inject = true;
        return out;
      }
    }
  }
}

}  // namespace

Transcript execute(const PromptTemplate& t,
                   const std::map<std::string, std::string>& bindings,
                   const LanguageModel& model, const GenParams& params,
                   const InjectionPolicy& policy) {
  params.validate();
  policy.validate();
  for (const auto& name : t.var_names()) {
    if (!bindings.count(name)) throw MissingBinding(name);
  }

  const auto started = std::chrono::steady_clock::now();
  Transcript tr;
  tr.model_id = model.id();
  tr.params = params;

  std::string doc;
  bool skip_next_literal = false;

  for (std::size_t i = 0; i < t.segments.size(); ++i) {
    const Segment& seg = t.segments[i];
    switch (seg.kind) {
      case Segment::Kind::literal: {
        if (skip_next_literal) {
          skip_next_literal = false;
          break;
        }
        Span s;
        s.kind = SpanKind::template_literal;
        s.text = seg.text;
        doc += s.text;
        tr.spans.push_back(std::move(s));
        break;
      }
      case Segment::Kind::var: {
        Span s;
        s.kind = SpanKind::variable;
        s.text = bindings.at(seg.name);
        doc += s.text;
        tr.spans.push_back(std::move(s));
        break;
      }
      case Segment::Kind::hole: {
        std::string anchor;
        bool anchor_is_next = false;
        if (seg.hole.anchor_mode == AnchorMode::next_literal) {
          if (i + 1 >= t.segments.size() ||
              t.segments[i + 1].kind != Segment::Kind::literal) {
            throw Error("hole '" + seg.name + "' uses anchor=next with no literal after it");
          }
          anchor = t.segments[i + 1].text;
          anchor_is_next = true;
        } else if (seg.hole.anchor_mode == AnchorMode::text) {
          anchor = seg.hole.anchor_text;
        }

        HoleOutcome hole = run_hole(model, doc, seg.hole, anchor, params, policy);

        Span gen;
        gen.kind = SpanKind::generated;
        gen.hole_name = seg.name;
        for (const auto& tok : hole.tokens) gen.text += tok.text;
        if (!anchor.empty()) gen.signal = std::move(hole.signal);
        tr.spans.push_back(std::move(gen));

        if (hole.inject) {
          Span inj;
          inj.kind = SpanKind::injected_anchor;
          inj.hole_name = seg.name;
          inj.text = anchor;
          doc += anchor;
          tr.spans.push_back(std::move(inj));
          if (anchor_is_next) skip_next_literal = true;
        }
        if (hole.hit_hard_budget && !hole.inject) {
          tr.derailed = true;  // ran to the policy guard with nothing to inject
        }
        break;
      }
    }
  }

  tr.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - started)
                   .count();
  return tr;
}

namespace {

// Text that the verdict scan applies to: everything after the final
// injected anchor, or the last generated span when nothing was injected.
std::string verdict_scan_text(const Transcript& tr) {
  for (std::size_t i = tr.spans.size(); i-- > 0;) {
    if (tr.spans[i].kind == SpanKind::injected_anchor) {
      std::string out;
      for (std::size_t k = i + 1; k < tr.spans.size(); ++k) out += tr.spans[k].text;
      return out;
    }
  }
  for (std::size_t i = tr.spans.size(); i-- > 0;) {
    if (tr.spans[i].kind == SpanKind::generated) return tr.spans[i].text;
  }
  return "";
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::optional<std::string> scan_multiple_choice(const std::string& text,
                                                const MultipleChoice& mc) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c < mc.first || c > mc.last) continue;
    bool standalone_left = i == 0 || !is_word_char(text[i - 1]);
    if (!standalone_left) continue;
    char next = i + 1 < text.size() ? text[i + 1] : '\0';
    bool closed = next == ')' || next == '.' || next == ':' || next == '\0' ||
                  std::isspace(static_cast<unsigned char>(next));
    if (closed) return std::string(1, c);
  }
  return std::nullopt;
}

std::optional<std::string> scan_integer(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
    std::size_t start = i;
    if (i > 0 && text[i - 1] == '-' &&
        (i == 1 || !is_word_char(text[i - 2]))) {
      start = i - 1;
    }
    std::size_t end = i;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    return text.substr(start, end - start);
  }
  return std::nullopt;
}

std::optional<std::string> scan_free_text(const std::string& text) {
  std::size_t start = 0;
  while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
  if (start == text.size()) return std::nullopt;

  // cut at the first blank line after content begins
  std::size_t end = text.size();
  std::size_t pos = start;
  while ((pos = text.find('\n', pos)) != std::string::npos) {
    std::size_t k = pos + 1;
    while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
    if (k < text.size() && text[k] == '\n') {
      end = pos;
      break;
    }
    pos = pos + 1;
  }
  std::string out = text.substr(start, end - start);
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace

std::optional<std::string> extract_verdict(const Transcript& tr,
                                           const VerdictSchema& schema) {
  std::string text = verdict_scan_text(tr);
  if (text.empty()) return std::nullopt;
  return std::visit(
      [&](const auto& s) -> std::optional<std::string> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MultipleChoice>) {
          return scan_multiple_choice(text, s);
        } else if constexpr (std::is_same_v<T, IntegerAnswer>) {
          return scan_integer(text);
        } else {
          return scan_free_text(text);
        }
      },
      schema);
}

std::string transcript_to_json(const Transcript& tr) {
  nlohmann::ordered_json j;
  j["model_id"] = tr.model_id;
  j["params"] = {{"temperature", tr.params.temperature},
                 {"top_p", tr.params.top_p},
                 {"max_tokens", tr.params.max_tokens},
                 {"stop", tr.params.stop},
                 {"logprobs", tr.params.logprobs}};
  if (tr.verdict) {
    j["verdict"] = *tr.verdict;
  } else {
    j["verdict"] = nullptr;
  }
  j["derailed"] = tr.derailed;
  j["wall_ms"] = tr.wall_ms;
  auto& spans = j["spans"] = nlohmann::ordered_json::array();
  for (const auto& s : tr.spans) {
    nlohmann::ordered_json e;
    e["kind"] = to_string(s.kind);
    e["text"] = s.text;
    if (s.hole_name) e["hole"] = *s.hole_name;
    if (s.signal) {
      auto& pts = e["signal"] = nlohmann::ordered_json::array();
      for (const auto& p : s.signal->points) {
        pts.push_back({p.token_index, p.anchor_logprob});
      }
    }
    spans.push_back(std::move(e));
  }
  return j.dump();
}

Transcript transcript_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  Transcript tr;
  tr.model_id = j.value("model_id", "");
  if (j.contains("params")) {
    const auto& p = j["params"];
    tr.params.temperature = p.value("temperature", 0.0);
    tr.params.top_p = p.value("top_p", 1.0);
    tr.params.max_tokens = p.value("max_tokens", 64u);
    tr.params.stop = p.value("stop", std::vector<std::string>{});
    tr.params.logprobs = p.value("logprobs", false);
  }
  if (j.contains("verdict") && !j["verdict"].is_null()) {
    tr.verdict = j["verdict"].get<std::string>();
  }
  tr.derailed = j.value("derailed", false);
  tr.wall_ms = j.value("wall_ms", std::int64_t{0});
  for (const auto& e : j.value("spans", nlohmann::json::array())) {
    Span s;
    auto kind = span_kind_from_string(e.at("kind").get<std::string>());
    if (!kind) throw Error("unknown span kind in transcript record");
    s.kind = *kind;
    s.text = e.at("text").get<std::string>();
    if (e.contains("hole")) s.hole_name = e["hole"].get<std::string>();
    if (e.contains("signal")) {
      SignalSeries series;
      for (const auto& p : e["signal"]) {
        series.points.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<double>()});
      }
      s.signal = std::move(series);
    }
    tr.spans.push_back(std::move(s));
  }
  return tr;
}

}  // namespace promptrt
