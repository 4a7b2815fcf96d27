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

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

namespace promptrt {

Segment Segment::make_literal(std::string text) {
  Segment s;
  s.kind = Kind::literal;
  s.text = std::move(text);
  return s;
}

Segment Segment::make_var(std::string name) {
  Segment s;
  s.kind = Kind::var;
  s.name = std::move(name);
  return s;
}

Segment Segment::make_hole(std::string name, HoleParams params) {
  Segment s;
  s.kind = Kind::hole;
  s.name = std::move(name);
  s.hole = std::move(params);
  return s;
}

bool PromptTemplate::has_holes() const {
  return std::any_of(segments.begin(), segments.end(), [](const Segment& s) {
    return s.kind == Segment::Kind::hole;
  });
}

std::vector<std::string> PromptTemplate::var_names() const {
  std::vector<std::string> names;
  for (const auto& s : segments) {
    if (s.kind != Segment::Kind::var) continue;
    if (std::find(names.begin(), names.end(), s.name) == names.end()) {
      names.push_back(s.name);
    }
  }
  return names;
}

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Scans template text byte-wise while reporting positions in 1-based
// lines and codepoint columns.
class Scanner {
 public:
  explicit Scanner(const std::string& text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool starts_with(const char* s) const {
    return text_.compare(pos_, std::char_traits<char>::length(s), s) == 0;
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;  // count codepoints, not continuation bytes
    }
    return c;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }

  int line() const { return line_; }
  int col() const { return col_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, line_, col_);
  }
  [[noreturn]] void fail_at(const std::string& msg, int line, int col) const {
    throw SyntaxError(msg, line, col);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string read_identifier(Scanner& sc, const char* what) {
  if (sc.eof() || !is_ident_start(sc.peek())) {
    sc.fail(std::string("expected ") + what);
  }
  std::string out;
  while (!sc.eof() && is_ident_char(sc.peek())) out.push_back(sc.advance());
  return out;
}

std::string read_quoted(Scanner& sc) {
  if (sc.peek() != '"') sc.fail("expected quoted value");
  sc.advance();
  std::string out;
  while (true) {
    if (sc.eof()) sc.fail("unterminated quoted value");
    char c = sc.advance();
    if (c == '"') return out;
    if (c == '\\') {
      if (sc.eof()) sc.fail("unterminated escape in quoted value");
      char e = sc.advance();
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: sc.fail(std::string("unknown escape '\\") + e + "'");
      }
      continue;
    }
    out.push_back(c);
  }
}

std::uint32_t read_uint(Scanner& sc, const char* key) {
  if (sc.eof() || !std::isdigit(static_cast<unsigned char>(sc.peek()))) {
    sc.fail(std::string("expected integer value for ") + key);
  }
  std::uint64_t v = 0;
  while (!sc.eof() && std::isdigit(static_cast<unsigned char>(sc.peek()))) {
    v = v * 10 + static_cast<std::uint64_t>(sc.advance() - '0');
    if (v > 0xFFFFFFFFull) sc.fail(std::string(key) + " out of range");
  }
  return static_cast<std::uint32_t>(v);
}

HoleParams read_hole_params(Scanner& sc) {
  HoleParams p;
  while (true) {
    sc.skip_spaces();
    if (sc.starts_with("}}")) break;
    if (sc.eof()) sc.fail("unterminated '{{'");
    int kline = sc.line(), kcol = sc.col();
    std::string key = read_identifier(sc, "key name");
    if (sc.peek() != '=') sc.fail("expected '=' after key");
    sc.advance();
    if (key == "max_tokens") {
      p.max_tokens = read_uint(sc, "max_tokens");
      if (p.max_tokens == 0) sc.fail_at("max_tokens must be positive", kline, kcol);
    } else if (key == "min_tokens") {
      p.min_tokens = read_uint(sc, "min_tokens");
    } else if (key == "patience") {
      std::uint32_t v = read_uint(sc, "patience");
      if (v == 0) sc.fail_at("patience must be positive", kline, kcol);
      p.patience = v;
    } else if (key == "stop") {
      p.stop.push_back(read_quoted(sc));
    } else if (key == "anchor") {
      if (sc.peek() == '"') {
        p.anchor_mode = AnchorMode::text;
        p.anchor_text = read_quoted(sc);
        if (p.anchor_text.empty()) sc.fail_at("anchor text is empty", kline, kcol);
      } else {
        std::string word = read_identifier(sc, "anchor value");
        if (word != "next") sc.fail_at("anchor must be `next` or a quoted text", kline, kcol);
        p.anchor_mode = AnchorMode::next_literal;
      }
    } else {
      sc.fail_at("unknown key '" + key + "'", kline, kcol);
    }
  }
  if (p.min_tokens && *p.min_tokens >= p.max_tokens) {
    sc.fail("min_tokens must be smaller than max_tokens");
  }
  return p;
}

}  // namespace

PromptTemplate parse_template(const std::string& text) {
  PromptTemplate t;
  t.source_text = text;

  Scanner sc(text);
  std::string literal;
  auto flush_literal = [&] {
    if (!literal.empty()) {
      t.segments.push_back(Segment::make_literal(std::move(literal)));
      literal.clear();
    }
  };

  std::set<std::string> var_names;
  std::set<std::string> hole_names;
  struct AnchorSite {
    std::size_t index;
    int line;
    int col;
  };
  std::vector<AnchorSite> anchor_sites;

  while (!sc.eof()) {
    if (sc.peek() == '\\' && sc.peek(1) == '{' && sc.peek(2) == '{') {
      sc.advance();
      literal.push_back(sc.advance());
      literal.push_back(sc.advance());
      continue;
    }
    if (sc.peek() == '{' && sc.peek(1) == '{') {
      int dline = sc.line(), dcol = sc.col();
      sc.advance();
      sc.advance();
      std::string kind = read_identifier(sc, "directive kind (var or gen)");
      if (sc.peek() != ':') sc.fail("expected ':' after directive kind");
      sc.advance();
      int nline = sc.line(), ncol = sc.col();
      std::string name = read_identifier(sc, "identifier");
      if (kind == "var") {
        sc.skip_spaces();
        if (!sc.starts_with("}}")) {
          if (sc.eof()) sc.fail_at("unterminated '{{'", dline, dcol);
          sc.fail("variable directives take no parameters");
        }
        sc.advance();
        sc.advance();
        if (hole_names.count(name)) {
          sc.fail_at("duplicate name '" + name + "'", nline, ncol);
        }
        var_names.insert(name);
        flush_literal();
        t.segments.push_back(Segment::make_var(name));
      } else if (kind == "gen") {
        HoleParams params = read_hole_params(sc);
        sc.advance();
        sc.advance();
        if (hole_names.count(name) || var_names.count(name)) {
          sc.fail_at("duplicate name '" + name + "'", nline, ncol);
        }
        hole_names.insert(name);
        flush_literal();
        t.segments.push_back(Segment::make_hole(name, std::move(params)));
        if (t.segments.back().hole.anchor_mode == AnchorMode::next_literal) {
          anchor_sites.push_back({t.segments.size() - 1, dline, dcol});
        }
      } else {
        sc.fail_at("unknown directive '" + kind + "'", dline, dcol);
      }
      continue;
    }
    literal.push_back(sc.advance());
  }
  flush_literal();

  for (const auto& site : anchor_sites) {
    if (site.index + 1 >= t.segments.size() ||
        t.segments[site.index + 1].kind != Segment::Kind::literal) {
      throw SyntaxError("anchor=next requires a literal after the hole",
                        site.line, site.col);
    }
  }

  return t;
}

std::string render(const PromptTemplate& t,
                   const std::map<std::string, std::string>& bindings,
                   const RenderOptions& opts) {
  std::string out;
  for (const auto& seg : t.segments) {
    switch (seg.kind) {
      case Segment::Kind::literal:
        out += seg.text;
        break;
      case Segment::Kind::var: {
        auto it = bindings.find(seg.name);
        if (it == bindings.end()) throw MissingBinding(seg.name);
        out += it->second;
        break;
      }
      case Segment::Kind::hole:
        throw HolePresent(seg.name);
    }
  }
  if (opts.trailing_space) out.push_back(' ');
  return out;
}

namespace {

std::string escape_literal(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '{' && i + 1 < text.size() && text[i + 1] == '{') {
      out += "\\{{";
      ++i;
      continue;
    }
    out.push_back(text[i]);
  }
  return out;
}

std::string quote_value(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string serialize(const PromptTemplate& t) {
  std::string out;
  for (const auto& seg : t.segments) {
    switch (seg.kind) {
      case Segment::Kind::literal:
        out += escape_literal(seg.text);
        break;
      case Segment::Kind::var:
        out += "{{var:" + seg.name + "}}";
        break;
      case Segment::Kind::hole: {
        out += "{{gen:" + seg.name;
        const HoleParams& p = seg.hole;
        if (p.max_tokens != 128) out += " max_tokens=" + std::to_string(p.max_tokens);
        if (p.min_tokens) out += " min_tokens=" + std::to_string(*p.min_tokens);
        if (p.patience) out += " patience=" + std::to_string(*p.patience);
        for (const auto& s : p.stop) out += " stop=" + quote_value(s);
        if (p.anchor_mode == AnchorMode::next_literal) out += " anchor=next";
        if (p.anchor_mode == AnchorMode::text) out += " anchor=" + quote_value(p.anchor_text);
        out += "}}";
        break;
      }
    }
  }
  return out;
}

}  // namespace promptrt
