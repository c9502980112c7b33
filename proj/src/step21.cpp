// Copyright 2026 The steppart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "steppart/step21.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "steppart/error.hpp"

namespace steppart {

bool PValue::operator==(const PValue& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Unset:
    case Kind::Derived:
      return true;
    case Kind::Integer:
    case Kind::Ref:
      return integer == o.integer;
    case Kind::Real:
      return real == o.real;
    case Kind::String:
    case Kind::Enum:
      return text == o.text;
    case Kind::List:
      return list == o.list;
    case Kind::Typed:
      return text == o.text && list == o.list;
  }
  return false;
}

bool EntityRecord::is(std::string_view kw) const {
  for (const auto& r : records)
    if (r.keyword == kw) return true;
  return false;
}

const std::vector<PValue>* EntityRecord::find(std::string_view kw) const {
  for (const auto& r : records)
    if (r.keyword == kw) return &r.args;
  return nullptr;
}

namespace {

std::string firstString(const std::vector<PValue>& args) {
  for (const auto& a : args) {
    if (a.kind == PValue::Kind::String) return a.text;
    if (a.kind == PValue::Kind::List)
      for (const auto& e : a.list)
        if (e.kind == PValue::Kind::String) return e.text;
  }
  return {};
}

}  // namespace

std::string StepHeader::description() const {
  for (const auto& r : records)
    if (r.keyword == "FILE_DESCRIPTION") return firstString(r.args);
  return {};
}

std::string StepHeader::name() const {
  for (const auto& r : records)
    if (r.keyword == "FILE_NAME") return firstString(r.args);
  return {};
}

std::string StepHeader::schema() const {
  for (const auto& r : records)
    if (r.keyword == "FILE_SCHEMA") return firstString(r.args);
  return {};
}

const EntityRecord& StepEntityGraph::at(std::int64_t id) const {
  auto it = entities.find(id);
  if (it == entities.end())
    throw Error("parse", "unresolved entity reference #" + std::to_string(id));
  return it->second;
}

const EntityRecord* StepEntityGraph::get(std::int64_t id) const {
  auto it = entities.find(id);
  return it == entities.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  End,
  Semicolon,
  Equals,
  LParen,
  RParen,
  Comma,
  Ref,      // #123
  Integer,  // 42
  Real,     // 4.2E-1
  String,   // 'abc'
  Enum,     // .TRUE.
  Keyword,  // CARTESIAN_POINT
  Unset,    // $
  Derived,  // *
};

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  Tok tok = Tok::End;
  std::int64_t tokInt = 0;
  double tokReal = 0.0;
  std::string tokText;
  std::size_t tokLine = 1, tokCol = 1;

  explicit Lexer(std::string_view s) : src(s) { advance(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("parse", "malformed STEP at line " + std::to_string(tokLine) + ", column " +
                             std::to_string(tokCol) + ": " + msg);
  }

  char peek() const { return pos < src.size() ? src[pos] : '\0'; }

  char take() {
    char c = src[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  void skipSpaceAndComments() {
    while (pos < src.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        take();
      } else if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '*') {
        take();
        take();
        while (pos < src.size() && !(peek() == '*' && pos + 1 < src.size() && src[pos + 1] == '/'))
          take();
        if (pos >= src.size()) fail("unterminated comment");
        take();
        take();
      } else {
        break;
      }
    }
  }

  void advance() {
    skipSpaceAndComments();
    tokLine = line;
    tokCol = col;
    tokText.clear();
    if (pos >= src.size()) {
      tok = Tok::End;
      return;
    }
    char c = take();
    switch (c) {
      case ';': tok = Tok::Semicolon; return;
      case '=': tok = Tok::Equals; return;
      case '(': tok = Tok::LParen; return;
      case ')': tok = Tok::RParen; return;
      case ',': tok = Tok::Comma; return;
      case '$': tok = Tok::Unset; return;
      case '*': tok = Tok::Derived; return;
      case '#': {
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(take());
        if (digits.empty()) fail("expected instance id after '#'");
        tok = Tok::Ref;
        tokInt = std::stoll(digits);
        return;
      }
      case '\'': {
        // Part-21 string; '' is an embedded quote. \X2\.. escapes pass through.
        while (true) {
          if (pos >= src.size()) fail("unterminated string");
          char s = take();
          if (s == '\'') {
            if (peek() == '\'') {
              tokText.push_back(take());
            } else {
              break;
            }
          } else {
            tokText.push_back(s);
          }
        }
        tok = Tok::String;
        return;
      }
      case '.': {
        // Enumeration token .IDENT.
        while (peek() != '.' && peek() != '\0') {
          char e = take();
          if (!std::isalnum(static_cast<unsigned char>(e)) && e != '_' && e != '-')
            fail("bad enumeration literal");
          tokText.push_back(e);
        }
        if (peek() != '.') fail("unterminated enumeration literal");
        take();
        tok = Tok::Enum;
        return;
      }
      default:
        break;
    }
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
      std::string num(1, c);
      bool isReal = false;
      while (true) {
        char n = peek();
        if (std::isdigit(static_cast<unsigned char>(n))) {
          num.push_back(take());
        } else if (n == '.') {
          isReal = true;
          num.push_back(take());
        } else if (n == 'E' || n == 'e') {
          isReal = true;
          num.push_back(take());
          if (peek() == '+' || peek() == '-') num.push_back(take());
        } else {
          break;
        }
      }
      if (isReal) {
        tok = Tok::Real;
        tokReal = std::strtod(num.c_str(), nullptr);
      } else {
        tok = Tok::Integer;
        auto res = std::from_chars(num.data(), num.data() + num.size(), tokInt);
        if (res.ec != std::errc{}) fail("bad integer literal '" + num + "'");
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '!') {
      tokText.push_back(c);
      while (true) {
        char k = peek();
        if (std::isalnum(static_cast<unsigned char>(k)) || k == '_' || k == '-' || k == '!') {
          tokText.push_back(take());
        } else {
          break;
        }
      }
      tok = Tok::Keyword;
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void expect(Tok t, const char* what) {
    if (tok != t) fail(std::string("expected ") + what);
    advance();
  }
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

PValue parseValue(Lexer& lx);

std::vector<PValue> parseArgList(Lexer& lx) {
  lx.expect(Tok::LParen, "'('");
  std::vector<PValue> args;
  if (lx.tok == Tok::RParen) {
    lx.advance();
    return args;
  }
  while (true) {
    args.push_back(parseValue(lx));
    if (lx.tok == Tok::Comma) {
      lx.advance();
      continue;
    }
    lx.expect(Tok::RParen, "')' or ','");
    return args;
  }
}

PValue parseValue(Lexer& lx) {
  PValue v;
  switch (lx.tok) {
    case Tok::Unset:
      v.kind = PValue::Kind::Unset;
      lx.advance();
      return v;
    case Tok::Derived:
      v.kind = PValue::Kind::Derived;
      lx.advance();
      return v;
    case Tok::Integer:
      v = PValue::makeInt(lx.tokInt);
      lx.advance();
      return v;
    case Tok::Real:
      v = PValue::makeReal(lx.tokReal);
      lx.advance();
      return v;
    case Tok::Ref:
      v = PValue::makeRef(lx.tokInt);
      lx.advance();
      return v;
    case Tok::String:
      v.kind = PValue::Kind::String;
      v.text = lx.tokText;
      lx.advance();
      return v;
    case Tok::Enum:
      v.kind = PValue::Kind::Enum;
      v.text = lx.tokText;
      lx.advance();
      return v;
    case Tok::LParen: {
      v.kind = PValue::Kind::List;
      lx.advance();
      if (lx.tok == Tok::RParen) {
        lx.advance();
        return v;
      }
      while (true) {
        v.list.push_back(parseValue(lx));
        if (lx.tok == Tok::Comma) {
          lx.advance();
          continue;
        }
        lx.expect(Tok::RParen, "')' or ','");
        return v;
      }
    }
    case Tok::Keyword: {
      // Typed parameter, e.g. PARAMETER_VALUE(0.5)
      v.kind = PValue::Kind::Typed;
      v.text = lx.tokText;
      lx.advance();
      v.list = parseArgList(lx);
      return v;
    }
    default:
      lx.fail("expected a parameter value");
  }
}

SimpleRecord parseSimpleRecord(Lexer& lx) {
  if (lx.tok != Tok::Keyword) lx.fail("expected entity keyword");
  SimpleRecord rec;
  rec.keyword = lx.tokText;
  lx.advance();
  rec.args = parseArgList(lx);
  return rec;
}

void collectRefs(const PValue& v, std::vector<std::int64_t>& out) {
  if (v.kind == PValue::Kind::Ref) {
    out.push_back(v.integer);
  } else if (v.kind == PValue::Kind::List || v.kind == PValue::Kind::Typed) {
    for (const auto& e : v.list) collectRefs(e, out);
  }
}

}  // namespace

StepEntityGraph parseStep(std::string_view bytes) {
  Lexer lx(bytes);
  StepEntityGraph graph;

  if (lx.tok != Tok::Keyword || lx.tokText != "ISO-10303-21")
    lx.fail("file does not begin with ISO-10303-21");
  lx.advance();
  lx.expect(Tok::Semicolon, "';'");

  // HEADER section (optional in practice, tolerated if absent).
  if (lx.tok == Tok::Keyword && lx.tokText == "HEADER") {
    lx.advance();
    lx.expect(Tok::Semicolon, "';'");
    while (!(lx.tok == Tok::Keyword && lx.tokText == "ENDSEC")) {
      if (lx.tok == Tok::End) lx.fail("unterminated HEADER section");
      graph.header.records.push_back(parseSimpleRecord(lx));
      lx.expect(Tok::Semicolon, "';'");
    }
    lx.advance();
    lx.expect(Tok::Semicolon, "';'");
  }

  if (!(lx.tok == Tok::Keyword && lx.tokText == "DATA")) lx.fail("missing DATA section");
  lx.advance();
  lx.expect(Tok::Semicolon, "';'");

  while (!(lx.tok == Tok::Keyword && lx.tokText == "ENDSEC")) {
    if (lx.tok == Tok::End) lx.fail("unterminated DATA section");
    if (lx.tok != Tok::Ref) lx.fail("expected '#id =' entity instance");
    EntityRecord ent;
    ent.id = lx.tokInt;
    lx.advance();
    lx.expect(Tok::Equals, "'='");
    if (lx.tok == Tok::LParen) {
      // Complex (multi-keyword) instance.
      ent.complex = true;
      lx.advance();
      while (lx.tok == Tok::Keyword) ent.records.push_back(parseSimpleRecord(lx));
      if (ent.records.empty()) lx.fail("empty complex instance");
      lx.expect(Tok::RParen, "')'");
    } else {
      ent.records.push_back(parseSimpleRecord(lx));
    }
    lx.expect(Tok::Semicolon, "';'");
    if (!graph.entities.emplace(ent.id, std::move(ent)).second)
      lx.fail("duplicate instance id #" + std::to_string(ent.id));
  }
  lx.advance();
  lx.expect(Tok::Semicolon, "';'");

  if (lx.tok == Tok::Keyword && lx.tokText == "END-ISO-10303-21") {
    lx.advance();
    lx.expect(Tok::Semicolon, "';'");
  }

  // Every referenced id must resolve.
  std::vector<std::int64_t> refs;
  for (const auto& [id, ent] : graph.entities)
    for (const auto& rec : ent.records)
      for (const auto& a : rec.args) collectRefs(a, refs);
  for (std::int64_t r : refs)
    if (!graph.entities.count(r))
      throw Error("parse", "dangling reference #" + std::to_string(r));

  return graph;
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

namespace {

void writeReal(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  // Keep the real/integer distinction through a round trip.
  if (s.find_first_of(".eE") == std::string::npos) s += ".";
  out += s;
}

void writeValue(std::string& out, const PValue& v) {
  switch (v.kind) {
    case PValue::Kind::Unset: out += "$"; break;
    case PValue::Kind::Derived: out += "*"; break;
    case PValue::Kind::Integer: out += std::to_string(v.integer); break;
    case PValue::Kind::Real: writeReal(out, v.real); break;
    case PValue::Kind::Ref: out += "#" + std::to_string(v.integer); break;
    case PValue::Kind::Enum: out += "." + v.text + "."; break;
    case PValue::Kind::String: {
      out += '\'';
      for (char c : v.text) {
        out += c;
        if (c == '\'') out += c;
      }
      out += '\'';
      break;
    }
    case PValue::Kind::List: {
      out += '(';
      for (std::size_t i = 0; i < v.list.size(); ++i) {
        if (i) out += ',';
        writeValue(out, v.list[i]);
      }
      out += ')';
      break;
    }
    case PValue::Kind::Typed: {
      out += v.text;
      out += '(';
      for (std::size_t i = 0; i < v.list.size(); ++i) {
        if (i) out += ',';
        writeValue(out, v.list[i]);
      }
      out += ')';
      break;
    }
  }
}

void writeRecord(std::string& out, const SimpleRecord& rec) {
  out += rec.keyword;
  out += '(';
  for (std::size_t i = 0; i < rec.args.size(); ++i) {
    if (i) out += ',';
    writeValue(out, rec.args[i]);
  }
  out += ')';
}

}  // namespace

std::string serializeStep(const StepEntityGraph& graph) {
  std::string out;
  out += "ISO-10303-21;\n";
  out += "HEADER;\n";
  for (const auto& rec : graph.header.records) {
    writeRecord(out, rec);
    out += ";\n";
  }
  out += "ENDSEC;\n";
  out += "DATA;\n";
  for (const auto& [id, ent] : graph.entities) {
    out += "#" + std::to_string(id) + "=";
    if (ent.complex) {
      out += '(';
      for (const auto& rec : ent.records) writeRecord(out, rec);
      out += ')';
    } else {
      writeRecord(out, ent.records.front());
    }
    out += ";\n";
  }
  out += "ENDSEC;\n";
  out += "END-ISO-10303-21;\n";
  return out;
}

std::map<std::string, std::int64_t> entityStats(const StepEntityGraph& graph) {
  std::map<std::string, std::int64_t> stats;
  for (const auto& [id, ent] : graph.entities)
    for (const auto& rec : ent.records) ++stats[rec.keyword];
  return stats;
}

}  // namespace steppart
