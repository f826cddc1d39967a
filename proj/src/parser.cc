/* Copyright 2026 The partirc Authors.

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

#include "partir/parser.h"

#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "partir/error.h"
#include "partir/validate.h"

namespace partir {
namespace {

enum class Tok {
  kIdent,    // func, mesh, tile, op names, ...
  kValue,    // %name
  kAt,       // @
  kString,   // "..."
  kNumber,   // integer or floating literal
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kLBracket,
  kRBracket,
  kComma,
  kColon,
  kEquals,
  kArrow,    // ->
  kEnd,
};

struct Token {
  Tok tok;
  std::string text;
  double number = 0.;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) {
      t.tok = Tok::kEnd;
      return t;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': t.tok = Tok::kLParen; advance(); return t;
      case ')': t.tok = Tok::kRParen; advance(); return t;
      case '{': t.tok = Tok::kLBrace; advance(); return t;
      case '}': t.tok = Tok::kRBrace; advance(); return t;
      case '[': t.tok = Tok::kLBracket; advance(); return t;
      case ']': t.tok = Tok::kRBracket; advance(); return t;
      case ',': t.tok = Tok::kComma; advance(); return t;
      case ':': t.tok = Tok::kColon; advance(); return t;
      case '=': t.tok = Tok::kEquals; advance(); return t;
      case '@': t.tok = Tok::kAt; advance(); return t;
      case '%': {
        advance();
        t.tok = Tok::kValue;
        t.text = lex_ident_chars();
        if (t.text.empty()) error(t, "expected value name after '%'");
        return t;
      }
      case '"': {
        advance();
        t.tok = Tok::kString;
        while (pos_ < text_.size() && text_[pos_] != '"') {
          t.text += text_[pos_];
          advance();
        }
        if (pos_ >= text_.size()) error(t, "unterminated string");
        advance();
        return t;
      }
      default: break;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      advance();
      advance();
      t.tok = Tok::kArrow;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      t.tok = Tok::kNumber;
      size_t start = pos_;
      if (c == '-' || c == '+') advance();
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E' ||
              ((text_[pos_] == '-' || text_[pos_] == '+') &&
               (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
        advance();
      t.text = std::string(text_.substr(start, pos_ - start));
      auto first = t.text.data();
      auto last = first + t.text.size();
      auto [ptr, ec] = std::from_chars(first, last, t.number);
      if (ec != std::errc() || ptr != last) error(t, "malformed number");
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.tok = Tok::kIdent;
      t.text = lex_ident_chars();
      return t;
    }
    error(t, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] static void error(const Token& at, const std::string& msg) {
    throw ParseError(at.line, at.column, msg);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string lex_ident_chars() {
    std::string out;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_' || text_[pos_] == '.' || text_[pos_] == '/')) {
      out += text_[pos_];
      advance();
    }
    return out;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  Program parse() {
    Program p;
    if (cur_.tok == Tok::kIdent && cur_.text == "mesh") {
      advance();
      parse_mesh(p.mesh);
    }
    expect_ident("func");
    expect(Tok::kAt, "'@'");
    p.name = expect(Tok::kIdent, "function name").text;
    expect(Tok::kLParen, "'('");
    while (cur_.tok != Tok::kRParen) {
      Argument a;
      a.id = expect(Tok::kValue, "argument name").text;
      expect(Tok::kColon, "':'");
      a.type = parse_type();
      if (cur_.tok == Tok::kLBrace) {
        advance();
        expect_ident("scope");
        expect(Tok::kEquals, "'='");
        a.scope = expect(Tok::kString, "scope string").text;
        expect(Tok::kRBrace, "'}'");
      }
      p.args.push_back(std::move(a));
      if (cur_.tok == Tok::kComma) advance();
      else break;
    }
    expect(Tok::kRParen, "')'");
    expect(Tok::kArrow, "'->'");
    parse_type();  // declared function result type; value types authoritative
    expect(Tok::kLBrace, "'{'");
    parse_body(p.ops, p.result_id, /*in_region=*/false);
    if (cur_.tok != Tok::kEnd)
      Lexer::error(cur_, "trailing input after function body");
    return p;
  }

 private:
  void parse_mesh(Mesh& mesh) {
    expect(Tok::kLBrace, "'{'");
    while (cur_.tok != Tok::kRBrace) {
      MeshAxis axis;
      axis.name = expect(Tok::kString, "axis name string").text;
      expect(Tok::kEquals, "'='");
      axis.size = expect_int("axis size");
      mesh.axes.push_back(std::move(axis));
      if (cur_.tok == Tok::kComma) advance();
      else break;
    }
    expect(Tok::kRBrace, "'}'");
  }

  TensorType parse_type() {
    Token t = expect(Tok::kIdent, "type");
    if (t.text != "f32") Lexer::error(t, "unknown element type '" + t.text + "'");
    expect(Tok::kLBracket, "'['");
    TensorType type;
    while (cur_.tok != Tok::kRBracket) {
      type.shape.push_back(expect_int("dimension"));
      if (cur_.tok == Tok::kComma) advance();
      else break;
    }
    expect(Tok::kRBracket, "']'");
    return type;
  }

  // Parses until the closing '}' of a body. Top-level bodies end with
  // `return %v`; region bodies end with `yield %v`.
  void parse_body(std::vector<Operation>& ops, std::string& terminator_id,
                  bool in_region) {
    const char* term = in_region ? "yield" : "return";
    while (true) {
      if (cur_.tok == Tok::kIdent && cur_.text == term) {
        advance();
        terminator_id = expect(Tok::kValue, "terminator value").text;
        expect(Tok::kRBrace, "'}'");
        return;
      }
      Token at = cur_;
      if (cur_.tok != Tok::kValue)
        Lexer::error(cur_, std::string("expected op definition or '") + term +
                               "'");
      Operation op;
      op.id = cur_.text;
      advance();
      expect(Tok::kEquals, "'='");
      parse_op(op, at);
      ops.push_back(std::move(op));
    }
  }

  void parse_op(Operation& op, const Token& at) {
    Token kind_tok = expect(Tok::kIdent, "op kind");
    auto kind = kind_from_name(kind_tok.text);
    if (!kind) Lexer::error(kind_tok, "unknown op '" + kind_tok.text + "'");
    op.kind = *kind;
    switch (op.kind) {
      case OpKind::kTile: {
        op.axis = expect(Tok::kString, "axis").text;
        expect_ident("dim");
        op.dim = static_cast<int>(expect_int("concat dim"));
        expect(Tok::kLParen, "'('");
        op.index_var = expect(Tok::kValue, "index variable").text;
        expect(Tok::kRParen, "')'");
        expect(Tok::kLBrace, "'{'");
        parse_body(op.body, op.yield_id, /*in_region=*/true);
        expect(Tok::kColon, "':'");
        op.result_type = parse_type();
        return;
      }
      case OpKind::kSum: {
        op.axis = expect(Tok::kString, "axis").text;
        expect(Tok::kLParen, "'('");
        op.index_var = expect(Tok::kValue, "index variable").text;
        expect(Tok::kRParen, "')'");
        expect(Tok::kLBrace, "'{'");
        parse_body(op.body, op.yield_id, /*in_region=*/true);
        expect(Tok::kColon, "':'");
        op.result_type = parse_type();
        return;
      }
      case OpKind::kAtomic: {
        expect(Tok::kLBrace, "'{'");
        expect_ident("yield");
        op.yield_id = expect(Tok::kValue, "yielded value").text;
        expect(Tok::kRBrace, "'}'");
        if (cur_.tok == Tok::kColon) {  // optional type annotation
          advance();
          op.result_type = parse_type();
        } else {
          op.result_type.shape.clear();  // filled from the yielded value
        }
        return;
      }
      case OpKind::kSliceAxis: {
        expect(Tok::kLParen, "'('");
        op.operands.push_back(expect(Tok::kValue, "operand").text);
        expect(Tok::kComma, "','");
        expect_ident("dim");
        expect(Tok::kEquals, "'='");
        op.dim = static_cast<int>(expect_int("dim"));
        expect(Tok::kComma, "','");
        op.index_var = expect(Tok::kValue, "index variable").text;
        expect(Tok::kRParen, "')'");
        expect(Tok::kColon, "':'");
        op.result_type = parse_type();
        return;
      }
      case OpKind::kAllReduce:
      case OpKind::kAllGather:
      case OpKind::kSliceByCoord:
        Lexer::error(at, "SPMD ops cannot appear in the textual input form");
      default:
        break;
    }
    expect(Tok::kLParen, "'('");
    while (cur_.tok != Tok::kRParen) {
      op.operands.push_back(expect(Tok::kValue, "operand").text);
      if (cur_.tok == Tok::kComma) advance();
      else break;
    }
    expect(Tok::kRParen, "')'");
    if (cur_.tok == Tok::kLBrace) parse_attrs(op);
    expect(Tok::kColon, "':'");
    op.result_type = parse_type();
  }

  void parse_attrs(Operation& op) {
    expect(Tok::kLBrace, "'{'");
    while (cur_.tok != Tok::kRBrace) {
      Token key = expect(Tok::kIdent, "attribute name");
      expect(Tok::kEquals, "'='");
      if (key.text == "contract") {
        parse_int_list_pair(op.dot.lhs_contract, op.dot.rhs_contract);
      } else if (key.text == "batch") {
        parse_int_list_pair(op.dot.lhs_batch, op.dot.rhs_batch);
      } else if (key.text == "dims" || key.text == "perm" ||
                 key.text == "map") {
        parse_int_list(op.dims);
      } else if (key.text == "start") {
        parse_int64_list(op.start);
      } else if (key.text == "limit") {
        parse_int64_list(op.limit);
      } else if (key.text == "dim") {
        op.dim = static_cast<int>(expect_int("dim"));
      } else if (key.text == "value") {
        Token v = expect(Tok::kNumber, "number");
        op.value = v.number;
      } else if (key.text == "scope") {
        op.scope = expect(Tok::kString, "scope string").text;
      } else {
        Lexer::error(key, "unknown attribute '" + key.text + "'");
      }
      if (cur_.tok == Tok::kComma) advance();
      else break;
    }
    expect(Tok::kRBrace, "'}'");
  }

  void parse_int_list(std::vector<int>& out) {
    expect(Tok::kLBracket, "'['");
    while (cur_.tok != Tok::kRBracket) {
      out.push_back(static_cast<int>(expect_int("integer")));
      if (cur_.tok == Tok::kComma) advance();
      else break;
    }
    expect(Tok::kRBracket, "']'");
  }

  void parse_int64_list(std::vector<int64_t>& out) {
    expect(Tok::kLBracket, "'['");
    while (cur_.tok != Tok::kRBracket) {
      out.push_back(expect_int("integer"));
      if (cur_.tok == Tok::kComma) advance();
      else break;
    }
    expect(Tok::kRBracket, "']'");
  }

  void parse_int_list_pair(std::vector<int>& a, std::vector<int>& b) {
    expect(Tok::kLBracket, "'['");
    parse_int_list(a);
    expect(Tok::kComma, "','");
    parse_int_list(b);
    expect(Tok::kRBracket, "']'");
  }

  int64_t expect_int(const char* what) {
    Token t = expect(Tok::kNumber, what);
    int64_t v = 0;
    auto first = t.text.data();
    auto last = first + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      Lexer::error(t, std::string("expected integer ") + what);
    return v;
  }

  Token expect(Tok tok, const char* what) {
    if (cur_.tok != tok)
      Lexer::error(cur_, std::string("expected ") + what);
    Token t = cur_;
    advance();
    return t;
  }

  void expect_ident(const char* name) {
    if (cur_.tok != Tok::kIdent || cur_.text != name)
      Lexer::error(cur_, std::string("expected '") + name + "'");
    advance();
  }

  void advance() { cur_ = lexer_.next(); }

  Lexer lexer_;
  Token cur_;
};

// Atomic result types are optional in the text; fill them in from the
// yielded value before validation.
void resolve_atomic_types(Program& p) {
  std::map<std::string, TensorType> types;
  for (const Argument& a : p.args) types[a.id] = a.type;
  std::function<void(std::vector<Operation>&)> fix =
      [&](std::vector<Operation>& ops) {
        for (Operation& op : ops) {
          if (!op.body.empty()) fix(op.body);
          if (op.kind == OpKind::kAtomic && op.result_type.shape.empty()) {
            auto it = types.find(op.yield_id);
            if (it != types.end()) op.result_type = it->second;
          }
          types[op.id] = op.result_type;
        }
      };
  fix(p.ops);
}

}  // namespace

Program parse_program(std::string_view text) {
  Parser parser(text);
  Program p = parser.parse();
  resolve_atomic_types(p);
  validate(p);
  return p;
}

}  // namespace partir
