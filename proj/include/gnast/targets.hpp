#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "gnast/trace.hpp"

// Bundled instrumented parsers. Each one calls TraceContext::hit with a
// stable small location id at every decision point; the ids below are fixed
// per release so recorded traces stay comparable. Each target plants exactly
// one fault behind a syntactic predicate; the fault is reported through the
// run result, never by harming the host process.
namespace gnast::targets {

struct RunResult {
  bool crashed = false;
  bool accepted = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// json: a miniature strict JSON parser.
// Seeded fault: an empty object value `{}` occurring as a direct element of
// an array, e.g. `[{}]`.
// ---------------------------------------------------------------------------
namespace jloc {
constexpr std::uint32_t enter = 1, ws = 2, val_bad = 3, obj_open = 4, obj_empty = 5,
                        obj_key_bad = 6, obj_colon = 7, obj_colon_missing = 8, obj_comma = 9,
                        obj_close = 10, obj_bad_sep = 11, arr_open = 12, arr_empty = 13,
                        arr_elem = 14, arr_comma = 15, arr_close = 16, arr_bad_sep = 17,
                        str_open = 18, str_char = 19, str_escape = 20, str_escape_bad = 21,
                        str_ctrl = 22, str_close = 23, str_unterm = 24, num_minus = 25,
                        num_digit = 26, num_frac = 27, num_frac_digit = 28, num_exp = 29,
                        num_exp_digit = 30, num_bad = 31, lit_true = 32, lit_false = 33,
                        lit_null = 34, lit_bad = 35, depth_cap = 36, trailing = 37, accept = 38,
                        fault = 39;
}

class JsonRun {
 public:
  JsonRun(std::string_view in, TraceContext& ctx) : in_(in), ctx_(ctx) {}

  RunResult run() {
    ctx_.hit(jloc::enter);
    Kind k = parse_value();
    if (crashed_) return {true, false, "seeded fault: empty object element in array"};
    if (k == Kind::Error) return {false, false, err_};
    skip_ws();
    if (pos_ != in_.size()) {
      ctx_.hit(jloc::trailing);
      return {false, false, "trailing bytes after value"};
    }
    ctx_.hit(jloc::accept);
    return {false, true, "valid json"};
  }

 private:
  enum class Kind { Object, EmptyObject, Array, String, Number, Literal, Error };

  std::string_view in_;
  TraceContext& ctx_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  bool crashed_ = false;
  std::string err_;

  bool eof() const { return pos_ >= in_.size(); }
  unsigned char cur() const { return static_cast<unsigned char>(in_[pos_]); }

  Kind fail(std::uint32_t loc, const char* msg) {
    ctx_.hit(loc);
    if (err_.empty()) err_ = std::string(msg) + " at byte " + std::to_string(pos_);
    return Kind::Error;
  }

  void skip_ws() {
    while (!eof() && (cur() == ' ' || cur() == '\t' || cur() == '\n' || cur() == '\r')) {
      ctx_.hit(jloc::ws);
      ++pos_;
    }
  }

  Kind parse_value() {
    skip_ws();
    if (eof()) return fail(jloc::val_bad, "missing value");
    unsigned char c = cur();
    if (c == '{') return parse_object();
    if (c == '[') return parse_array();
    if (c == '"') return parse_string();
    if (c == '-' || (c >= '0' && c <= '9')) return parse_number();
    if (c == 't') return parse_literal("true", jloc::lit_true);
    if (c == 'f') return parse_literal("false", jloc::lit_false);
    if (c == 'n') return parse_literal("null", jloc::lit_null);
    return fail(jloc::val_bad, "unexpected byte");
  }

  Kind parse_object() {
    if (++depth_ > 64) return fail(jloc::depth_cap, "nesting too deep");
    ctx_.hit(jloc::obj_open);
    ++pos_;
    skip_ws();
    if (!eof() && cur() == '}') {
      ctx_.hit(jloc::obj_empty);
      ++pos_;
      --depth_;
      return Kind::EmptyObject;
    }
    for (;;) {
      skip_ws();
      if (eof() || cur() != '"') return fail(jloc::obj_key_bad, "expected object key");
      if (parse_string() == Kind::Error) return Kind::Error;
      skip_ws();
      if (eof() || cur() != ':') return fail(jloc::obj_colon_missing, "expected ':'");
      ctx_.hit(jloc::obj_colon);
      ++pos_;
      if (parse_value() == Kind::Error || crashed_) return Kind::Error;
      skip_ws();
      if (!eof() && cur() == ',') {
        ctx_.hit(jloc::obj_comma);
        ++pos_;
        continue;
      }
      if (!eof() && cur() == '}') {
        ctx_.hit(jloc::obj_close);
        ++pos_;
        --depth_;
        return Kind::Object;
      }
      return fail(jloc::obj_bad_sep, "expected ',' or '}'");
    }
  }

  Kind parse_array() {
    if (++depth_ > 64) return fail(jloc::depth_cap, "nesting too deep");
    ctx_.hit(jloc::arr_open);
    ++pos_;
    skip_ws();
    if (!eof() && cur() == ']') {
      ctx_.hit(jloc::arr_empty);
      ++pos_;
      --depth_;
      return Kind::Array;
    }
    for (;;) {
      Kind k = parse_value();
      if (k == Kind::Error || crashed_) return Kind::Error;
      ctx_.hit(jloc::arr_elem);
      if (k == Kind::EmptyObject) {
        ctx_.hit(jloc::fault);
        crashed_ = true;
        return Kind::Error;
      }
      skip_ws();
      if (!eof() && cur() == ',') {
        ctx_.hit(jloc::arr_comma);
        ++pos_;
        continue;
      }
      if (!eof() && cur() == ']') {
        ctx_.hit(jloc::arr_close);
        ++pos_;
        --depth_;
        return Kind::Array;
      }
      return fail(jloc::arr_bad_sep, "expected ',' or ']'");
    }
  }

  Kind parse_string() {
    ctx_.hit(jloc::str_open);
    ++pos_;
    while (!eof()) {
      unsigned char c = cur();
      if (c == '"') {
        ctx_.hit(jloc::str_close);
        ++pos_;
        return Kind::String;
      }
      if (c == '\\') {
        ++pos_;
        if (eof()) break;
        unsigned char e = cur();
        if (e == '"' || e == '\\' || e == '/' || e == 'b' || e == 'f' || e == 'n' ||
            e == 'r' || e == 't') {
          ctx_.hit(jloc::str_escape);
          ++pos_;
          continue;
        }
        if (e == 'u') {
          ++pos_;
          for (int i = 0; i < 4; ++i) {
            if (eof() || !std::isxdigit(cur()))
              return fail(jloc::str_escape_bad, "bad \\u escape");
            ++pos_;
          }
          ctx_.hit(jloc::str_escape);
          continue;
        }
        return fail(jloc::str_escape_bad, "bad escape");
      }
      if (c < 0x20) return fail(jloc::str_ctrl, "control byte in string");
      ctx_.hit(jloc::str_char);
      ++pos_;
    }
    return fail(jloc::str_unterm, "unterminated string");
  }

  Kind parse_number() {
    if (cur() == '-') {
      ctx_.hit(jloc::num_minus);
      ++pos_;
    }
    if (eof() || !std::isdigit(cur())) return fail(jloc::num_bad, "digit expected");
    while (!eof() && std::isdigit(cur())) {
      ctx_.hit(jloc::num_digit);
      ++pos_;
    }
    if (!eof() && cur() == '.') {
      ctx_.hit(jloc::num_frac);
      ++pos_;
      if (eof() || !std::isdigit(cur())) return fail(jloc::num_bad, "digit expected after '.'");
      while (!eof() && std::isdigit(cur())) {
        ctx_.hit(jloc::num_frac_digit);
        ++pos_;
      }
    }
    if (!eof() && (cur() == 'e' || cur() == 'E')) {
      ctx_.hit(jloc::num_exp);
      ++pos_;
      if (!eof() && (cur() == '+' || cur() == '-')) ++pos_;
      if (eof() || !std::isdigit(cur())) return fail(jloc::num_bad, "digit expected in exponent");
      while (!eof() && std::isdigit(cur())) {
        ctx_.hit(jloc::num_exp_digit);
        ++pos_;
      }
    }
    return Kind::Number;
  }

  Kind parse_literal(std::string_view word, std::uint32_t loc) {
    if (in_.substr(pos_, word.size()) != word) return fail(jloc::lit_bad, "bad literal");
    ctx_.hit(loc);
    pos_ += word.size();
    return Kind::Literal;
  }
};

inline RunResult run_json(std::string_view in, TraceContext& ctx) {
  return JsonRun(in, ctx).run();
}

// ---------------------------------------------------------------------------
// xmlite: a miniature XML fragment scanner with element matching.
// Seeded fault: a closing tag with an empty name, `</>`.
// ---------------------------------------------------------------------------
namespace xloc {
constexpr std::uint32_t enter = 41, text = 42, lt = 43, open_name = 44, open_done = 45,
                        attr_name = 46, attr_eq = 47, attr_val = 48, attr_quote = 49,
                        attr_bad = 50, selfclose = 51, close_start = 52, close_name = 53,
                        close_match = 54, close_mismatch = 55, stray_close = 56,
                        comment_char = 57, comment_end = 58, comment_unterm = 59, pi_char = 60,
                        pi_end = 61, pi_unterm = 62, ent_char = 63, ent_ok = 64, ent_bad = 65,
                        bad_markup = 66, tag_unterm = 67, unclosed = 68, no_root = 69,
                        depth_cap = 70, accept = 71, fault = 72;
}

class XmliteRun {
 public:
  XmliteRun(std::string_view in, TraceContext& ctx) : in_(in), ctx_(ctx) {}

  RunResult run() {
    ctx_.hit(xloc::enter);
    while (pos_ < in_.size()) {
      if (!step()) break;
    }
    if (crashed_) return {true, false, "seeded fault: empty-name closing tag"};
    if (!err_.empty()) return {false, false, err_};
    if (!stack_.empty()) {
      ctx_.hit(xloc::unclosed);
      return {false, false, "unclosed element <" + stack_.back() + ">"};
    }
    if (!saw_element_) {
      ctx_.hit(xloc::no_root);
      return {false, false, "no element found"};
    }
    ctx_.hit(xloc::accept);
    return {false, true, "well-formed fragment"};
  }

 private:
  std::string_view in_;
  TraceContext& ctx_;
  std::size_t pos_ = 0;
  std::vector<std::string> stack_;
  bool saw_element_ = false;
  bool crashed_ = false;
  std::string err_;

  bool eof() const { return pos_ >= in_.size(); }
  unsigned char cur() const { return static_cast<unsigned char>(in_[pos_]); }

  bool fail(std::uint32_t loc, std::string msg) {
    ctx_.hit(loc);
    err_ = std::move(msg) + " at byte " + std::to_string(pos_);
    return false;
  }

  static bool name_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':';
  }

  bool step() {
    unsigned char c = cur();
    if (c == '<') {
      ctx_.hit(xloc::lt);
      ++pos_;
      return markup();
    }
    if (c == '&') return entity();
    ctx_.hit(xloc::text);
    ++pos_;
    return true;
  }

  bool entity() {
    ++pos_;
    for (int i = 0; i < 8 && !eof(); ++i) {
      if (cur() == ';') {
        ctx_.hit(xloc::ent_ok);
        ++pos_;
        return true;
      }
      if (!std::isalnum(cur()) && cur() != '#') break;
      ctx_.hit(xloc::ent_char);
      ++pos_;
    }
    return fail(xloc::ent_bad, "bad entity reference");
  }

  bool markup() {
    if (eof()) return fail(xloc::bad_markup, "dangling '<'");
    unsigned char c = cur();
    if (c == '!') return comment();
    if (c == '?') return instruction();
    if (c == '/') return closing();
    return opening();
  }

  bool comment() {
    ++pos_;
    if (in_.substr(pos_, 2) != "--") return fail(xloc::bad_markup, "expected comment");
    pos_ += 2;
    while (pos_ + 2 < in_.size() + 1) {
      if (in_.substr(pos_, 3) == "-->") {
        ctx_.hit(xloc::comment_end);
        pos_ += 3;
        return true;
      }
      if (pos_ >= in_.size()) break;
      ctx_.hit(xloc::comment_char);
      ++pos_;
    }
    return fail(xloc::comment_unterm, "unterminated comment");
  }

  bool instruction() {
    ++pos_;
    while (pos_ < in_.size()) {
      if (cur() == '?' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '>') {
        ctx_.hit(xloc::pi_end);
        pos_ += 2;
        return true;
      }
      ctx_.hit(xloc::pi_char);
      ++pos_;
    }
    return fail(xloc::pi_unterm, "unterminated processing instruction");
  }

  bool closing() {
    ctx_.hit(xloc::close_start);
    ++pos_;
    std::string name;
    while (!eof() && name_char(cur())) {
      ctx_.hit(xloc::close_name);
      name.push_back(static_cast<char>(cur()));
      ++pos_;
    }
    if (name.empty() && !eof() && cur() == '>') {
      ctx_.hit(xloc::fault);
      crashed_ = true;
      return false;
    }
    if (eof() || cur() != '>') return fail(xloc::bad_markup, "malformed closing tag");
    ++pos_;
    if (stack_.empty()) return fail(xloc::stray_close, "closing tag without open element");
    if (stack_.back() != name) {
      return fail(xloc::close_mismatch, "mismatched closing tag </" + name + ">");
    }
    ctx_.hit(xloc::close_match);
    stack_.pop_back();
    return true;
  }

  bool opening() {
    std::string name;
    if (eof() || !(std::isalpha(cur()) || cur() == '_'))
      return fail(xloc::bad_markup, "bad tag name");
    while (!eof() && name_char(cur())) {
      ctx_.hit(xloc::open_name);
      name.push_back(static_cast<char>(cur()));
      ++pos_;
    }
    for (;;) {
      while (!eof() && std::isspace(cur())) ++pos_;
      if (eof()) return fail(xloc::tag_unterm, "unterminated tag");
      if (cur() == '/') {
        ++pos_;
        if (eof() || cur() != '>') return fail(xloc::bad_markup, "expected '/>'");
        ctx_.hit(xloc::selfclose);
        ++pos_;
        saw_element_ = true;
        return true;
      }
      if (cur() == '>') {
        ctx_.hit(xloc::open_done);
        ++pos_;
        saw_element_ = true;
        if (stack_.size() >= 64) return fail(xloc::depth_cap, "nesting too deep");
        stack_.push_back(name);
        return true;
      }
      if (!std::isalpha(cur()) && cur() != '_') return fail(xloc::attr_bad, "bad attribute");
      while (!eof() && name_char(cur())) {
        ctx_.hit(xloc::attr_name);
        ++pos_;
      }
      while (!eof() && std::isspace(cur())) ++pos_;
      if (eof() || cur() != '=') return fail(xloc::attr_bad, "expected '='");
      ctx_.hit(xloc::attr_eq);
      ++pos_;
      while (!eof() && std::isspace(cur())) ++pos_;
      if (eof() || (cur() != '"' && cur() != '\'')) return fail(xloc::attr_bad, "expected quote");
      unsigned char q = cur();
      ++pos_;
      while (!eof() && cur() != q) {
        if (cur() == '<') return fail(xloc::attr_bad, "'<' in attribute value");
        ctx_.hit(xloc::attr_val);
        ++pos_;
      }
      if (eof()) return fail(xloc::attr_bad, "unterminated attribute value");
      ctx_.hit(xloc::attr_quote);
      ++pos_;
    }
  }
};

inline RunResult run_xmlite(std::string_view in, TraceContext& ctx) {
  return XmliteRun(in, ctx).run();
}

// ---------------------------------------------------------------------------
// csub: a lenient tokenizer for a C-like language that checks bracket
// balance and comment/string termination, in the spirit of a minimal lint.
// Seeded fault: an empty parenthesis group `()` (no tokens between the
// parentheses; whitespace and comments may separate them).
// ---------------------------------------------------------------------------
namespace cloc {
constexpr std::uint32_t enter = 81, ws = 82, ident_start = 83, ident_char = 84, num_char = 85,
                        str_open = 86, str_char = 87, str_esc = 88, str_close = 89,
                        str_unterm = 90, str_nl = 91, chr_open = 92, chr_char = 93,
                        chr_close = 94, chr_unterm = 95, lcomment = 96, bcomment_char = 97,
                        bcomment_close = 98, bcomment_unterm = 99, semi = 100, lbrace = 101,
                        rbrace = 102, lparen = 103, rparen = 104, lbrack = 105, rbrack = 106,
                        op_arith = 107, op_cmp = 108, op_logic = 109, op_other = 110,
                        hash = 111, bad_byte = 112, stray_closer = 113, unbalanced = 114,
                        accept = 115, fault = 116, kw_first = 120;
// kw_first..kw_first+7: if else while for return int char void
}

class CsubRun {
 public:
  CsubRun(std::string_view in, TraceContext& ctx) : in_(in), ctx_(ctx) {}

  RunResult run() {
    ctx_.hit(cloc::enter);
    while (pos_ < in_.size() && !crashed_ && !hard_stop_) next_token();
    if (crashed_) return {true, false, "seeded fault: empty parenthesis group"};
    if (!err_.empty()) return {false, false, err_};
    if (paren_ != 0 || brace_ != 0) {
      ctx_.hit(cloc::unbalanced);
      return {false, false, "unbalanced brackets at end of input"};
    }
    ctx_.hit(cloc::accept);
    return {false, true, "token stream accepted"};
  }

 private:
  std::string_view in_;
  TraceContext& ctx_;
  std::size_t pos_ = 0;
  int paren_ = 0;
  int brace_ = 0;
  bool last_was_lparen_ = false;
  bool crashed_ = false;
  bool hard_stop_ = false;
  std::string err_;

  bool eof() const { return pos_ >= in_.size(); }
  unsigned char cur() const { return static_cast<unsigned char>(in_[pos_]); }

  void soft_error(std::uint32_t loc, std::string msg) {
    ctx_.hit(loc);
    if (err_.empty()) err_ = std::move(msg) + " at byte " + std::to_string(pos_);
  }

  void hard_error(std::uint32_t loc, std::string msg) {
    soft_error(loc, std::move(msg));
    hard_stop_ = true;
  }

  void token_seen(bool is_lparen) { last_was_lparen_ = is_lparen; }

  void next_token() {
    unsigned char c = cur();
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
      ctx_.hit(cloc::ws);
      ++pos_;
      return;
    }
    if (c >= 128) {
      soft_error(cloc::bad_byte, "non-ascii byte");
      ++pos_;
      token_seen(false);
      return;
    }
    if (std::isalpha(c) || c == '_') return ident();
    if (std::isdigit(c)) return number();
    if (c == '"') return string_lit();
    if (c == '\'') return char_lit();
    if (c == '/') return slash();
    punct(c);
  }

  void ident() {
    std::size_t start = pos_;
    ctx_.hit(cloc::ident_start);
    ++pos_;
    while (!eof() && (std::isalnum(cur()) || cur() == '_')) {
      ctx_.hit(cloc::ident_char);
      ++pos_;
    }
    static constexpr std::array<std::string_view, 8> kw = {
        "if", "else", "while", "for", "return", "int", "char", "void"};
    std::string_view word = in_.substr(start, pos_ - start);
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (word == kw[i]) {
        ctx_.hit(cloc::kw_first + static_cast<std::uint32_t>(i));
        break;
      }
    }
    token_seen(false);
  }

  void number() {
    while (!eof() && (std::isalnum(cur()) || cur() == '.')) {
      ctx_.hit(cloc::num_char);
      ++pos_;
    }
    token_seen(false);
  }

  void string_lit() {
    ctx_.hit(cloc::str_open);
    ++pos_;
    while (!eof()) {
      unsigned char c = cur();
      if (c == '"') {
        ctx_.hit(cloc::str_close);
        ++pos_;
        token_seen(false);
        return;
      }
      if (c == '\n') {
        soft_error(cloc::str_nl, "newline in string literal");
        ++pos_;
        token_seen(false);
        return;
      }
      if (c == '\\' && pos_ + 1 < in_.size()) {
        ctx_.hit(cloc::str_esc);
        pos_ += 2;
        continue;
      }
      ctx_.hit(cloc::str_char);
      ++pos_;
    }
    hard_error(cloc::str_unterm, "unterminated string literal");
  }

  void char_lit() {
    ctx_.hit(cloc::chr_open);
    ++pos_;
    int n = 0;
    while (!eof() && n < 4) {
      if (cur() == '\'') {
        ctx_.hit(cloc::chr_close);
        ++pos_;
        token_seen(false);
        return;
      }
      if (cur() == '\\' && pos_ + 1 < in_.size()) pos_ += 2;
      else ++pos_;
      ctx_.hit(cloc::chr_char);
      ++n;
    }
    soft_error(cloc::chr_unterm, "unterminated character literal");
    token_seen(false);
  }

  void slash() {
    if (pos_ + 1 < in_.size() && in_[pos_ + 1] == '/') {
      ctx_.hit(cloc::lcomment);
      pos_ += 2;
      while (!eof() && cur() != '\n') ++pos_;
      return;  // comments are not tokens
    }
    if (pos_ + 1 < in_.size() && in_[pos_ + 1] == '*') {
      pos_ += 2;
      while (pos_ + 1 < in_.size()) {
        if (in_[pos_] == '*' && in_[pos_ + 1] == '/') {
          ctx_.hit(cloc::bcomment_close);
          pos_ += 2;
          return;
        }
        ctx_.hit(cloc::bcomment_char);
        ++pos_;
      }
      pos_ = in_.size();
      hard_error(cloc::bcomment_unterm, "unterminated block comment");
      return;
    }
    ctx_.hit(cloc::op_arith);
    ++pos_;
    token_seen(false);
  }

  void punct(unsigned char c) {
    ++pos_;
    switch (c) {
      case ';': ctx_.hit(cloc::semi); break;
      case '{': ctx_.hit(cloc::lbrace); ++brace_; break;
      case '}':
        ctx_.hit(cloc::rbrace);
        if (--brace_ < 0) {
          soft_error(cloc::stray_closer, "unmatched '}'");
          brace_ = 0;
        }
        break;
      case '(':
        ctx_.hit(cloc::lparen);
        ++paren_;
        token_seen(true);
        return;
      case ')':
        ctx_.hit(cloc::rparen);
        if (last_was_lparen_) {
          ctx_.hit(cloc::fault);
          crashed_ = true;
          return;
        }
        if (--paren_ < 0) {
          soft_error(cloc::stray_closer, "unmatched ')'");
          paren_ = 0;
        }
        break;
      case '[': ctx_.hit(cloc::lbrack); break;
      case ']': ctx_.hit(cloc::rbrack); break;
      case '+': case '-': case '*': case '%': ctx_.hit(cloc::op_arith); break;
      case '<': case '>': case '=': case '!': ctx_.hit(cloc::op_cmp); break;
      case '&': case '|': case '^': case '~': ctx_.hit(cloc::op_logic); break;
      case '#': ctx_.hit(cloc::hash); break;
      default: ctx_.hit(cloc::op_other); break;
    }
    token_seen(false);
  }
};

inline RunResult run_csub(std::string_view in, TraceContext& ctx) {
  return CsubRun(in, ctx).run();
}

}  // namespace gnast::targets
