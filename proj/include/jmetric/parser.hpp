#pragma once

// Recursive-descent parser and canonical printer for the field grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' uint)?
//   base   := real | 'x' uint | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')' | '-' base
//
// Whitespace is insignificant. print() emits text that parses back to the same tree.

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>

#include "jmetric/expr.hpp"

namespace jmetric {

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::size_t dim) : text_(text), dim_(dim) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool is_digit(std::size_t at) const {
    return at < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at]));
  }

  unsigned uint_literal() {
    skip_ws();
    const std::size_t start = pos_;
    while (is_digit(pos_)) ++pos_;
    if (start == pos_) fail("expected an unsigned integer");
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("integer out of range");
    }
    return v;
  }

  Expr real_literal() {
    const std::size_t start = pos_;
    while (is_digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ - start == 1 && text_[start] == '.') {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (is_digit(look)) {
        pos_ = look;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc{} || ptr != text_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(v);
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = Expr::binary(Op::add, lhs, term());
      else if (accept('-'))
        lhs = Expr::binary(Op::sub, lhs, term());
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = Expr::binary(Op::mul, lhs, factor());
      else if (accept('/'))
        lhs = Expr::binary(Op::div, lhs, factor());
      else
        return lhs;
    }
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) return Expr::power(b, uint_literal());
    return b;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::unary(Op::neg, base());
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return real_literal();
    if (c == 'x') {
      const std::size_t start = pos_;
      ++pos_;
      if (!is_digit(pos_)) fail("expected coordinate index after 'x'");
      const unsigned idx = uint_literal();
      if (idx < 1 || idx > dim_) {
        pos_ = start;
        fail("coordinate index x" + std::to_string(idx) + " out of range 1.." + std::to_string(dim_));
      }
      return Expr::coordinate(idx);
    }
    for (auto [name, op] : {std::pair{"sin", Op::sin}, std::pair{"cos", Op::cos}, std::pair{"exp", Op::exp}}) {
      const std::string_view n(name);
      if (text_.substr(pos_, n.size()) == n) {
        pos_ += n.size();
        expect('(');
        Expr arg = expr();
        expect(')');
        return Expr::unary(op, arg);
      }
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

// Binding strength of each printed form.
enum Level { sum_level = 0, product_level = 1, factor_level = 2, base_level = 3 };

inline Level level_of(const Expr& e) {
  switch (e.op()) {
    case Op::add:
    case Op::sub:
      return sum_level;
    case Op::mul:
    case Op::div:
      return product_level;
    case Op::pow:
      return factor_level;
    default:
      return base_level;
  }
}

inline std::string number_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void print_into(std::string& out, const Expr& e, Level needed);

inline void print_child(std::string& out, const Expr& e, Level needed) {
  if (level_of(e) < needed) {
    out += '(';
    print_into(out, e, sum_level);
    out += ')';
  } else {
    print_into(out, e, needed);
  }
}

inline void print_into(std::string& out, const Expr& e, Level) {
  switch (e.op()) {
    case Op::constant:
      out += number_text(e.value());
      return;
    case Op::coordinate:
      out += 'x';
      out += std::to_string(e.index());
      return;
    case Op::neg:
      out += '-';
      print_child(out, e.child(0), base_level);
      return;
    case Op::sin:
    case Op::cos:
    case Op::exp:
      out += e.op() == Op::sin ? "sin(" : e.op() == Op::cos ? "cos(" : "exp(";
      print_into(out, e.child(0), sum_level);
      out += ')';
      return;
    case Op::pow:
      print_child(out, e.child(0), base_level);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Op::add:
    case Op::sub:
      print_child(out, e.child(0), sum_level);
      out += e.op() == Op::add ? " + " : " - ";
      print_child(out, e.child(1), product_level);
      return;
    case Op::mul:
    case Op::div:
      print_child(out, e.child(0), product_level);
      out += e.op() == Op::mul ? '*' : '/';
      print_child(out, e.child(1), factor_level);
      return;
  }
}

}  // namespace detail

/// Parses `text` over a chart of dimension `dim`; throws ParseError with the byte offset.
inline Expr parse_expression(std::string_view text, std::size_t dim) {
  if (dim < 2) throw Error("chart dimension must be at least 2");
  return detail::Parser(text, dim).parse();
}

/// Canonical text form: minimal parentheses, shortest round-trip numerals.
inline std::string print(const Expr& e) {
  std::string out;
  detail::print_into(out, e, detail::sum_level);
  return out;
}

}  // namespace jmetric
