#pragma once

// Immutable expression trees over chart coordinates x1..x{2n}, with exact
// evaluation and exact first derivatives by dual-number evaluation.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jmetric/error.hpp"

namespace jmetric {

using Point = Eigen::VectorXd;

enum class Op : std::uint8_t { constant, coordinate, neg, sin, cos, exp, add, sub, mul, div, pow };

class Expr {
 public:
  /// The constant 0.
  Expr() : Expr(constant(0.0)) {}

  /// Negative values are stored as neg(|v|) so every constant node prints as a literal.
  static Expr constant(double v) {
    if (!std::isfinite(v)) throw Error("expression constant must be finite");
    if (std::signbit(v) && v != 0.0) return unary(Op::neg, constant(-v));
    return Expr(std::make_shared<const Node>(Node{Op::constant, v == 0.0 ? 0.0 : v, 0, {}}));
  }

  /// Coordinate x_index, 1-based.
  static Expr coordinate(unsigned index) {
    if (index == 0) throw Error("coordinate indices start at 1");
    return Expr(std::make_shared<const Node>(Node{Op::coordinate, 0.0, index, {}}));
  }

  static Expr unary(Op op, Expr arg) {
    if (op != Op::neg && op != Op::sin && op != Op::cos && op != Op::exp)
      throw Error("not a unary operator");
    return Expr(std::make_shared<const Node>(Node{op, 0.0, 0, {std::move(arg)}}));
  }

  static Expr binary(Op op, Expr lhs, Expr rhs) {
    if (op != Op::add && op != Op::sub && op != Op::mul && op != Op::div)
      throw Error("not a binary operator");
    return Expr(std::make_shared<const Node>(Node{op, 0.0, 0, {std::move(lhs), std::move(rhs)}}));
  }

  static Expr power(Expr base, unsigned exponent) {
    return Expr(std::make_shared<const Node>(Node{Op::pow, 0.0, exponent, {std::move(base)}}));
  }

  Op op() const noexcept { return node_->op; }
  double value() const noexcept { return node_->value; }
  /// Coordinate index for Op::coordinate.
  unsigned index() const noexcept { return node_->integer; }
  /// Exponent for Op::pow.
  unsigned exponent() const noexcept { return node_->integer; }
  std::span<const Expr> children() const noexcept { return node_->children; }
  const Expr& child(std::size_t i) const { return node_->children.at(i); }

  /// Largest coordinate index referenced, 0 if none.
  unsigned max_coordinate() const {
    unsigned m = op() == Op::coordinate ? index() : 0;
    for (const auto& c : children()) m = std::max(m, c.max_coordinate());
    return m;
  }

  bool is_zero_constant() const noexcept { return op() == Op::constant && value() == 0.0; }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op() || a.node_->integer != b.node_->integer) return false;
    if (a.op() == Op::constant && a.value() != b.value()) return false;
    auto ca = a.children();
    auto cb = b.children();
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i)
      if (!(ca[i] == cb[i])) return false;
    return true;
  }

 private:
  struct Node {
    Op op;
    double value;
    unsigned integer;
    std::vector<Expr> children;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Builders. These do not simplify; trees are evaluated exactly as written.
inline Expr operator+(Expr a, Expr b) { return Expr::binary(Op::add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(Op::sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::binary(Op::mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return Expr::binary(Op::div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr::unary(Op::neg, std::move(a)); }
inline Expr operator*(double a, Expr b) { return Expr::constant(a) * std::move(b); }
inline Expr operator+(Expr a, double b) { return std::move(a) + Expr::constant(b); }
inline Expr sin(Expr a) { return Expr::unary(Op::sin, std::move(a)); }
inline Expr cos(Expr a) { return Expr::unary(Op::cos, std::move(a)); }
inline Expr exp(Expr a) { return Expr::unary(Op::exp, std::move(a)); }
inline Expr pow(Expr a, unsigned k) { return Expr::power(std::move(a), k); }
inline Expr x(unsigned index) { return Expr::coordinate(index); }

/// Forward-mode dual number, eps^2 = 0.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

namespace detail {

inline double real_part(double v) { return v; }
inline double real_part(Dual v) { return v.v; }

inline double apply_sin(double a) { return std::sin(a); }
inline double apply_cos(double a) { return std::cos(a); }
inline double apply_exp(double a) { return std::exp(a); }
inline Dual apply_sin(Dual a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Dual apply_cos(Dual a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline Dual apply_exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}

inline double apply_pow(double a, unsigned k) {
  double r = 1.0;
  for (unsigned i = 0; i < k; ++i) r *= a;
  return r;
}
inline Dual apply_pow(Dual a, unsigned k) {
  if (k == 0) return {1.0, 0.0};
  const double lower = apply_pow(a.v, k - 1);
  return {lower * a.v, static_cast<double>(k) * lower * a.d};
}

template <class Scalar>
Scalar evaluate(const Expr& e, std::span<const Scalar> x) {
  switch (e.op()) {
    case Op::constant:
      return Scalar{e.value()};
    case Op::coordinate:
      return x[e.index() - 1];
    case Op::neg:
      return -evaluate(e.child(0), x);
    case Op::sin:
      return apply_sin(evaluate(e.child(0), x));
    case Op::cos:
      return apply_cos(evaluate(e.child(0), x));
    case Op::exp:
      return apply_exp(evaluate(e.child(0), x));
    case Op::pow:
      return apply_pow(evaluate(e.child(0), x), e.exponent());
    case Op::add:
      return evaluate(e.child(0), x) + evaluate(e.child(1), x);
    case Op::sub:
      return evaluate(e.child(0), x) - evaluate(e.child(1), x);
    case Op::mul:
      return evaluate(e.child(0), x) * evaluate(e.child(1), x);
    case Op::div: {
      const Scalar den = evaluate(e.child(1), x);
      if (real_part(den) == 0.0) throw EvalError("division by zero");
      return evaluate(e.child(0), x) / den;
    }
  }
  throw Error("corrupt expression node");
}

inline void check_dimension(const Expr& e, const Point& p) {
  if (e.max_coordinate() > static_cast<unsigned>(p.size()))
    throw EvalError("expression references x" + std::to_string(e.max_coordinate()) +
                    " but the point has " + std::to_string(p.size()) + " coordinates");
}

inline std::string point_string(const Point& p) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

}  // namespace detail

/// Value of `e` at `p`.
inline double eval(const Expr& e, const Point& p) {
  detail::check_dimension(e, p);
  try {
    return detail::evaluate<double>(e, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  } catch (const EvalError& err) {
    throw EvalError(std::string(err.what()) + " at " + detail::point_string(p));
  }
}

/// Exact partial derivative d e / d x_axis at `p` (axis is 1-based).
inline double derivative(const Expr& e, const Point& p, unsigned axis) {
  detail::check_dimension(e, p);
  if (axis == 0 || axis > static_cast<unsigned>(p.size())) throw EvalError("derivative axis out of range");
  std::vector<Dual> x(static_cast<std::size_t>(p.size()));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = {p[static_cast<Eigen::Index>(i)], i + 1 == axis ? 1.0 : 0.0};
  try {
    return detail::evaluate<Dual>(e, std::span<const Dual>(x)).d;
  } catch (const EvalError& err) {
    throw EvalError(std::string(err.what()) + " at " + detail::point_string(p));
  }
}

}  // namespace jmetric
