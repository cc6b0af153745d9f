#pragma once

// Shared test oracles: random expression trees, finite differences, exact rational rank.

#include <cstdint>
#include <numeric>
#include <random>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "jmetric/expr.hpp"
#include "jmetric/field.hpp"
#include "jmetric/structure.hpp"

namespace testing_support {

using jmetric::Expr;
using jmetric::Op;
using jmetric::Point;

/// Random tree over x1..x{dim}. Denominators are kept away from zero (1.5 + x^2 style)
/// so finite differences stay well conditioned.
inline Expr random_expr(std::mt19937_64& rng, unsigned dim, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::uniform_int_distribution<unsigned> coord(1, dim);
  switch (pick(rng)) {
    case 0: return Expr::constant(std::round(value(rng) * 100.0) / 100.0);
    case 1: return Expr::coordinate(coord(rng));
    case 2: return -random_expr(rng, dim, depth - 1);
    case 3: return jmetric::sin(random_expr(rng, dim, depth - 1));
    case 4: return jmetric::cos(random_expr(rng, dim, depth - 1));
    case 5: return jmetric::exp(Expr::constant(0.3) * random_expr(rng, dim, depth - 1));
    case 6: return random_expr(rng, dim, depth - 1) + random_expr(rng, dim, depth - 1);
    case 7: return random_expr(rng, dim, depth - 1) - random_expr(rng, dim, depth - 1);
    case 8: return random_expr(rng, dim, depth - 1) * random_expr(rng, dim, depth - 1);
    default: {
      std::uniform_int_distribution<int> which(0, 1);
      if (which(rng) == 0) {
        std::uniform_int_distribution<unsigned> k(0, 3);
        return jmetric::pow(random_expr(rng, dim, depth - 1), k(rng));
      }
      return random_expr(rng, dim, depth - 1) /
             (Expr::constant(1.5) + jmetric::pow(random_expr(rng, dim, depth - 1), 2));
    }
  }
}

inline Point random_point(std::mt19937_64& rng, Eigen::Index dim, double radius = 1.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Point p(dim);
  for (Eigen::Index i = 0; i < dim; ++i) p(i) = u(rng);
  return p;
}

/// Central difference of f along axis (0-based).
template <class F>
auto central_difference(F&& f, const Point& p, Eigen::Index axis, double h) {
  Point a = p, b = p;
  a(axis) += h;
  b(axis) -= h;
  using R = std::decay_t<decltype(f(a))>;
  const R fa = f(a), fb = f(b);
  return R((fa - fb) / (2.0 * h));
}

/// Metric partials by central differences: out[a] = d g / d x_{a+1}.
inline std::vector<Eigen::MatrixXd> fd_partials(const jmetric::MatrixField& f, const Point& p, double h = 1e-5) {
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index a = 0; a < p.size(); ++a)
    out.push_back(central_difference([&](const Point& q) { return Eigen::MatrixXd(jmetric::eval_matrix(f, q)); }, p, a, h));
  return out;
}

/// Exact rationals for the rank oracle.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den < 0) num = -num, den = -den;
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }
  bool zero() const { return num == 0; }
  friend Fraction operator-(Fraction a, Fraction b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
  friend Fraction operator/(Fraction a, Fraction b) { return {a.num * b.den, a.den * b.num}; }
};

/// Rank by exact Gaussian elimination; entries must be integers.
inline std::size_t exact_rank(const Eigen::MatrixXd& m) {
  std::vector<std::vector<Fraction>> a(static_cast<std::size_t>(m.rows()), std::vector<Fraction>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a[i][j] = Fraction(static_cast<std::int64_t>(std::llround(m(i, j))));
  std::size_t rank = 0;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][c].zero()) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r][c].zero()) continue;
      const Fraction f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] = a[r][k] - f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace testing_support
