#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jmetric/expr.hpp"
#include "jmetric/parser.hpp"

namespace jmetric {

/// Square matrix of expressions on a chart of dimension dim().
class MatrixField {
 public:
  MatrixField() = default;

  explicit MatrixField(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

  /// Row-major entries; entries.size() must equal dim*dim.
  MatrixField(std::size_t dim, std::vector<Expr> entries) : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) throw Error("matrix field must have dim*dim entries");
    for (const auto& e : entries_)
      if (e.max_coordinate() > dim_) throw Error("matrix field entry references a coordinate beyond the chart");
  }

  static MatrixField parse(const std::vector<std::vector<std::string>>& rows, std::size_t dim) {
    if (rows.size() != dim) throw Error("matrix field needs " + std::to_string(dim) + " rows");
    std::vector<Expr> entries;
    entries.reserve(dim * dim);
    for (const auto& row : rows) {
      if (row.size() != dim) throw Error("matrix field rows must have " + std::to_string(dim) + " entries");
      for (const auto& text : row) entries.push_back(parse_expression(text, dim));
    }
    return MatrixField(dim, std::move(entries));
  }

  static MatrixField constant(const Eigen::MatrixXd& m) {
    MatrixField f(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) f(i, j) = Expr::constant(m(i, j));
    return f;
  }

  std::size_t dim() const noexcept { return dim_; }
  const Expr& operator()(Eigen::Index i, Eigen::Index j) const { return entries_[index(i, j)]; }
  Expr& operator()(Eigen::Index i, Eigen::Index j) { return entries_[index(i, j)]; }

  friend bool operator==(const MatrixField&, const MatrixField&) = default;

 private:
  std::size_t index(Eigen::Index i, Eigen::Index j) const {
    return static_cast<std::size_t>(i) * dim_ + static_cast<std::size_t>(j);
  }

  std::size_t dim_ = 0;
  std::vector<Expr> entries_;
};

inline Eigen::MatrixXd eval_matrix(const MatrixField& f, const Point& p) {
  const auto d = static_cast<Eigen::Index>(f.dim());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = eval(f(i, j), p);
  return m;
}

/// result[a] is the entrywise partial derivative along x_{a+1}.
inline std::vector<Eigen::MatrixXd> eval_matrix_partials(const MatrixField& f, const Point& p) {
  const auto d = static_cast<Eigen::Index>(f.dim());
  std::vector<Eigen::MatrixXd> out(f.dim(), Eigen::MatrixXd(d, d));
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        out[static_cast<std::size_t>(a)](i, j) = derivative(f(i, j), p, static_cast<unsigned>(a + 1));
  return out;
}

namespace detail {

inline bool is_constant(const Expr& e, double v) { return e.op() == Op::constant && e.value() == v; }
inline bool is_minus_one(const Expr& e) { return e.op() == Op::neg && is_constant(e.child(0), 1.0); }

inline Expr negate(const Expr& e) { return e.op() == Op::neg ? e.child(0) : -e; }

/// a*b with unit factors and paired signs folded away.
inline Expr times(const Expr& a, const Expr& b) {
  if (is_constant(a, 1.0)) return b;
  if (is_constant(b, 1.0)) return a;
  if (is_minus_one(a)) return negate(b);
  if (is_minus_one(b)) return negate(a);
  if (a.op() == Op::neg && b.op() == Op::neg) return a.child(0) * b.child(0);
  return a * b;
}

}  // namespace detail

/// Expression-level matrix product, skipping structurally zero terms and unit factors.
inline MatrixField multiply(const MatrixField& a, const MatrixField& b) {
  const auto d = static_cast<Eigen::Index>(a.dim());
  MatrixField out(a.dim());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      std::vector<Expr> terms;
      for (Eigen::Index k = 0; k < d; ++k) {
        if (a(i, k).is_zero_constant() || b(k, j).is_zero_constant()) continue;
        terms.push_back(detail::times(a(i, k), b(k, j)));
      }
      if (terms.empty()) continue;
      Expr sum = terms.front();
      for (std::size_t t = 1; t < terms.size(); ++t) sum = sum + terms[t];
      out(i, j) = sum;
    }
  return out;
}

inline MatrixField transpose(const MatrixField& a) {
  const auto d = static_cast<Eigen::Index>(a.dim());
  MatrixField out(a.dim());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = a(j, i);
  return out;
}

}  // namespace jmetric
