#pragma once

// Pointwise adapted frames (X_1..X_n, Y_1..Y_n), their dual coframes, and the
// local basis of endomorphisms commuting with J and skew for g.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jmetric/structure.hpp"

namespace jmetric {

inline constexpr double kPivotThreshold = 1e-10;

/// Columns ordered X_1..X_n, Y_1..Y_n, in chart coordinates.
struct Frame {
  Eigen::MatrixXd columns;
  Point point;

  Eigen::Index n() const { return columns.cols() / 2; }
  Eigen::VectorXd X(Eigen::Index i) const { return columns.col(i); }
  Eigen::VectorXd Y(Eigen::Index i) const { return columns.col(n() + i); }
};

/// Rows ordered eta_1..eta_n, omega_1..omega_n.
struct Coframe {
  Eigen::MatrixXd rows;
  double duality_residual = 0.0;  // max |rows * frame - I|
  double inverse_residual = 0.0;  // max |rows - frame^{-1}|

  Eigen::RowVectorXd eta(Eigen::Index i) const { return rows.row(i); }
  Eigen::RowVectorXd omega(Eigen::Index i) const { return rows.row(rows.rows() / 2 + i); }
};

namespace detail {

/// Index of the candidate maximising score(); ties keep the lowest index.
template <class Score>
Eigen::Index pivot(const std::vector<Eigen::VectorXd>& candidates, Score score, double& best) {
  Eigen::Index arg = -1;
  best = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = score(candidates[i]);
    if (s > best) {
      best = s;
      arg = static_cast<Eigen::Index>(i);
    }
  }
  return arg;
}

inline std::vector<Eigen::VectorXd> columns_of(const Eigen::MatrixXd& m) {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

[[noreturn]] inline void breakdown(const std::string& step, double pivot_value) {
  throw FrameError("adapted frame construction broke down at " + step + " (pivot " + std::to_string(pivot_value) +
                   " below " + std::to_string(kPivotThreshold) + ")");
}

/// Gram-Schmidt for a positive-definite form on span(candidates); returns `count` vectors.
inline std::vector<Eigen::VectorXd> orthonormalize(std::vector<Eigen::VectorXd> cand, const Eigen::MatrixXd& form,
                                                   Eigen::Index count, const std::string& label) {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index step = 0; step < count; ++step) {
    double best = 0.0;
    const Eigen::Index k = pivot(cand, [&](const Eigen::VectorXd& v) { return v.dot(form * v); }, best);
    if (k < 0 || std::sqrt(std::max(best, 0.0)) < kPivotThreshold) breakdown(label + " step " + std::to_string(step + 1), best);
    Eigen::VectorXd e = cand[static_cast<std::size_t>(k)] / std::sqrt(best);
    for (auto& c : cand) c -= c.dot(form * e) * e;
    out.push_back(std::move(e));
  }
  return out;
}

using Complex = std::complex<double>;

/// Complex-bilinear form G(u, v) = g(u, v) - i g(Ju, v) on (T_p, J); G(Ju, v) = i G(u, v) when alpha eps = +1.
inline Complex norden_form(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  return {u.dot(g * v), -(J * u).dot(g * v)};
}

/// (a + ib) v = a v + b J v.
inline Eigen::VectorXd complex_scale(const Eigen::MatrixXd& J, Complex c, const Eigen::VectorXd& v) {
  return c.real() * v + c.imag() * (J * v);
}

inline Eigen::MatrixXd frame_hermitian(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, Eigen::Index n) {
  const Eigen::Index d = 2 * n;
  Eigen::MatrixXd F(d, d);
  auto cand = columns_of(Eigen::MatrixXd::Identity(d, d));
  for (Eigen::Index step = 0; step < n; ++step) {
    double best = 0.0;
    const Eigen::Index k = pivot(cand, [&](const Eigen::VectorXd& v) { return v.dot(g * v); }, best);
    if (k < 0 || std::sqrt(std::max(best, 0.0)) < kPivotThreshold) breakdown("J-pair " + std::to_string(step + 1), best);
    const Eigen::VectorXd xv = cand[static_cast<std::size_t>(k)] / std::sqrt(best);
    const Eigen::VectorXd yv = J * xv;
    for (auto& c : cand) c -= c.dot(g * xv) * xv + c.dot(g * yv) * yv;
    F.col(step) = xv;
    F.col(n + step) = yv;
  }
  return F;
}

inline Eigen::MatrixXd frame_norden(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, Eigen::Index n) {
  const Eigen::Index d = 2 * n;
  auto cand = columns_of(Eigen::MatrixXd::Identity(d, d));
  std::vector<Eigen::VectorXd> zs;
  auto gform = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return norden_form(g, J, u, v); };
  for (Eigen::Index step = 0; step < n; ++step) {
    double best = 0.0;
    Eigen::Index k = pivot(cand, [&](const Eigen::VectorXd& v) { return std::abs(gform(v, v)); }, best);
    Eigen::VectorXd chosen;
    if (k >= 0 && best >= kPivotThreshold) {
      chosen = cand[static_cast<std::size_t>(k)];
    } else {
      // Every remaining candidate is G-isotropic; a sum of two of them is not unless G vanishes there.
      std::vector<Eigen::VectorXd> pairs;
      for (std::size_t a = 0; a < cand.size(); ++a)
        for (std::size_t b = a + 1; b < cand.size(); ++b) {
          pairs.push_back(cand[a] + cand[b]);
          pairs.push_back(cand[a] + J * cand[b]);
        }
      k = pivot(pairs, [&](const Eigen::VectorXd& v) { return std::abs(gform(v, v)); }, best);
      if (k < 0 || best < kPivotThreshold) breakdown("complex step " + std::to_string(step + 1), best);
      chosen = pairs[static_cast<std::size_t>(k)];
    }
    const Complex scale = 1.0 / std::sqrt(gform(chosen, chosen));
    const Eigen::VectorXd z = complex_scale(J, scale, chosen);
    for (auto& c : cand) c -= complex_scale(J, gform(c, z), z);
    zs.push_back(z);
  }
  // (1 - i)/sqrt(2) z makes G(X, X) = -i: g(X, X) = 0 and g(JX, X) = 1.
  Eigen::MatrixXd F(d, d);
  const Complex rot(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
  for (Eigen::Index a = 0; a < n; ++a) {
    const Eigen::VectorXd xv = complex_scale(J, rot, zs[static_cast<std::size_t>(a)]);
    F.col(a) = xv;
    F.col(n + a) = J * xv;
  }
  return F;
}

inline Eigen::MatrixXd frame_product(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, Eigen::Index n) {
  const auto proj = eigenprojectors(J, 1);
  const auto xs = orthonormalize(columns_of(proj.plus), g, n, "T+ basis");
  const auto ys = orthonormalize(columns_of(proj.minus), g, n, "T- basis");
  Eigen::MatrixXd F(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    F.col(a) = xs[static_cast<std::size_t>(a)];
    F.col(n + a) = ys[static_cast<std::size_t>(a)];
  }
  return F;
}

inline Eigen::MatrixXd frame_para(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, Eigen::Index n) {
  const auto proj = eigenprojectors(J, 1);
  const Eigen::MatrixXd euclid = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const auto us = orthonormalize(columns_of(proj.plus), euclid, n, "T+ basis");
  const auto vs = orthonormalize(columns_of(proj.minus), euclid, n, "T- basis");
  Eigen::MatrixXd U(2 * n, n), V(2 * n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    U.col(a) = us[static_cast<std::size_t>(a)];
    V.col(a) = vs[static_cast<std::size_t>(a)];
  }
  // Both eigenspaces are g-null; pair them so that g(X_i, Y_j) = delta_ij.
  const Eigen::MatrixXd pairing = U.transpose() * g * V;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(pairing);
  const double smin = svd.singularValues().tail(1)(0);
  if (smin < kPivotThreshold) breakdown("cross pairing of T+ and T-", smin);
  Eigen::MatrixXd F(2 * n, 2 * n);
  F.leftCols(n) = U;
  F.rightCols(n) = V * pairing.inverse();
  return F;
}

}  // namespace detail

/// Adapted frame at a point from the evaluated g and J. Pivoting: largest available norm, lowest index on ties.
inline Frame adapted_frame(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, int alpha, int epsilon,
                           const Point& p) {
  const Eigen::Index n = g.rows() / 2;
  Frame f;
  f.point = p;
  if (alpha == -1 && epsilon == 1)
    f.columns = detail::frame_hermitian(g, J, n);
  else if (alpha == -1 && epsilon == -1)
    f.columns = detail::frame_norden(g, J, n);
  else if (alpha == 1 && epsilon == 1)
    f.columns = detail::frame_product(g, J, n);
  else
    f.columns = detail::frame_para(g, J, n);
  return f;
}

inline Frame adapted_frame(const Manifold& m, const Point& p) {
  return adapted_frame(eval_matrix(m.g(), p), eval_matrix(m.J(), p), m.alpha(), m.epsilon(), p);
}

/// Gram matrix the frame must realise: identity for eps = +1, [[0, I], [I, 0]] for eps = -1.
inline Eigen::MatrixXd normal_form(Eigen::Index n, int epsilon) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  if (epsilon == 1) {
    m.setIdentity();
  } else {
    m.topRightCorner(n, n).setIdentity();
    m.bottomLeftCorner(n, n).setIdentity();
  }
  return m;
}

/// Max deviation of the frame from its adapted normal form: Gram matrix and the J action
/// (Y_i = J X_i for alpha = -1, X_i in T+ and Y_i in T- for alpha = +1).
inline double frame_residual(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, int alpha, int epsilon,
                             const Frame& f) {
  const Eigen::Index n = f.n();
  double r = max_abs(f.columns.transpose() * g * f.columns - normal_form(n, epsilon));
  const Eigen::MatrixXd X = f.columns.leftCols(n);
  const Eigen::MatrixXd Y = f.columns.rightCols(n);
  if (alpha == -1)
    r = std::max(r, max_abs(J * X - Y));
  else
    r = std::max({r, max_abs(J * X - X), max_abs(J * Y + Y)});
  return r;
}

/// Dual coframe from the metric: eps = +1: eta_i = g(X_i, .), omega_i = g(Y_i, .);
/// eps = -1: eta_i = g(Y_i, .), omega_i = g(X_i, .).
inline Coframe dual_frame(const Eigen::MatrixXd& g, int epsilon, const Frame& f) {
  const Eigen::Index n = f.n();
  const Eigen::Index d = 2 * n;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f.columns);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < kDegeneracyThreshold)
    throw SingularError("frame is singular");
  Coframe c;
  c.rows.resize(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd first = epsilon == 1 ? f.columns.col(i) : f.columns.col(n + i);
    const Eigen::VectorXd second = epsilon == 1 ? f.columns.col(n + i) : f.columns.col(i);
    c.rows.row(i) = (g * first).transpose();
    c.rows.row(n + i) = (g * second).transpose();
  }
  c.duality_residual = max_abs(c.rows * f.columns - Eigen::MatrixXd::Identity(d, d));
  c.inverse_residual = max_abs(c.rows - lu.inverse());
  return c;
}

inline Coframe dual_frame(const Manifold& m, const Frame& f) {
  return dual_frame(eval_matrix(m.g(), f.point), m.epsilon(), f);
}

/// Local basis of the adjoint bundle at the frame's point, as chart-coordinate matrices.
/// Each term "eta_b (x) X_a" is the rank-one map v -> eta_b(v) X_a.
inline std::vector<Eigen::MatrixXd> adjoint_basis(int alpha, int epsilon, const Frame& f, const Coframe& c) {
  const Eigen::Index n = f.n();
  auto outer = [](const Eigen::VectorXd& v, const Eigen::RowVectorXd& form) -> Eigen::MatrixXd { return v * form; };
  std::vector<Eigen::MatrixXd> out;
  if (alpha == -1 && epsilon == 1) {
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = a + 1; b < n; ++b)
        out.push_back(outer(f.X(a), c.eta(b)) - outer(f.X(b), c.eta(a)) + outer(f.Y(a), c.omega(b)) -
                      outer(f.Y(b), c.omega(a)));
    // S'_ab is symmetric in (a, b); the diagonal a = b is needed to span all n^2 dimensions.
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = a; b < n; ++b)
        out.push_back(outer(f.Y(a), c.eta(b)) + outer(f.Y(b), c.eta(a)) - outer(f.X(a), c.omega(b)) -
                      outer(f.X(b), c.omega(a)));
  } else if (alpha == -1) {
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = a + 1; b < n; ++b) {
        out.push_back(outer(f.X(a), c.eta(b)) - outer(f.X(b), c.eta(a)) + outer(f.Y(a), c.omega(b)) -
                      outer(f.Y(b), c.omega(a)));
        out.push_back(outer(f.Y(a), c.eta(b)) - outer(f.Y(b), c.eta(a)) - outer(f.X(a), c.omega(b)) +
                      outer(f.X(b), c.omega(a)));
      }
  } else if (epsilon == 1) {
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = a + 1; b < n; ++b) {
        out.push_back(outer(f.X(a), c.eta(b)) - outer(f.X(b), c.eta(a)));
        out.push_back(outer(f.Y(a), c.omega(b)) - outer(f.Y(b), c.omega(a)));
      }
  } else {
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) out.push_back(outer(f.X(a), c.eta(b)) - outer(f.Y(b), c.omega(a)));
  }
  return out;
}

inline std::vector<Eigen::MatrixXd> adjoint_basis(const Manifold& m, const Frame& f) {
  return adjoint_basis(m.alpha(), m.epsilon(), f, dual_frame(m, f));
}

}  // namespace jmetric
