#pragma once

// (alpha, epsilon)-structures: a chart carrying J with J^2 = alpha Id, trace J = 0,
// and a metric g with g(JX, JY) = epsilon g(X, Y).

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jmetric/error.hpp"
#include "jmetric/field.hpp"
#include "jmetric/linalg.hpp"

namespace jmetric {

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kDegeneracyThreshold = 1e-10;

class Manifold {
 public:
  Manifold(std::size_t dim, int alpha, int epsilon, MatrixField g, MatrixField J)
      : dim_(dim), alpha_(alpha), epsilon_(epsilon), g_(std::move(g)), J_(std::move(J)) {
    if (dim_ < 2 || dim_ % 2 != 0) throw Error("chart dimension must be even and at least 2");
    if ((alpha_ != 1 && alpha_ != -1) || (epsilon_ != 1 && epsilon_ != -1))
      throw Error("alpha and epsilon must be +1 or -1");
    if (g_.dim() != dim_ || J_.dim() != dim_) throw Error("field dimensions do not match the chart");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t n() const noexcept { return dim_ / 2; }
  int alpha() const noexcept { return alpha_; }
  int epsilon() const noexcept { return epsilon_; }
  const MatrixField& g() const noexcept { return g_; }
  const MatrixField& J() const noexcept { return J_; }

 private:
  std::size_t dim_;
  int alpha_;
  int epsilon_;
  MatrixField g_;
  MatrixField J_;
};

/// Values and first partials of g and J at one point. dg[a] = d g / d x_{a+1}.
struct Jet {
  Point point;
  int alpha = -1;
  int epsilon = 1;
  Eigen::MatrixXd g;
  Eigen::MatrixXd J;
  std::vector<Eigen::MatrixXd> dg;
  std::vector<Eigen::MatrixXd> dJ;

  Eigen::Index dim() const { return g.rows(); }
};

inline Jet make_jet(const Manifold& m, const Point& p) {
  if (static_cast<std::size_t>(p.size()) != m.dim()) throw EvalError("point dimension does not match the chart");
  Jet j;
  j.point = p;
  j.alpha = m.alpha();
  j.epsilon = m.epsilon();
  j.g = eval_matrix(m.g(), p);
  j.J = eval_matrix(m.J(), p);
  j.dg = eval_matrix_partials(m.g(), p);
  j.dJ = eval_matrix_partials(m.J(), p);
  return j;
}

struct ValidationReport {
  double j_squared = 0.0;    // max ||J^2 - alpha I||_inf over the points
  double trace = 0.0;        // max |trace J|
  double compatibility = 0.0;  // max ||J^t g J - eps g||_inf
  double symmetry = 0.0;     // max ||g - g^t||_inf
  /// eps = +1: smallest eigenvalue of g over the points; eps = -1: smallest |det g|.
  double nondegeneracy = 0.0;
  std::size_t points = 0;
  bool passed = false;
};

inline ValidationReport validate_structure(const Manifold& m, const std::vector<Point>& points,
                                           double tol = kDefaultTolerance) {
  if (points.empty()) throw Error("validate_structure needs at least one point");
  ValidationReport r;
  r.points = points.size();
  r.nondegeneracy = std::numeric_limits<double>::infinity();
  const auto d = static_cast<Eigen::Index>(m.dim());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  for (const auto& p : points) {
    const Eigen::MatrixXd g = eval_matrix(m.g(), p);
    const Eigen::MatrixXd J = eval_matrix(m.J(), p);
    r.j_squared = std::max(r.j_squared, max_abs(J * J - m.alpha() * id));
    r.trace = std::max(r.trace, std::abs(J.trace()));
    r.compatibility = std::max(r.compatibility, max_abs(J.transpose() * g * J - m.epsilon() * g));
    r.symmetry = std::max(r.symmetry, max_abs(g - g.transpose()));
    if (m.epsilon() == 1) {
      const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
      r.nondegeneracy = std::min(r.nondegeneracy, es.eigenvalues().minCoeff());
    } else {
      r.nondegeneracy = std::min(r.nondegeneracy, std::abs(g.determinant()));
    }
  }
  r.passed = r.j_squared <= tol && r.trace <= tol && r.compatibility <= tol && r.symmetry <= tol &&
             r.nondegeneracy > kDegeneracyThreshold;
  return r;
}

/// g = 1/2 (h + eps J^t h J), built at expression level. Compatible with J wherever J^2 = alpha I.
inline MatrixField averaged_metric(const MatrixField& J, const MatrixField& h, int eps) {
  if (eps != 1 && eps != -1) throw Error("epsilon must be +1 or -1");
  const MatrixField twisted = multiply(multiply(transpose(J), h), J);
  const auto d = static_cast<Eigen::Index>(J.dim());
  MatrixField g(J.dim());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Expr& a = h(i, j);
      const Expr& b = twisted(i, j);
      if (a.is_zero_constant() && b.is_zero_constant()) continue;
      Expr sum = b.is_zero_constant() ? a
                 : a.is_zero_constant() ? (eps == 1 ? b : -b)
                 : (eps == 1 ? a + b : a - b);
      g(i, j) = Expr::constant(0.5) * sum;
    }
  return g;
}

struct TwinMetric {
  Eigen::MatrixXd metric;          // entries g(J e_i, e_j) = (J^t g)_ij
  double symmetry_residual = 0.0;  // max |gt - gt^t|
};

inline TwinMetric twin_metric(const Manifold& m, const Point& p) {
  const Eigen::MatrixXd g = eval_matrix(m.g(), p);
  const Eigen::MatrixXd J = eval_matrix(m.J(), p);
  TwinMetric t;
  t.metric = J.transpose() * g;
  t.symmetry_residual = max_abs(t.metric - t.metric.transpose());
  return t;
}

struct Eigenprojectors {
  Eigen::MatrixXd plus;   // 1/2 (I + J)
  Eigen::MatrixXd minus;  // 1/2 (I - J)
};

inline Eigenprojectors eigenprojectors(const Eigen::MatrixXd& J, int alpha) {
  if (alpha != 1) throw UnsupportedCase("eigenprojectors need a paracomplex structure (alpha = +1)");
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(J.rows(), J.cols());
  return {0.5 * (id + J), 0.5 * (id - J)};
}

inline Eigenprojectors eigenprojectors(const Manifold& m, const Point& p) {
  if (m.alpha() != 1) throw UnsupportedCase("eigenprojectors need a paracomplex structure (alpha = +1)");
  return eigenprojectors(eval_matrix(m.J(), p), m.alpha());
}

/// True iff S commutes with J and is g-skew: ||JS - SJ|| <= tol and ||gS + S^t g|| <= tol.
inline bool is_adjoint_section(const Eigen::MatrixXd& g, const Eigen::MatrixXd& J, const Eigen::MatrixXd& S,
                               double tol = kDefaultTolerance) {
  return max_abs(J * S - S * J) <= tol && max_abs(g * S + S.transpose() * g) <= tol;
}

inline bool is_adjoint_section(const Manifold& m, const Point& p, const Eigen::MatrixXd& S,
                               double tol = kDefaultTolerance) {
  return is_adjoint_section(eval_matrix(m.g(), p), eval_matrix(m.J(), p), S, tol);
}

}  // namespace jmetric
