#pragma once

// Natural connections of an (alpha, epsilon)-structure at a point.
//
// Every adapted connection is Levi-Civita plus a potential tensor S with
//   (C1) J S(X, Y) - S(X, JY) = (nabla^g_X J) Y
//   (C2) g(S(X, Y), Z) + g(S(X, Z), Y) = 0
// The well-adapted connection adds the torsion identity
//   g(T(X,Y),Z) - g(T(Z,Y),X) + eps (g(T(JX,Y),JZ) - g(T(JZ,Y),JX)) = 0,
// the Chern connection (alpha eps = -1) adds T(JX, JY) = alpha T(X, Y).
// Conventions: nabla_{e_i} e_j = Gamma^k_{ij} e_k stored at gamma.at(k, i, j);
// S and T use the same layout; T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jmetric/frame.hpp"
#include "jmetric/linalg.hpp"
#include "jmetric/structure.hpp"
#include "jmetric/tensor.hpp"

namespace jmetric {

inline constexpr double kSolveTolerance = 1e-8;

enum class ConnectionKind { levi_civita, well_adapted, chern, first_canonical, custom };
enum class TorsionCondition { well_adapted, chern, none };

inline std::string_view kind_name(ConnectionKind k) {
  switch (k) {
    case ConnectionKind::levi_civita: return "levi-civita";
    case ConnectionKind::well_adapted: return "well-adapted";
    case ConnectionKind::chern: return "chern";
    case ConnectionKind::first_canonical: return "first-canonical";
    case ConnectionKind::custom: return "custom";
  }
  return "?";
}

inline std::optional<ConnectionKind> kind_from_name(std::string_view s) {
  for (auto k : {ConnectionKind::levi_civita, ConnectionKind::well_adapted, ConnectionKind::chern,
                 ConnectionKind::first_canonical})
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

struct PotentialSolve {
  TorsionCondition condition = TorsionCondition::none;
  Eigen::Index unknowns = 0;
  Eigen::Index rows = 0;
  double residual = 0.0;  // max |A s - b| over all rows
  double c1_residual = 0.0;
  double c2_residual = 0.0;
  double c3_residual = 0.0;
  Eigen::Index nullspace_dim = 0;
  double sigma_max = 0.0;
  /// Minimum-norm solution; present only when residual < kSolveTolerance.
  std::optional<Tensor3> S;
};

struct Connection {
  Tensor3 gamma;
  ConnectionKind kind = ConnectionKind::custom;
  std::optional<PotentialSolve> diagnostics;
};

/// An adapted-connection solve that should be consistent and unique was not.
class TheoremViolation : public Error {
 public:
  TheoremViolation(const std::string& what, PotentialSolve solve) : Error(what), solve_(std::move(solve)) {}
  const PotentialSolve& solve() const noexcept { return solve_; }

 private:
  PotentialSolve solve_;
};

// ---------------------------------------------------------------------------
// Levi-Civita, covariant derivatives, torsion

inline Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& g) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible() || std::abs(lu.determinant()) <= kDegeneracyThreshold) throw SingularError("metric is singular");
  return lu.inverse();
}

/// Gamma^k_{ij} = 1/2 g^{km} (d_i g_{mj} + d_j g_{im} - d_m g_{ij}).
inline Tensor3 christoffel(const Eigen::MatrixXd& g, const std::vector<Eigen::MatrixXd>& dg) {
  const Eigen::Index d = g.rows();
  const Eigen::MatrixXd ginv = checked_inverse(g);
  Tensor3 gamma(d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index m = 0; m < d; ++m) {
        const double lowered = 0.5 * (dg[i](m, j) + dg[j](i, m) - dg[m](i, j));
        for (Eigen::Index k = 0; k < d; ++k) gamma.at(k, i, j) += ginv(k, m) * lowered;
      }
  return gamma;
}

inline Connection levi_civita(const Jet& jet) { return {christoffel(jet.g, jet.dg), ConnectionKind::levi_civita, {}}; }
inline Connection levi_civita(const Manifold& m, const Point& p) { return levi_civita(make_jet(m, p)); }

/// at(k, i, j) = (nabla_i J)^k_j.
inline Tensor3 covariant_J(const Jet& jet, const Connection& conn) {
  const Eigen::Index d = jet.dim();
  const Tensor3& G = conn.gamma;
  Tensor3 out(d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index j = 0; j < d; ++j) {
        double v = jet.dJ[i](k, j);
        for (Eigen::Index m = 0; m < d; ++m) v += G.at(k, i, m) * jet.J(m, j) - G.at(m, i, j) * jet.J(k, m);
        out.at(k, i, j) = v;
      }
  return out;
}

/// at(i, j, k) = (nabla_i g)_{jk}.
inline Tensor3 covariant_g(const Jet& jet, const Connection& conn) {
  const Eigen::Index d = jet.dim();
  const Tensor3& G = conn.gamma;
  Tensor3 out(d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k) {
        double v = jet.dg[i](j, k);
        for (Eigen::Index m = 0; m < d; ++m) v -= G.at(m, i, j) * jet.g(m, k) + G.at(m, i, k) * jet.g(j, m);
        out.at(i, j, k) = v;
      }
  return out;
}

inline Tensor3 torsion(const Tensor3& gamma) {
  const Eigen::Index d = gamma.dim();
  Tensor3 T(d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) T.at(k, i, j) = gamma.at(k, i, j) - gamma.at(k, j, i);
  return T;
}

inline Tensor3 torsion(const Connection& conn) { return torsion(conn.gamma); }

/// T(u, v) = T^k_{ab} u^a v^b.
inline Eigen::VectorXd apply(const Tensor3& T, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Eigen::Index d = T.dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) out(k) += T.at(k, a, b) * u(a) * v(b);
  return out;
}

struct AdaptedResiduals {
  double nabla_J = 0.0;
  double nabla_g = 0.0;
  double max() const { return std::max(nabla_J, nabla_g); }
};

inline AdaptedResiduals adapted_residuals(const Jet& jet, const Connection& conn) {
  return {covariant_J(jet, conn).max_abs(), covariant_g(jet, conn).max_abs()};
}

// ---------------------------------------------------------------------------
// Torsion identities, evaluated directly on vectors

/// Max over basis triples of |g(T(X,Y),Z) - g(T(Z,Y),X) + sign (g(T(JX,Y),JZ) - g(T(JZ,Y),JX))|.
inline double torsion_identity_residual(const Jet& jet, const Tensor3& T, int sign) {
  const Eigen::Index d = jet.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  double worst = 0.0;
  for (Eigen::Index x = 0; x < d; ++x)
    for (Eigen::Index y = 0; y < d; ++y)
      for (Eigen::Index z = 0; z < d; ++z) {
        const Eigen::VectorXd X = I.col(x), Y = I.col(y), Z = I.col(z);
        const Eigen::VectorXd JX = jet.J * X, JZ = jet.J * Z;
        const double lhs = apply(T, X, Y).dot(jet.g * Z) - apply(T, Z, Y).dot(jet.g * X);
        const double twisted = apply(T, JX, Y).dot(jet.g * JZ) - apply(T, JZ, Y).dot(jet.g * JX);
        worst = std::max(worst, std::abs(lhs + sign * twisted));
      }
  return worst;
}

/// The well-adapted torsion identity for the jet's epsilon.
inline double well_adapted_identity_residual(const Jet& jet, const Tensor3& T) {
  return torsion_identity_residual(jet, T, jet.epsilon);
}

/// The identity written out for eps = +1: ... + g(T(JX,Y),JZ) - g(T(JZ,Y),JX) = 0.
inline double hermitian_form_residual(const Jet& jet, const Tensor3& T) { return torsion_identity_residual(jet, T, +1); }

/// The identity written out for eps = -1: ... - g(T(JX,Y),JZ) + g(T(JZ,Y),JX) = 0.
inline double norden_form_residual(const Jet& jet, const Tensor3& T) { return torsion_identity_residual(jet, T, -1); }

/// max |T(J e_i, J e_j) - alpha T(e_i, e_j)|.
inline double chern_torsion_residual(const Jet& jet, const Tensor3& T) {
  const Eigen::Index d = jet.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      worst = std::max(worst, max_abs(apply(T, jet.J * I.col(i), jet.J * I.col(j)) - jet.alpha * apply(T, I.col(i), I.col(j))));
  return worst;
}

/// alpha = +1 only: max |T(P+ e_i, P- e_j)|, the torsion between the two eigen-distributions.
inline double mixed_torsion_residual(const Jet& jet, const Tensor3& T) {
  const auto P = eigenprojectors(jet.J, jet.alpha);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < jet.dim(); ++i)
    for (Eigen::Index j = 0; j < jet.dim(); ++j)
      worst = std::max(worst, max_abs(apply(T, P.plus.col(i), P.minus.col(j))));
  return worst;
}

// ---------------------------------------------------------------------------
// Potential-tensor solve

namespace detail {

struct Assembly {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::Index c1_rows = 0, c2_rows = 0, c3_rows = 0;
};

inline Eigen::Index unknown(Eigen::Index d, Eigen::Index k, Eigen::Index i, Eigen::Index j) { return (k * d + i) * d + j; }

/// Adds coeff * T^m_{ay} to a row, with T^m_{ay} = S^m_{ay} - S^m_{ya}.
inline void add_torsion(Eigen::MatrixXd& A, Eigen::Index row, Eigen::Index d, Eigen::Index m, Eigen::Index a,
                        Eigen::Index y, double coeff) {
  A(row, unknown(d, m, a, y)) += coeff;
  A(row, unknown(d, m, y, a)) -= coeff;
}

inline Assembly assemble(const Jet& jet, TorsionCondition condition) {
  const Eigen::Index d = jet.dim();
  const Eigen::Index block = d * d * d;
  const Eigen::MatrixXd& J = jet.J;
  const Eigen::MatrixXd& g = jet.g;
  const Tensor3 nablaJ = covariant_J(jet, levi_civita(jet));
  Assembly as;
  as.c1_rows = block;
  as.c2_rows = block;
  as.c3_rows = condition == TorsionCondition::none ? 0 : block;
  as.A = Eigen::MatrixXd::Zero(as.c1_rows + as.c2_rows + as.c3_rows, block);
  as.b = Eigen::VectorXd::Zero(as.A.rows());
  Eigen::Index row = 0;
  // (C1) J^k_m S^m_{ij} - S^k_{im} J^m_j = (nabla_i J)^k_j
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k, ++row) {
        for (Eigen::Index m = 0; m < d; ++m) {
          as.A(row, unknown(d, m, i, j)) += J(k, m);
          as.A(row, unknown(d, k, i, m)) -= J(m, j);
        }
        as.b(row) = nablaJ.at(k, i, j);
      }
  // (C2) g_{km} S^m_{ij} + g_{jm} S^m_{ik} = 0
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k, ++row)
        for (Eigen::Index m = 0; m < d; ++m) {
          as.A(row, unknown(d, m, i, j)) += g(k, m);
          as.A(row, unknown(d, m, i, k)) += g(j, m);
        }
  if (condition == TorsionCondition::well_adapted) {
    // g(T(X,Y),Z) - g(T(Z,Y),X) + eps (g(T(JX,Y),JZ) - g(T(JZ,Y),JX)) on coordinate triples.
    const Eigen::MatrixXd twin = J.transpose() * g;  // twin(z, m) = J^b_z g_{bm}
    const double eps = jet.epsilon;
    for (Eigen::Index x = 0; x < d; ++x)
      for (Eigen::Index y = 0; y < d; ++y)
        for (Eigen::Index z = 0; z < d; ++z, ++row)
          for (Eigen::Index m = 0; m < d; ++m) {
            add_torsion(as.A, row, d, m, x, y, g(z, m));
            add_torsion(as.A, row, d, m, z, y, -g(x, m));
            for (Eigen::Index a = 0; a < d; ++a) {
              add_torsion(as.A, row, d, m, a, y, eps * J(a, x) * twin(z, m));
              add_torsion(as.A, row, d, m, a, y, -eps * J(a, z) * twin(x, m));
            }
          }
  } else if (condition == TorsionCondition::chern) {
    // T^k_{mq} J^m_i J^q_j - alpha T^k_{ij} = 0
    const double alpha = jet.alpha;
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j, ++row) {
          for (Eigen::Index m = 0; m < d; ++m)
            for (Eigen::Index q = 0; q < d; ++q) add_torsion(as.A, row, d, k, m, q, J(m, i) * J(q, j));
          add_torsion(as.A, row, d, k, i, j, -alpha);
        }
  }
  return as;
}

inline Tensor3 unpack(const Eigen::VectorXd& s, Eigen::Index d) {
  Tensor3 S(d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) S.at(k, i, j) = s(unknown(d, k, i, j));
  return S;
}

}  // namespace detail

/// Assembles (C1), (C2) and the chosen torsion rows in the coordinate basis and solves by SVD.
inline PotentialSolve solve_adapted(const Jet& jet, TorsionCondition condition) {
  checked_inverse(jet.g);
  const auto as = detail::assemble(jet, condition);
  const auto ls = least_squares(as.A, as.b);
  const Eigen::VectorXd r = (as.A * ls.x - as.b).cwiseAbs();
  PotentialSolve out;
  out.condition = condition;
  out.unknowns = as.A.cols();
  out.rows = as.A.rows();
  out.residual = ls.residual;
  out.c1_residual = r.segment(0, as.c1_rows).maxCoeff();
  out.c2_residual = r.segment(as.c1_rows, as.c2_rows).maxCoeff();
  out.c3_residual = as.c3_rows ? r.segment(as.c1_rows + as.c2_rows, as.c3_rows).maxCoeff() : 0.0;
  out.nullspace_dim = rank_info(as.A).nullity;
  out.sigma_max = ls.rank.sigma_max;
  if (out.residual < kSolveTolerance) out.S = detail::unpack(ls.x, jet.dim());
  return out;
}

inline PotentialSolve solve_adapted(const Manifold& m, const Point& p, TorsionCondition condition) {
  return solve_adapted(make_jet(m, p), condition);
}

namespace detail {

inline Connection from_potential(const Jet& jet, PotentialSolve solve, ConnectionKind kind, const char* what) {
  if (!solve.S || solve.nullspace_dim > 0)
    throw TheoremViolation(std::string(what) + ": residual " + std::to_string(solve.residual) + ", nullspace dimension " +
                               std::to_string(solve.nullspace_dim),
                           std::move(solve));
  Connection c{levi_civita(jet).gamma + *solve.S, kind, {}};
  c.diagnostics = std::move(solve);
  return c;
}

}  // namespace detail

/// The unique adapted connection satisfying the well-adapted torsion identity.
/// Throws TheoremViolation if the solve is inconsistent or not unique.
inline Connection well_adapted(const Jet& jet) {
  return detail::from_potential(jet, solve_adapted(jet, TorsionCondition::well_adapted), ConnectionKind::well_adapted,
                                "well-adapted solve failed");
}
inline Connection well_adapted(const Manifold& m, const Point& p) { return well_adapted(make_jet(m, p)); }

/// Chern connection: adapted, with T(JX, JY) = alpha T(X, Y). Defined only when alpha eps = -1;
/// for alpha eps = +1 that condition does not single out one adapted connection.
inline Connection chern(const Jet& jet) {
  if (jet.alpha * jet.epsilon != -1)
    throw UnsupportedCase("the Chern connection needs alpha*epsilon = -1; for alpha*epsilon = +1 the torsion "
                          "condition leaves the adapted connection under-determined");
  return detail::from_potential(jet, solve_adapted(jet, TorsionCondition::chern), ConnectionKind::chern,
                                "Chern solve failed");
}
inline Connection chern(const Manifold& m, const Point& p) { return chern(make_jet(m, p)); }

/// Potential (-alpha/2) (nabla^g_X J) J Y.
inline Tensor3 first_canonical_potential(const Jet& jet) {
  const Eigen::Index d = jet.dim();
  const Tensor3 nablaJ = covariant_J(jet, levi_civita(jet));
  Tensor3 S(d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        double v = 0.0;
        for (Eigen::Index m = 0; m < d; ++m) v += nablaJ.at(k, i, m) * jet.J(m, j);
        S.at(k, i, j) = -0.5 * jet.alpha * v;
      }
  return S;
}

inline Connection first_canonical(const Jet& jet) {
  return {levi_civita(jet).gamma + first_canonical_potential(jet), ConnectionKind::first_canonical, {}};
}
inline Connection first_canonical(const Manifold& m, const Point& p) { return first_canonical(make_jet(m, p)); }

inline Connection connection(const Jet& jet, ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::levi_civita: return levi_civita(jet);
    case ConnectionKind::well_adapted: return well_adapted(jet);
    case ConnectionKind::chern: return chern(jet);
    case ConnectionKind::first_canonical: return first_canonical(jet);
    case ConnectionKind::custom: break;
  }
  throw Error("no construction for a custom connection");
}
inline Connection connection(const Manifold& m, const Point& p, ConnectionKind kind) {
  return connection(make_jet(m, p), kind);
}

/// Levi-Civita recovered by solving nabla g = 0 with Gamma^k_{ij} = Gamma^k_{ji} directly for Gamma.
inline Connection levi_civita_by_solve(const Jet& jet) {
  const Eigen::Index d = jet.dim();
  const Eigen::Index block = d * d * d;
  const Eigen::Index sym_rows = d * d * (d - 1) / 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(block + sym_rows, block);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  using detail::unknown;
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k, ++row) {
        for (Eigen::Index m = 0; m < d; ++m) {
          A(row, unknown(d, m, i, j)) += jet.g(m, k);
          A(row, unknown(d, m, i, k)) += jet.g(j, m);
        }
        b(row) = jet.dg[i](j, k);
      }
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j, ++row) {
        A(row, unknown(d, k, i, j)) = 1.0;
        A(row, unknown(d, k, j, i)) = -1.0;
      }
  const auto ls = least_squares(A, b);
  PotentialSolve diag;
  diag.unknowns = block;
  diag.rows = A.rows();
  diag.residual = ls.residual;
  diag.nullspace_dim = ls.rank.nullity;
  diag.sigma_max = ls.rank.sigma_max;
  Connection c{detail::unpack(ls.x, d), ConnectionKind::levi_civita, diag};
  return c;
}

/// Levi-Civita connection of the twin metric g(J., .), defined when alpha eps = +1.
inline Connection twin_levi_civita(const Jet& jet) {
  if (jet.alpha * jet.epsilon != 1) throw UnsupportedCase("the twin metric is symmetric only when alpha*epsilon = +1");
  const Eigen::MatrixXd twin = jet.J.transpose() * jet.g;
  std::vector<Eigen::MatrixXd> dtwin;
  for (std::size_t a = 0; a < jet.dg.size(); ++a)
    dtwin.push_back(jet.dJ[a].transpose() * jet.g + jet.J.transpose() * jet.dg[a]);
  return {christoffel(twin, dtwin), ConnectionKind::custom, {}};
}

// ---------------------------------------------------------------------------
// Trace characterisation, Nijenhuis tensor, curvature

/// max over adjoint-basis elements S and adapted-frame vectors Y of |trace(v -> S T(Y, v))|.
inline double verify_trace_condition(const Jet& jet, const Connection& conn) {
  const Frame f = adapted_frame(jet.g, jet.J, jet.alpha, jet.epsilon, jet.point);
  const Coframe c = dual_frame(jet.g, jet.epsilon, f);
  const auto basis = adjoint_basis(jet.alpha, jet.epsilon, f, c);
  const Tensor3 T = torsion(conn);
  const Eigen::Index d = jet.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  double worst = 0.0;
  for (Eigen::Index y = 0; y < d; ++y) {
    Eigen::MatrixXd contracted(d, d);  // column v = T(Y, e_v)
    for (Eigen::Index v = 0; v < d; ++v) contracted.col(v) = apply(T, f.columns.col(y), I.col(v));
    for (const auto& S : basis) worst = std::max(worst, std::abs((S * contracted).trace()));
  }
  return worst;
}
inline double verify_trace_condition(const Manifold& m, const Point& p, const Connection& conn) {
  return verify_trace_condition(make_jet(m, p), conn);
}

/// N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] + alpha [X,Y] on coordinate fields; at(k, i, j) = N^k_{ij}.
inline Tensor3 nijenhuis(const Jet& jet) {
  const Eigen::Index d = jet.dim();
  const auto& J = jet.J;
  const auto& dJ = jet.dJ;
  Tensor3 N(d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        double v = 0.0;
        for (Eigen::Index m = 0; m < d; ++m)
          v += J(m, i) * dJ[m](k, j) - J(m, j) * dJ[m](k, i) + J(k, m) * dJ[j](m, i) - J(k, m) * dJ[i](m, j);
        N.at(k, i, j) = v;
      }
  return N;
}
inline Tensor3 nijenhuis(const Manifold& m, const Point& p) { return nijenhuis(make_jet(m, p)); }

inline constexpr double kCurvatureStep = 1e-4;

/// R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik} + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik},
/// with d Gamma from central differences (error O(h^2)) of pointwise connections.
inline Tensor4 curvature(const Manifold& m, ConnectionKind kind, const Point& p, double h = kCurvatureStep) {
  const auto d = static_cast<Eigen::Index>(m.dim());
  const Tensor3 G = connection(m, p, kind).gamma;
  std::vector<Tensor3> dG;
  for (Eigen::Index a = 0; a < d; ++a) {
    Point fwd = p, bwd = p;
    fwd(a) += h;
    bwd(a) -= h;
    dG.push_back((0.5 / h) * (connection(m, fwd, kind).gamma - connection(m, bwd, kind).gamma));
  }
  // half(l, k, i, j) = d_i Gamma^l_{jk} + Gamma^l_{im} Gamma^m_{jk}; R = half(i, j) - half(j, i).
  Tensor4 half(d);
  for (Eigen::Index l = 0; l < d; ++l)
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
          double v = dG[i].at(l, j, k);
          for (Eigen::Index q = 0; q < d; ++q) v += G.at(l, i, q) * G.at(q, j, k);
          half.at(l, k, i, j) = v;
        }
  Tensor4 R(d);
  for (Eigen::Index l = 0; l < d; ++l)
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) R.at(l, k, i, j) = half.at(l, k, i, j) - half.at(l, k, j, i);
  return R;
}

// ---------------------------------------------------------------------------
// Theorem observations over point sets

inline double nabla_J_norm(const Jet& jet) { return covariant_J(jet, levi_civita(jet)).max_abs(); }

/// True iff max over points of ||nabla^g J||_inf <= tol.
inline bool is_kaehler_type(const Manifold& m, const std::vector<Point>& points, double tol = kSolveTolerance) {
  if (points.empty()) throw Error("is_kaehler_type needs at least one point");
  for (const auto& p : points)
    if (nabla_J_norm(make_jet(m, p)) > tol) return false;
  return true;
}

struct CoincidenceRow {
  Point point;
  double nabla_J = 0.0;         // ||nabla^g J||
  double well_vs_levi = 0.0;    // ||Gamma^w - Gamma^g||
  std::optional<double> well_vs_chern;      // alpha eps = -1 only
  std::optional<double> well_vs_canonical;  // alpha eps = -1 only
};

struct CoincidenceReport {
  std::vector<CoincidenceRow> rows;
  double tol = kSolveTolerance;
  bool kaehler_biconditional = true;  // (nabla J ~ 0) <=> (Gamma^w ~ Gamma^g) at every point
  bool chern_biconditional = true;    // (Gamma^w ~ Gamma^c) <=> (Gamma^w ~ Gamma^0) at every point
};

inline CoincidenceRow coincidence_at(const Jet& jet) {
  CoincidenceRow row;
  row.point = jet.point;
  const Connection lc = levi_civita(jet);
  const Connection w = well_adapted(jet);
  row.nabla_J = covariant_J(jet, lc).max_abs();
  row.well_vs_levi = (w.gamma - lc.gamma).max_abs();
  if (jet.alpha * jet.epsilon == -1) {
    row.well_vs_chern = (w.gamma - chern(jet).gamma).max_abs();
    row.well_vs_canonical = (w.gamma - first_canonical(jet).gamma).max_abs();
  }
  return row;
}

inline CoincidenceReport coincidence_report(const Manifold& m, const std::vector<Point>& points,
                                            double tol = kSolveTolerance) {
  CoincidenceReport r;
  r.tol = tol;
  for (const auto& p : points) {
    auto row = coincidence_at(make_jet(m, p));
    if ((row.nabla_J <= tol) != (row.well_vs_levi <= tol)) r.kaehler_biconditional = false;
    if (row.well_vs_chern && ((*row.well_vs_chern <= tol) != (*row.well_vs_canonical <= tol))) r.chern_biconditional = false;
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace jmetric
