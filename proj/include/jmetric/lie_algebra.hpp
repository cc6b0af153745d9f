#pragma once

// Structure-group Lie algebras as explicit matrix bases, membership tests,
// first-prolongation dimensions, and transpose invariance.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jmetric/error.hpp"
#include "jmetric/linalg.hpp"

namespace jmetric {

enum class Family { u, norden, product, para, o2n, onn, glc, glrr };

inline constexpr Family kAllFamilies[] = {Family::u,   Family::norden, Family::product, Family::para,
                                          Family::o2n, Family::onn,    Family::glc,     Family::glrr};

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::u: return "u";
    case Family::norden: return "norden";
    case Family::product: return "product";
    case Family::para: return "para";
    case Family::o2n: return "o2n";
    case Family::onn: return "onn";
    case Family::glc: return "glc";
    case Family::glrr: return "glrr";
  }
  return "?";
}

inline std::optional<Family> family_from_name(std::string_view name) {
  for (Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  return std::nullopt;
}

/// The algebra of G_(alpha, eps).
inline Family structure_family(int alpha, int epsilon) {
  if (alpha == -1) return epsilon == 1 ? Family::u : Family::norden;
  return epsilon == 1 ? Family::product : Family::para;
}

struct AlgebraBasis {
  Eigen::Index m = 0;  // matrix size
  std::vector<Eigen::MatrixXd> mats;

  std::size_t dim() const { return mats.size(); }
};

namespace detail {

inline Eigen::MatrixXd unit(Eigen::Index size, Eigen::Index i, Eigen::Index j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(size, size);
  e(i, j) = 1.0;
  return e;
}

inline Eigen::MatrixXd blocks(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                              const Eigen::MatrixXd& d) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out << a, b, c, d;
  return out;
}

inline std::vector<Eigen::MatrixXd> skew_basis(Eigen::Index n) {
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) out.push_back(unit(n, a, b) - unit(n, b, a));
  return out;
}

inline std::vector<Eigen::MatrixXd> symmetric_basis(Eigen::Index n) {
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) out.push_back(a == b ? unit(n, a, a) : Eigen::MatrixXd(unit(n, a, b) + unit(n, b, a)));
  return out;
}

inline std::vector<Eigen::MatrixXd> full_basis(Eigen::Index n) {
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out.push_back(unit(n, a, b));
  return out;
}

}  // namespace detail

/// Integer-valued basis of the family at parameter n; matrices are 2n x 2n in (X, Y) block layout.
inline AlgebraBasis algebra_basis(Family family, Eigen::Index n) {
  if (n < 1) throw Error("algebra_basis needs n >= 1");
  using detail::blocks;
  const Eigen::MatrixXd O = Eigen::MatrixXd::Zero(n, n);
  AlgebraBasis basis;
  basis.m = 2 * n;
  auto& out = basis.mats;
  switch (family) {
    case Family::u:  // [[A, B], [-B, A]], A skew, B symmetric
      for (const auto& a : detail::skew_basis(n)) out.push_back(blocks(a, O, O, a));
      for (const auto& b : detail::symmetric_basis(n)) out.push_back(blocks(O, b, -b, O));
      break;
    case Family::norden:  // [[A, B], [-B, A]], A and B skew
      for (const auto& a : detail::skew_basis(n)) out.push_back(blocks(a, O, O, a));
      for (const auto& b : detail::skew_basis(n)) out.push_back(blocks(O, b, -b, O));
      break;
    case Family::product:  // diag(A, B), A and B skew
      for (const auto& a : detail::skew_basis(n)) out.push_back(blocks(a, O, O, O));
      for (const auto& b : detail::skew_basis(n)) out.push_back(blocks(O, O, O, b));
      break;
    case Family::para:  // diag(A, -A^t)
      for (const auto& a : detail::full_basis(n)) out.push_back(blocks(a, O, O, -a.transpose()));
      break;
    case Family::o2n:
      out = detail::skew_basis(2 * n);
      break;
    case Family::onn:  // [[A, B], [C, -A^t]], B and C skew
      for (const auto& a : detail::full_basis(n)) out.push_back(blocks(a, O, O, -a.transpose()));
      for (const auto& b : detail::skew_basis(n)) out.push_back(blocks(O, b, O, O));
      for (const auto& c : detail::skew_basis(n)) out.push_back(blocks(O, O, c, O));
      break;
    case Family::glc:  // [[A, B], [-B, A]]
      for (const auto& a : detail::full_basis(n)) out.push_back(blocks(a, O, O, a));
      for (const auto& b : detail::full_basis(n)) out.push_back(blocks(O, b, -b, O));
      break;
    case Family::glrr:  // diag(A, D)
      for (const auto& a : detail::full_basis(n)) out.push_back(blocks(a, O, O, O));
      for (const auto& d : detail::full_basis(n)) out.push_back(blocks(O, O, O, d));
      break;
  }
  return basis;
}

enum class Level { algebra, group };

/// Max residual of the family's defining equations (algebra: linear; group: the quadratic relations).
inline double membership_residual(const Eigen::MatrixXd& X, Family family, Level level) {
  if (X.rows() != X.cols() || X.rows() % 2 != 0) throw Error("membership needs a square matrix of even size");
  const Eigen::Index n = X.rows() / 2;
  const Eigen::MatrixXd P = X.topLeftCorner(n, n), Q = X.topRightCorner(n, n);
  const Eigen::MatrixXd R = X.bottomLeftCorner(n, n), S = X.bottomRightCorner(n, n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  auto worst = [](std::initializer_list<double> v) { return std::max(v); };
  auto invertible = [](const Eigen::MatrixXd& m) {
    // Reported as a residual: 0 if invertible, 1 otherwise.
    return rank_info(m).rank == m.rows() ? 0.0 : 1.0;
  };
  if (level == Level::algebra) {
    switch (family) {
      case Family::u: return worst({max_abs(P - S), max_abs(Q + R), max_abs(P + P.transpose()), max_abs(Q - Q.transpose())});
      case Family::norden: return worst({max_abs(P - S), max_abs(Q + R), max_abs(P + P.transpose()), max_abs(Q + Q.transpose())});
      case Family::product: return worst({max_abs(Q), max_abs(R), max_abs(P + P.transpose()), max_abs(S + S.transpose())});
      case Family::para: return worst({max_abs(Q), max_abs(R), max_abs(P + S.transpose())});
      case Family::o2n: return max_abs(X + X.transpose());
      case Family::onn: return worst({max_abs(P + S.transpose()), max_abs(Q + Q.transpose()), max_abs(R + R.transpose())});
      case Family::glc: return worst({max_abs(P - S), max_abs(Q + R)});
      case Family::glrr: return worst({max_abs(Q), max_abs(R)});
    }
  } else {
    switch (family) {
      case Family::u:
        return worst({max_abs(P - S), max_abs(Q + R), max_abs(P.transpose() * P + Q.transpose() * Q - I),
                      max_abs(Q.transpose() * P - P.transpose() * Q)});
      case Family::norden:
        return worst({max_abs(P - S), max_abs(Q + R), max_abs(P.transpose() * P - Q.transpose() * Q - I),
                      max_abs(P.transpose() * Q + Q.transpose() * P)});
      case Family::product:
        return worst({max_abs(Q), max_abs(R), max_abs(P.transpose() * P - I), max_abs(S.transpose() * S - I)});
      case Family::para:
        return worst({max_abs(Q), max_abs(R), max_abs(S * P.transpose() - I)});
      case Family::o2n:
        return max_abs(X.transpose() * X - Eigen::MatrixXd::Identity(2 * n, 2 * n));
      case Family::onn:
        return worst({max_abs(R.transpose() * P + P.transpose() * R), max_abs(R.transpose() * Q + P.transpose() * S - I),
                      max_abs(S.transpose() * Q + Q.transpose() * S)});
      case Family::glc:
        return worst({max_abs(P - S), max_abs(Q + R), invertible(X)});
      case Family::glrr:
        return worst({max_abs(Q), max_abs(R), invertible(P), invertible(S)});
    }
  }
  return 0.0;
}

inline bool membership(const Eigen::MatrixXd& X, Family family, Level level, double tol = 1e-9) {
  return membership_residual(X, family, level) <= tol;
}

/// dim of { S in Hom(R^m, g) : S(v)w = S(w)v }, by SVD rank of the antisymmetrised map.
inline std::size_t first_prolongation_dim(const AlgebraBasis& basis) {
  const Eigen::Index m = basis.m;
  const auto r = static_cast<Eigen::Index>(basis.dim());
  if (r == 0) return 0;
  const Eigen::Index unknowns = m * r;  // coefficient c(i, a) at column i * r + a
  const Eigen::Index pairs = m * (m - 1) / 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(pairs * m, unknowns);
  Eigen::Index block = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j, ++block)
      for (Eigen::Index a = 0; a < r; ++a) {
        const Eigen::MatrixXd& B = basis.mats[static_cast<std::size_t>(a)];
        // S(e_i) e_j - S(e_j) e_i
        A.block(block * m, i * r + a, m, 1) += B.col(j);
        A.block(block * m, j * r + a, m, 1) -= B.col(i);
      }
  return static_cast<std::size_t>(rank_info(A).nullity);
}

inline bool is_linearly_independent(const AlgebraBasis& basis) {
  if (basis.mats.empty()) return true;
  return static_cast<std::size_t>(rank_info(vectorize(basis.mats)).rank) == basis.dim();
}

/// True iff every B_i^t lies in span(B) within tol.
inline bool is_transpose_invariant(const AlgebraBasis& basis, double tol = 1e-9) {
  for (const auto& b : basis.mats)
    if (span_residual(basis.mats, b.transpose()) > tol) return false;
  return true;
}

/// Whether every element of `basis` lies in span(container).
inline bool contained_in(const AlgebraBasis& basis, const AlgebraBasis& container, double tol = 1e-9) {
  for (const auto& b : basis.mats)
    if (span_residual(container.mats, b) > tol) return false;
  return true;
}

struct ExistenceCertificate {
  Family family = Family::u;
  Eigen::Index n = 0;
  std::size_t algebra_dim = 0;
  std::size_t prolongation_dim = 0;
  bool transpose_invariant = false;
  Family container = Family::o2n;  // o2n for eps = +1, onn for eps = -1
  bool contained = false;
  std::size_t container_prolongation_dim = 0;

  bool certified() const { return prolongation_dim == 0 && transpose_invariant && contained && container_prolongation_dim == 0; }
};

/// Checks every premise for the existence of the well-adapted connection of G_(alpha, eps).
inline ExistenceCertificate existence_certificate(int alpha, int epsilon, Eigen::Index n) {
  ExistenceCertificate c;
  c.family = structure_family(alpha, epsilon);
  c.n = n;
  const AlgebraBasis basis = algebra_basis(c.family, n);
  c.algebra_dim = basis.dim();
  c.prolongation_dim = first_prolongation_dim(basis);
  c.transpose_invariant = is_transpose_invariant(basis);
  c.container = epsilon == 1 ? Family::o2n : Family::onn;
  const AlgebraBasis outer = algebra_basis(c.container, n);
  c.contained = contained_in(basis, outer);
  c.container_prolongation_dim = first_prolongation_dim(outer);
  return c;
}

}  // namespace jmetric
