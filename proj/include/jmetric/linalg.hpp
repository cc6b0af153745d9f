#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace jmetric {

/// Singular values below this fraction of the largest one count as zero.
inline constexpr double kRankThreshold = 1e-8;

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct RankInfo {
  Eigen::Index rank = 0;
  Eigen::Index nullity = 0;  // cols - rank
  double sigma_max = 0.0;
};

inline RankInfo rank_info(const Eigen::MatrixXd& a, double relative = kRankThreshold) {
  RankInfo info;
  if (a.size() == 0) {
    info.nullity = a.cols();
    return info;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  info.sigma_max = s.size() ? s(0) : 0.0;
  const double cut = relative * info.sigma_max;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (info.sigma_max > 0.0 && s(i) > cut) ++info.rank;
  info.nullity = a.cols() - info.rank;
  return info;
}

struct LeastSquares {
  Eigen::VectorXd x;
  double residual = 0.0;  // max |A x - b|
  RankInfo rank;
};

/// Minimum-norm least-squares solution with the same relative rank cut as rank_info().
inline LeastSquares least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                  double relative = kRankThreshold) {
  LeastSquares out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(relative);
  out.x = svd.solve(b);
  out.residual = (a * out.x - b).cwiseAbs().maxCoeff();
  const auto& s = svd.singularValues();
  out.rank.sigma_max = s.size() ? s(0) : 0.0;
  out.rank.rank = svd.rank();
  out.rank.nullity = a.cols() - out.rank.rank;
  return out;
}

/// Stacks each matrix as one column (column-major vectorisation).
inline Eigen::MatrixXd vectorize(const std::vector<Eigen::MatrixXd>& mats) {
  if (mats.empty()) return {};
  const Eigen::Index len = mats.front().size();
  Eigen::MatrixXd out(len, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t i = 0; i < mats.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = mats[i].reshaped();
  return out;
}

/// Least-squares distance from `m` to span(basis), measured as max abs residual.
inline double span_residual(const std::vector<Eigen::MatrixXd>& basis, const Eigen::MatrixXd& m) {
  if (basis.empty()) return max_abs(m);
  const Eigen::MatrixXd a = vectorize(basis);
  const Eigen::VectorXd b = m.reshaped();
  return least_squares(a, b).residual;
}

}  // namespace jmetric
