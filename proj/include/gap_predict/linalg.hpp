#ifndef GAP_PREDICT_LINALG_HPP
#define GAP_PREDICT_LINALG_HPP

#include <Eigen/Dense>
#include <limits>

#include "gap_predict/error.hpp"

namespace gap_predict::linalg {

struct ScaledSolve {
  Eigen::VectorXd x;
  long rank = 0;
  // 2-norm condition number of the column-equilibrated matrix.
  double cond = 0.0;
};

// Scale each column to unit 2-norm. Zero columns keep scale 1 so that the
// rank test below reports them.
inline Eigen::VectorXd column_norms(const Eigen::MatrixXd& a) {
  Eigen::VectorXd s(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double n = a.col(j).norm();
    s(j) = n > 0.0 ? n : 1.0;
  }
  return s;
}

inline double condition_number(const Eigen::MatrixXd& a) {
  if (a.cols() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

/// Least-squares solve of a * x ~ b through a column-pivoted Householder QR
/// of the column-equilibrated matrix. Throws RankDeficientError when the
/// numerical rank is below the column count.
inline ScaledSolve scaled_qr_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() < a.cols()) {
    throw ValidationError("least-squares system has fewer rows than unknowns");
  }
  ScaledSolve out;
  if (a.cols() == 0) return out;
  const Eigen::VectorXd scale = column_norms(a);
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
  out.rank = qr.rank();
  if (out.rank < as.cols()) {
    throw RankDeficientError("least-squares system is rank deficient", out.rank, as.cols());
  }
  out.x = qr.solve(b).cwiseQuotient(scale);
  out.cond = condition_number(as);
  return out;
}

/// Minimum-norm least-squares solve through a complete orthogonal
/// decomposition of the column-equilibrated matrix. Never throws on rank
/// loss; the caller inspects `cond` and `rank`.
inline ScaledSolve scaled_min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  ScaledSolve out;
  if (a.cols() == 0) return out;
  const Eigen::VectorXd scale = column_norms(a);
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(as);
  out.rank = cod.rank();
  out.x = cod.solve(b).cwiseQuotient(scale);
  out.cond = condition_number(as);
  return out;
}

}  // namespace gap_predict::linalg

#endif  // GAP_PREDICT_LINALG_HPP
