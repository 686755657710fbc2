#pragma once

#include <Eigen/Dense>

#include "errors.hpp"

namespace hfcqed {

// Symmetric tridiagonal eigensolve with a dense fallback: the direct QL path
// can fail to converge on exactly degenerate spectra (offset charge at the
// symmetry points 0 and 1/2), where the dense route still succeeds.
inline void eigh_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub,
                             Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& solver) {
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() == Eigen::Success) return;
  const Eigen::Index dim = diag.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  h.diagonal() = diag;
  for (Eigen::Index k = 0; k + 1 < dim; ++k) {
    h(k, k + 1) = sub[k];
    h(k + 1, k) = sub[k];
  }
  solver.compute(h);
  require(solver.info() == Eigen::Success, ErrorCode::not_converged,
          "symmetric eigensolver failed");
}

}  // namespace hfcqed
