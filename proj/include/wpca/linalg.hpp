#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace wpca::linalg {

/// Leading eigenpairs of a symmetric positive semidefinite matrix, values in
/// nonincreasing order.
struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Top-k eigenpairs of M M^T from a thin SVD of M.
Eigenpairs top_gram_eigenpairs_dense(const Eigen::MatrixXd& m, std::size_t k);

/// Top-k eigenpairs of M M^T by Lanczos iteration with full
/// reorthogonalization, applying M and M^T without forming the Gram matrix.
///
/// Iterates until every wanted Ritz pair has residual at most
/// rel_tol * (largest Ritz value), or the Krylov space spans all of R^d. The
/// start vector is a fixed pseudo-random draw, so results are deterministic.
Eigenpairs top_gram_eigenpairs_lanczos(const Eigen::MatrixXd& m, std::size_t k,
                                       double rel_tol = 1e-12);

/// Flips v so that its largest-magnitude entry (first one on ties) is positive.
/// Returns true if v was negated.
bool canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace wpca::linalg
