#include "wpca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace wpca::linalg {

namespace {

using Eigen::Index;

// Descending order, stable on index.
std::vector<Index> descending_order(const Eigen::VectorXd& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });
  return order;
}

// Two passes of classical Gram-Schmidt against the first `count` columns.
void orthogonalize(const Eigen::MatrixXd& basis, Index count,
                   Eigen::VectorXd& w) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const auto q = basis.leftCols(count);
    w.noalias() -= q * (q.transpose() * w);
  }
}

}  // namespace

Eigenpairs top_gram_eigenpairs_dense(const Eigen::MatrixXd& m, std::size_t k) {
  const Index kk = std::min<Index>(static_cast<Index>(k),
                                   std::min(m.rows(), m.cols()));
  Eigenpairs out;
  if (kk == 0) {
    out.values.resize(0);
    out.vectors.resize(m.rows(), 0);
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd s2 = svd.singularValues().array().square();
  const auto order = descending_order(s2);
  out.values.resize(kk);
  out.vectors.resize(m.rows(), kk);
  for (Index i = 0; i < kk; ++i) {
    out.values(i) = s2(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = svd.matrixU().col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Eigenpairs top_gram_eigenpairs_lanczos(const Eigen::MatrixXd& m, std::size_t k,
                                       double rel_tol) {
  const Index d = m.rows();
  const Index kk = std::min<Index>(static_cast<Index>(k), d);
  Eigenpairs out;
  if (kk == 0 || m.cols() == 0) {
    out.values = Eigen::VectorXd::Zero(kk);
    out.vectors = Eigen::MatrixXd::Identity(d, kk);
    return out;
  }

  std::mt19937_64 rng(0x5eed1a2c20a5ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_vector = [&] {
    Eigen::VectorXd v(d);
    for (Index r = 0; r < d; ++r) v(r) = normal(rng);
    return v;
  };

  Index capacity = std::min<Index>(d, std::max<Index>(4 * kk + 32, 64));
  Eigen::MatrixXd basis(d, capacity);
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples q_j and q_{j+1}

  Eigen::VectorXd q = random_vector();
  q.normalize();
  basis.col(0) = q;

  Eigen::VectorXd tmp(m.cols());
  Eigen::VectorXd w(d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  double norm_estimate = 0.0;

  Index steps = 0;
  bool done = false;
  while (!done) {
    const Index j = steps;
    tmp.noalias() = m.transpose() * basis.col(j);
    w.noalias() = m * tmp;
    const double a = basis.col(j).dot(w);
    alpha.push_back(a);
    norm_estimate = std::max(norm_estimate, std::abs(a));
    orthogonalize(basis, j + 1, w);
    double b = w.norm();
    steps = j + 1;

    const bool exhausted = steps == d;
    const bool breakdown =
        b <= 1e-14 * std::max(norm_estimate, std::numeric_limits<double>::min());

    if (steps >= kk && (exhausted || breakdown || steps % 4 == 0)) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), steps);
      Eigen::VectorXd sub(std::max<Index>(steps - 1, 0));
      for (Index r = 0; r + 1 < steps; ++r) sub(r) = beta[static_cast<std::size_t>(r)];
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const Eigen::VectorXd& ritz = tri.eigenvalues();
      const auto order = descending_order(ritz);
      const double top = std::max(std::abs(ritz(order[0])), norm_estimate);
      const double residual_scale = breakdown ? 0.0 : b;
      bool converged = true;
      for (Index i = 0; i < kk; ++i) {
        const Index col = order[static_cast<std::size_t>(i)];
        const double residual =
            residual_scale * std::abs(tri.eigenvectors()(steps - 1, col));
        if (residual > rel_tol * top) {
          converged = false;
          break;
        }
      }
      if (converged || exhausted) {
        out.values.resize(kk);
        out.vectors.resize(d, kk);
        for (Index i = 0; i < kk; ++i) {
          const Index col = order[static_cast<std::size_t>(i)];
          out.values(i) = std::max(ritz(col), 0.0);
          out.vectors.col(i) = basis.leftCols(steps) * tri.eigenvectors().col(col);
          out.vectors.col(i).normalize();
        }
        done = true;
        break;
      }
    }
    if (exhausted) break;

    if (breakdown) {
      // Invariant subspace found; continue from a fresh direction.
      w = random_vector();
      orthogonalize(basis, steps, w);
      const double nw = w.norm();
      if (nw <= 1e-10 * std::sqrt(static_cast<double>(d))) {
        // Numerically exhausted: pad with zero Ritz pairs.
        break;
      }
      b = 0.0;
      w /= nw;
    } else {
      w /= b;
    }
    beta.push_back(b);
    if (steps == capacity) {
      capacity = std::min<Index>(d, 2 * capacity);
      basis.conservativeResize(Eigen::NoChange, capacity);
    }
    basis.col(steps) = w;
  }

  if (!done) {
    // Space exhausted before reaching k converged pairs: use every Ritz pair.
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), steps);
    Eigen::VectorXd sub(std::max<Index>(steps - 1, 0));
    for (Index r = 0; r + 1 < steps; ++r) sub(r) = beta[static_cast<std::size_t>(r)];
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto order = descending_order(tri.eigenvalues());
    out.values = Eigen::VectorXd::Zero(kk);
    out.vectors = Eigen::MatrixXd::Zero(d, kk);
    for (Index i = 0; i < kk && i < steps; ++i) {
      const Index col = order[static_cast<std::size_t>(i)];
      out.values(i) = std::max(tri.eigenvalues()(col), 0.0);
      out.vectors.col(i) = basis.leftCols(steps) * tri.eigenvectors().col(col);
      out.vectors.col(i).normalize();
    }
  }
  return out;
}

bool canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return false;
  Index best = 0;
  for (Index r = 1; r < v.size(); ++r) {
    if (std::abs(v(r)) > std::abs(v(best))) best = r;
  }
  if (v(best) < 0.0) {
    v = -v;
    return true;
  }
  return false;
}

}  // namespace wpca::linalg
