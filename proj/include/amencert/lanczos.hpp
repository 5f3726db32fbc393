#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <cmath>
#include <string>
#include <vector>

#include "amencert/errors.hpp"

namespace amencert {

template <typename Scalar>
struct EigenPair {
  Scalar value{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
  Scalar residual{};  // ||A v - value v|| / ||v||
  int matvecs = 0;
};

/// Largest algebraic eigenpair of a symmetric operator given matrix-free as
/// apply(x, y) computing y = A x. Restarted Lanczos with full
/// reorthogonalisation; each restart continues from the current Ritz vector.
template <typename Scalar, typename Apply>
EigenPair<Scalar> largest_eigenpair(Apply&& apply, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> start,
                                    Scalar tol, int max_matvecs, int krylov_dim = 60) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = start.size();
  if (n == 0) throw InputError("eigen-solve on an empty operator");

  EigenPair<Scalar> best;
  best.residual = std::numeric_limits<Scalar>::infinity();
  Vec q = start / start.norm();
  int matvecs = 0;
  Vec w(n);

  while (matvecs < max_matvecs) {
    const int m = static_cast<int>(std::min<Eigen::Index>(krylov_dim, n));
    Mat basis(n, m);
    std::vector<Scalar> alpha, beta;
    basis.col(0) = q;
    int steps = 0;
    for (int j = 0; j < m && matvecs < max_matvecs; ++j) {
      apply(basis.col(j), w);
      ++matvecs;
      ++steps;
      const Scalar a = basis.col(j).dot(w);
      const Scalar scale = w.norm();
      alpha.push_back(a);
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass) {
        const Vec coeffs = basis.leftCols(j + 1).transpose() * w;
        w.noalias() -= basis.leftCols(j + 1) * coeffs;
      }
      const Scalar b = w.norm();
      // invariant subspace reached: the Ritz pair is exact
      if (j + 1 == m || b <= std::numeric_limits<Scalar>::epsilon() * scale * 64) break;
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }

    Mat tri = Mat::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < steps) {
        tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(tri);
    const Scalar theta = es.eigenvalues()(steps - 1);
    Vec ritz = basis.leftCols(steps) * es.eigenvectors().col(steps - 1);
    ritz /= ritz.norm();

    apply(ritz, w);
    ++matvecs;
    const Scalar res = (w - theta * ritz).norm();
    if (res < best.residual) {
      best.value = theta;
      best.vector = ritz;
      best.residual = res;
    }
    if (res <= tol) break;
    q = ritz;
  }
  best.matvecs = matvecs;
  if (!(best.residual <= tol)) {
    throw NumericError("Lanczos did not converge within " + std::to_string(max_matvecs) +
                       " matrix-vector products; best residual " + std::to_string(best.residual));
  }
  return best;
}

}  // namespace amencert
