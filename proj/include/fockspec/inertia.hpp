#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fockspec {

/// Sylvester inertia of a symmetric matrix.
struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  /// Smallest |eigenvalue| among the 1x1 and 2x2 pivot blocks of the factorization.
  double min_abs_pivot = 0.0;
};

/**
 * @brief Inertia of a symmetric matrix from its Bunch-Kaufman LDL^T factorization.
 *
 * Only the lower triangle of `a` is referenced. Pivots with |d| <= zero_tol
 * are counted as zero.
 */
inline Inertia inertia(Eigen::MatrixXd a, double zero_tol = 0.0) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) throw std::invalid_argument("inertia: matrix is not square");
  Inertia out;
  if (n == 0) return out;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n, ipiv.data());
  if (info < 0) throw std::runtime_error("inertia: dsytrf rejected argument " + std::to_string(-info));

  out.min_abs_pivot = std::numeric_limits<double>::infinity();
  auto classify = [&](double d) {
    out.min_abs_pivot = std::min(out.min_abs_pivot, std::abs(d));
    if (std::abs(d) <= zero_tol) {
      ++out.zero;
    } else if (d < 0.0) {
      ++out.negative;
    } else {
      ++out.positive;
    }
  };
  for (lapack_int k = 0; k < n;) {
    if (ipiv[static_cast<std::size_t>(k)] > 0) {
      classify(a(k, k));
      k += 1;
    } else {
      const double p = a(k, k), q = a(k + 1, k + 1), r = a(k + 1, k);
      const double mean = 0.5 * (p + q);
      const double rad = std::hypot(0.5 * (p - q), r);
      classify(mean - rad);
      classify(mean + rad);
      k += 2;
    }
  }
  return out;
}

/// Inertia of A - shift * I.
inline Inertia shifted_inertia(const Eigen::MatrixXd& a, double shift, double zero_tol = 0.0) {
  Eigen::MatrixXd b = a;
  b.diagonal().array() -= shift;
  return inertia(std::move(b), zero_tol);
}

/// n(lambda, A): number of eigenvalues of A strictly greater than lambda.
inline int count_above(const Eigen::MatrixXd& a, double lambda) { return shifted_inertia(a, lambda).positive; }

}  // namespace fockspec
