#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockspec/birman_schwinger.hpp"
#include "fockspec/inertia.hpp"
#include "fockspec/model.hpp"
#include "fockspec/parallel.hpp"
#include "fockspec/torus_grid.hpp"

namespace fockspec {

/**
 * @brief Truncation of H to C + span{delta_i} + span{e_ij}.
 *
 * Orthonormal coordinates: 0-sector scalar, sqrt(w_i) f1(p_i) on the
 * one-particle sector, and on the symmetric two-particle sector
 * sqrt(2 w_i w_j) f2(p_i, p_j) for i < j and w_i f2(p_i, p_i) on the diagonal.
 */
struct FockMatrix {
  Eigen::MatrixXd entries;
  std::size_t n = 0;
  std::string grid_ref;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
  /// Row of the pair (i, j), i >= j.
  std::size_t pair_index(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    return 1 + n + i * (i + 1) / 2 + j;
  }
};

inline constexpr std::size_t fock_dimension_limit = 40000;

inline std::size_t fock_dimension(std::size_t n) { return 1 + n + n * (n + 1) / 2; }

inline FockMatrix assemble_H(const ModelSpec& model, const TorusGrid& grid, unsigned workers = 0) {
  const std::size_t n = grid.size();
  const std::size_t dim = fock_dimension(n);
  if (dim > fock_dimension_limit) {
    std::ostringstream os;
    os << "assemble_H: dimension " << dim << " exceeds the limit " << fock_dimension_limit
       << "; use a grid with fewer nodes";
    throw std::length_error(os.str());
  }
  const auto& nodes = grid.nodes();
  const auto& wts = grid.weights();
  FockMatrix h;
  h.n = n;
  h.grid_ref = grid.descriptor();
  h.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  auto& a = h.entries;

  std::vector<double> v(n), sw(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = model.v(nodes[i]);
    sw[i] = std::sqrt(wts[i]);
  }
  a(0, 0) = model.u0();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(1 + i);
    a(0, ii) = a(ii, 0) = sw[i] * v[i];
    a(ii, ii) = model.u(nodes[i]);
  }
  parallel_for(
      n,
      [&](std::size_t i) {
        for (std::size_t j = 0; j <= i; ++j) {
          const auto pij = static_cast<Eigen::Index>(h.pair_index(i, j));
          a(pij, pij) = model.w(nodes[i], nodes[j]);
          const auto ri = static_cast<Eigen::Index>(1 + i);
          const auto rj = static_cast<Eigen::Index>(1 + j);
          if (i == j) {
            a(ri, pij) = a(pij, ri) = sw[i] * v[i];
          } else {
            a(ri, pij) = a(pij, ri) = sw[j] * v[j] / std::sqrt(2.0);
            a(rj, pij) = a(pij, rj) = sw[i] * v[i] / std::sqrt(2.0);
          }
        }
      },
      workers);
  return h;
}

/// Number of eigenvalues of the truncated H strictly below z, by the inertia of H - z.
inline EigencountReport oracle_count_below(const FockMatrix& h, double z) {
  const Inertia in = shifted_inertia(h.entries, z);
  if (in.min_abs_pivot <= 1e-12) {
    std::ostringstream os;
    os << "oracle count_below: eigenvalue within 1e-12 of z = " << z << "; perturb z";
    throw std::runtime_error(os.str());
  }
  return {z, in.negative, "oracle", in.min_abs_pivot};
}

inline EigencountReport oracle_count_below(const ModelSpec& model, const TorusGrid& grid, double z) {
  return oracle_count_below(assemble_H(model, grid), z);
}

/// The k smallest eigenvalues of the truncated H, ascending.
inline std::vector<double> low_spectrum(const FockMatrix& h, std::size_t k) {
  if (k > h.dim()) throw std::invalid_argument("low_spectrum: k exceeds the matrix dimension");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.entries, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("low_spectrum: eigensolver failed");
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
  return out;
}

inline std::vector<double> low_spectrum(const ModelSpec& model, const TorusGrid& grid, std::size_t k) {
  return low_spectrum(assemble_H(model, grid), k);
}

}  // namespace fockspec
