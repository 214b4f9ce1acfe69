#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockspec/friedrichs.hpp"
#include "fockspec/inertia.hpp"
#include "fockspec/parallel.hpp"
#include "fockspec/torus_grid.hpp"

namespace fockspec {

/**
 * @brief How Delta(p_i, z) is supplied at the nodes of the counting grid.
 *
 * `quadrature` integrates the fiber determinant on a separate fine grid.
 * `nodal` uses the counting grid itself, Lambda_h(p_i, z) = sum_j w_j v_j^2 / (w(p_i, p_j) - z),
 * which makes the count identical to the truncated three-sector matrix.
 */
struct DeltaSource {
  enum class Kind { quadrature, nodal };
  Kind kind = Kind::quadrature;
  TorusGrid integration = threshold_grid();

  static DeltaSource nodal() {
    DeltaSource d;
    d.kind = Kind::nodal;
    return d;
  }
  static DeltaSource quadrature(TorusGrid g) {
    DeltaSource d;
    d.kind = Kind::quadrature;
    d.integration = std::move(g);
    return d;
  }
  std::string name() const { return kind == Kind::nodal ? "nodal" : "quadrature"; }
};

struct BSMatrix {
  double z = 0.0;
  Eigen::MatrixXd entries;
  std::vector<double> delta;
  std::string grid_ref;
  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
};

struct EigencountReport {
  double z = 0.0;
  int count = 0;
  std::string method;
  double residual_gap = 0.0;
};

namespace detail {

// w(p, q) - z formed as (w - m) + (m - z).
inline double pair_gap(const ModelSpec& model, const Point3& p, const Point3& q, double z) {
  return model.w_above_min(p, q) + (model.m() - z);
}

inline void require_below_pairs(const ModelSpec& model, const TorusGrid& grid, double z) {
  const auto& nodes = grid.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (!(pair_gap(model, nodes[i], nodes[j], z) > 0.0)) {
        std::ostringstream os;
        os << "z not below the safe region: w(p_" << i << ", p_" << j << ") <= z = " << z;
        throw std::domain_error(os.str());
      }
}

}  // namespace detail

/// Nodal determinant Delta_h(p_i, z) on the counting grid.
inline std::vector<double> nodal_delta(const ModelSpec& model, const TorusGrid& grid, double z) {
  detail::require_below_pairs(model, grid, z);
  const auto& nodes = grid.nodes();
  const auto& wts = grid.weights();
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double lam = pairwise_sum(nodes.size(), [&](std::size_t j) {
      const double vj = model.v(nodes[j]);
      return wts[j] * vj * vj / detail::pair_gap(model, nodes[i], nodes[j], z);
    });
    out[i] = model.u(nodes[i]) - z - 0.5 * lam;
  }
  return out;
}

/// Fiber determinant Delta(p_i, z) at every node, integrated on `integration`.
inline std::vector<double> quadrature_delta(const ModelSpec& model, const TorusGrid& grid, double z,
                                            const TorusGrid& integration, unsigned workers = 0) {
  const auto& nodes = grid.nodes();
  std::vector<double> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { out[i] = delta(model, integration, nodes[i], z); }, workers);
  return out;
}

inline std::vector<double> node_deltas(const ModelSpec& model, const TorusGrid& grid, double z,
                                       const DeltaSource& source, unsigned workers = 0) {
  if (source.kind == DeltaSource::Kind::nodal) return nodal_delta(model, grid, z);
  return quadrature_delta(model, grid, z, source.integration, workers);
}

/**
 * @brief Birman-Schwinger matrix T(z) on C + L^2 discretized on `grid`.
 *
 * T00 = 1 - u0 + z, T0j = -sqrt(w_j) v_j / sqrt(Delta_j),
 * Tij = sqrt(w_i w_j) v_i v_j / (2 sqrt(Delta_i Delta_j) (w(p_i, p_j) - z)).
 */
inline BSMatrix assemble_T(const ModelSpec& model, const TorusGrid& grid, double z, const std::vector<double>& deltas) {
  const auto& nodes = grid.nodes();
  const auto& wts = grid.weights();
  const std::size_t n = nodes.size();
  if (deltas.size() != n) throw std::invalid_argument("assemble_T: delta vector does not match the grid");
  for (std::size_t i = 0; i < n; ++i)
    if (!(deltas[i] > 0.0)) {
      std::ostringstream os;
      os << "z not below the safe region: Delta(p_" << i << ", z) = " << deltas[i] << " at z = " << z;
      throw std::domain_error(os.str());
    }
  detail::require_below_pairs(model, grid, z);

  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = std::sqrt(wts[i]) * model.v(nodes[i]) / std::sqrt(deltas[i]);

  BSMatrix t;
  t.z = z;
  t.delta = deltas;
  t.grid_ref = grid.descriptor();
  t.entries.resize(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
  t.entries(0, 0) = 1.0 - model.u0() + z;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i + 1);
    t.entries(0, ii) = t.entries(ii, 0) = -b[i];
    for (std::size_t j = 0; j <= i; ++j) {
      const auto jj = static_cast<Eigen::Index>(j + 1);
      const double k = 0.5 * b[i] * b[j] / detail::pair_gap(model, nodes[i], nodes[j], z);
      t.entries(ii, jj) = t.entries(jj, ii) = k;
    }
  }
  return t;
}

inline BSMatrix assemble_T(const ModelSpec& model, const TorusGrid& grid, double z,
                           const DeltaSource& source = DeltaSource::nodal(), unsigned workers = 0) {
  return assemble_T(model, grid, z, node_deltas(model, grid, z, source, workers));
}

/// N(z) = n(1, T(z)) by the inertia of T(z) - I.
inline EigencountReport count_from_T(const BSMatrix& t) {
  const Inertia in = shifted_inertia(t.entries, 1.0);
  if (in.min_abs_pivot <= 1e-12) {
    std::ostringstream os;
    os << "count_below: T(z) has an eigenvalue within 1e-12 of 1 at z = " << t.z << "; perturb z";
    throw std::runtime_error(os.str());
  }
  return {t.z, in.positive, "bs", in.min_abs_pivot};
}

inline EigencountReport count_below(const ModelSpec& model, const TorusGrid& grid, double z,
                                    const DeltaSource& source = DeltaSource::nodal(), unsigned workers = 0) {
  return count_from_T(assemble_T(model, grid, z, source, workers));
}

inline std::vector<EigencountReport> counting_sweep(const ModelSpec& model, const TorusGrid& grid,
                                                    const std::vector<double>& z_list, const DeltaSource& source,
                                                    unsigned workers = 0) {
  std::vector<EigencountReport> out;
  out.reserve(z_list.size());
  for (double z : z_list) out.push_back(count_below(model, grid, z, source, workers));
  return out;
}

/// Discrete safe threshold: the smaller of min w(p_i, p_j) and the lowest root of the nodal determinant.
inline double nodal_threshold(const ModelSpec& model, const TorusGrid& grid) {
  const auto& nodes = grid.nodes();
  const auto& wts = grid.weights();
  double wmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) wmin = std::min(wmin, model.w(nodes[i], nodes[j]));
  double tau = wmin;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto d = [&](double z) {
      double lam = 0.0;
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double vj = model.v(nodes[j]);
        lam += wts[j] * vj * vj / (model.w(nodes[i], nodes[j]) - z);
      }
      return model.u(nodes[i]) - z - 0.5 * lam;
    };
    double hi = wmin - 1e-12 * (1.0 + std::abs(wmin));
    if (d(hi) > 0.0) continue;
    double lo = hi - 1.0;
    while (d(lo) <= 0.0) lo = hi - 2.0 * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (d(mid) > 0.0 ? lo : hi) = mid;
    }
    tau = std::min(tau, lo);
  }
  return tau;
}

/// Frobenius norm of the weighted T11 block: the discrete Hilbert-Schmidt norm.
inline double hs_norm_T11(const ModelSpec& model, const TorusGrid& grid, double z,
                          const DeltaSource& source = DeltaSource{}, unsigned workers = 0) {
  const std::vector<double> d = node_deltas(model, grid, z, source, workers);
  const auto& nodes = grid.nodes();
  const auto& wts = grid.weights();
  const std::size_t n = nodes.size();
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d[i] > 0.0)) throw std::domain_error("hs_norm_T11: Delta is not positive at a node");
    b[i] = std::sqrt(wts[i]) * model.v(nodes[i]) / std::sqrt(d[i]);
  }
  const double sum = pairwise_sum(n, [&](std::size_t i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double k = 0.5 * b[i] * b[j] / detail::pair_gap(model, nodes[i], nodes[j], z);
      row += k * k;
    }
    return row;
  });
  return std::sqrt(sum);
}

struct WeylViolation {
  int sample = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int lhs = 0;
  int rhs = 0;
};

struct WeylReport {
  int samples = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::vector<WeylViolation> violations;
};

/// Random symmetric matrix with independent N(0, 1) entries above the diagonal.
inline Eigen::MatrixXd random_symmetric(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal(rng);
  return a;
}

/**
 * @brief Checks n(l1 + l2, A1 + A2) <= n(l1, A1) + n(l2, A2) on random pairs.
 */
inline WeylReport weyl_check(int sample_count, int dim, std::uint64_t seed) {
  if (sample_count < 0 || dim < 1) throw std::invalid_argument("weyl_check: need samples >= 0 and dim >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(0.05, 2.0 * std::sqrt(double(dim)));
  WeylReport rep{sample_count, dim, seed, {}};
  for (int s = 0; s < sample_count; ++s) {
    const Eigen::MatrixXd a1 = random_symmetric(dim, rng);
    const Eigen::MatrixXd a2 = random_symmetric(dim, rng);
    const double l1 = lam(rng), l2 = lam(rng);
    const int lhs = count_above(a1 + a2, l1 + l2);
    const int rhs = count_above(a1, l1) + count_above(a2, l2);
    if (lhs > rhs) rep.violations.push_back({s, l1, l2, lhs, rhs});
  }
  return rep;
}

}  // namespace fockspec
