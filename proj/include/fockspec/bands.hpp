#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockspec/friedrichs.hpp"
#include "fockspec/optimize.hpp"
#include "fockspec/parallel.hpp"
#include "fockspec/torus_grid.hpp"

namespace fockspec {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * @brief Essential-spectrum structure assembled from a fiber sweep.
 *
 * Case i: Delta(p, m) < 0 for every p; the two-particle branch [a, b] lies below m.
 * Case ii: Delta(p, m) changes sign; the branch [a, m] merges with [m, M].
 * Case iii: Delta(p, m) >= 0 for every p; no two-particle branch.
 */
struct BandStructure {
  enum class Case { i, ii, iii };
  Case band_case = Case::iii;
  std::optional<Interval> two_branch;
  Interval three_branch;
  std::vector<Interval> spectrum;
  double tau_ess = 0.0;
  double delta_m_min = 0.0;
  double delta_m_max = 0.0;
  double tol = 0.0;

  double sweep_error = 0.0;
  bool gap_resolved = false;
  int upper_screen_failures = 0;
  int boundary_points = 0;
  bool boundary_ok = true;
  double lipschitz = 0.0;
  int p_resolution = 0;
  std::vector<FiberReport> fibers;
};

inline std::string to_string(BandStructure::Case c) {
  switch (c) {
    case BandStructure::Case::i:
      return "i";
    case BandStructure::Case::ii:
      return "ii";
    case BandStructure::Case::iii:
      return "iii";
  }
  return "?";
}

/// Integration grid used by the band sweep unless the caller supplies one.
inline TorusGrid band_grid() { return build_grid(4, true, 10, 2); }

/// FiberReport at p. Values of Delta(p, m) within `tol` of zero count as non-negative.
inline FiberReport fiber_report(const ModelSpec& model, const TorusGrid& grid, const Point3& p, double tol) {
  FiberReport r;
  r.p = p;
  r.m_p = fiber_minimum(model, p).value;
  r.M_p = fiber_maximum(model, p).value;
  r.delta_at_m = delta(model, grid, p, model.m());
  if (r.delta_at_m < -tol) r.eigenvalue = fiber_eigenvalue(model, grid, p, model.m());
  return r;
}

inline double default_band_tol(const ModelSpec& model) {
  return 1e-8 * (1.0 + std::abs(model.u(Point3{0, 0, 0})));
}

inline std::vector<FiberReport> two_branch_profile(const ModelSpec& model, const TorusGrid& grid,
                                                   const std::vector<Point3>& p_list, double tol = -1.0,
                                                   unsigned workers = 0) {
  const double t = tol > 0.0 ? tol : default_band_tol(model);
  std::vector<FiberReport> out(p_list.size());
  parallel_for(p_list.size(), [&](std::size_t i) { out[i] = fiber_report(model, grid, p_list[i], t); }, workers);
  return out;
}

/**
 * @brief Sweeps a uniform p_resolution^3 grid (p = 0 included) and assembles the band structure.
 */
inline BandStructure band_structure(const ModelSpec& model, const TorusGrid& grid, int p_resolution = 17,
                                    unsigned workers = 0, double tol = -1.0) {
  if (p_resolution < 2) throw std::invalid_argument("band_structure: p_resolution must be >= 2");
  const TorusGrid pg = build_grid(p_resolution, false, 0);
  BandStructure bs;
  bs.p_resolution = p_resolution;
  bs.tol = tol > 0.0 ? tol : default_band_tol(model);
  bs.fibers = two_branch_profile(model, grid, pg.nodes(), bs.tol, workers);

  const double m = model.m();
  const double big_m = w_max(model);
  bs.three_branch = {m, big_m};

  bs.delta_m_min = 1e300;
  bs.delta_m_max = -1e300;
  double a = 1e300, b = -1e300;
  for (const auto& f : bs.fibers) {
    bs.delta_m_min = std::min(bs.delta_m_min, f.delta_at_m);
    bs.delta_m_max = std::max(bs.delta_m_max, f.delta_at_m);
    if (f.eigenvalue) {
      a = std::min(a, *f.eigenvalue);
      b = std::max(b, *f.eigenvalue);
    }
  }

  std::vector<int> upper(bs.fibers.size(), 0);
  parallel_for(
      bs.fibers.size(),
      [&](std::size_t i) { upper[i] = delta_upper(model, grid, bs.fibers[i].p, big_m) > 0.0 ? 1 : 0; }, workers);
  for (int u : upper) bs.upper_screen_failures += u;

  // Neighbors on the periodic p-lattice: index (i, j, k) with node = (i * n + j) * n + k.
  const int n = p_resolution;
  auto idx = [n](int i, int j, int k) {
    return static_cast<std::size_t>((((i % n + n) % n) * n + ((j % n + n) % n)) * n + ((k % n + n) % n));
  };
  const double h = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const FiberReport& f = bs.fibers[idx(i, j, k)];
        const std::array<std::size_t, 6> nb{idx(i + 1, j, k), idx(i - 1, j, k), idx(i, j + 1, k),
                                            idx(i, j - 1, k), idx(i, j, k + 1), idx(i, j, k - 1)};
        double max_jump = 0.0;
        bool on_boundary = false;
        for (std::size_t q : nb) {
          const FiberReport& g = bs.fibers[q];
          max_jump = std::max(max_jump, std::abs(f.delta_at_m - g.delta_at_m));
          if (f.eigenvalue && g.eigenvalue) {
            const double dz = std::abs(*f.eigenvalue - *g.eigenvalue);
            bs.sweep_error = std::max(bs.sweep_error, dz);
            bs.lipschitz = std::max(bs.lipschitz, dz / h);
          }
          if (f.eigenvalue && !g.eigenvalue) on_boundary = true;
        }
        if (on_boundary) {
          ++bs.boundary_points;
          if (m - *f.eigenvalue > max_jump + bs.tol) bs.boundary_ok = false;
        }
      }

  if (bs.delta_m_min >= -bs.tol) {
    bs.band_case = BandStructure::Case::iii;
    bs.tau_ess = m;
    bs.spectrum = {bs.three_branch};
  } else if (bs.delta_m_max < -bs.tol) {
    bs.band_case = BandStructure::Case::i;
    bs.two_branch = Interval{a, b};
    bs.tau_ess = a;
    bs.gap_resolved = (m - b) > 3.0 * bs.sweep_error;
    if (bs.gap_resolved) {
      bs.spectrum = {*bs.two_branch, bs.three_branch};
    } else {
      bs.spectrum = {Interval{a, big_m}};
    }
  } else {
    bs.band_case = BandStructure::Case::ii;
    bs.two_branch = Interval{a, m};
    bs.tau_ess = a;
    bs.spectrum = {Interval{a, big_m}};
  }
  return bs;
}

}  // namespace fockspec
