#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockspec/model.hpp"
#include "fockspec/optimize.hpp"
#include "fockspec/torus_grid.hpp"

namespace fockspec {

/// @brief Per-fiber record of the two-particle branch.
struct FiberReport {
  Point3 p{};
  double m_p = 0.0;
  double M_p = 0.0;
  double delta_at_m = 0.0;
  std::optional<double> eigenvalue;
};

/// @brief Threshold classification at z = m.
struct ThresholdClass {
  enum class Kind { resonance, eigenvalue, regular };
  Kind kind = Kind::regular;
  double delta0m = 0.0;
  double v_at_0 = 0.0;
  double tol = 0.0;
  /// Distance of the pair (|delta0m|, |v(0)|) to the two tolerance boundaries.
  double distance_delta = 0.0;
  double distance_v = 0.0;
};

inline std::string to_string(ThresholdClass::Kind k) {
  switch (k) {
    case ThresholdClass::Kind::resonance:
      return "resonance";
    case ThresholdClass::Kind::eigenvalue:
      return "eigenvalue";
    case ThresholdClass::Kind::regular:
      return "regular";
  }
  return "?";
}

/// Default integration grid for threshold quantities: graded toward the singular point.
inline TorusGrid threshold_grid() { return build_grid(8, true, 22, 4); }

/**
 * @brief Lambda(p, z) = int v^2(t) / (w(p, t) - z) dt.
 *
 * Grid nodes are offsets from the fiber minimizer q0(p), so the graded
 * refinement sits on the (possible) singular point, and the denominator is
 * formed as (m(p) - z) + [w(p, q0 + s) - m(p)]. Requires z <= m(p).
 */
inline double lambda_fn(const ModelSpec& model, const TorusGrid& grid, const Point3& p, double z) {
  const FiberExtremum fmin = fiber_minimum(model, p);
  const double mp = fmin.value;
  if (z > mp + 1e-12 * (1.0 + std::abs(mp))) {
    std::ostringstream os;
    os << "denominator sign change: z = " << z << " exceeds m(p) = " << mp;
    throw std::domain_error(os.str());
  }
  if (model.form_factor().identically_zero()) return 0.0;
  const double gap = std::max(mp - z, 0.0);
  const Point3 q0 = fmin.q;
  const Point3 pq0 = p + q0;
  auto f = [&](const Point3& s) {
    const double vt = model.v(q0 + s);
    return vt * vt / (gap + model.eps_increment(pq0, s) + model.eps_increment(q0, s));
  };
  if (gap == 0.0) return integrate_singular(grid, f);
  return integrate(grid, f);
}

/// @brief Fredholm determinant Delta(p, z) = u(p) - z - Lambda(p, z) / 2.
inline double delta(const ModelSpec& model, const TorusGrid& grid, const Point3& p, double z) {
  return model.u(p) - z - 0.5 * lambda_fn(model, grid, p, z);
}

/**
 * @brief Delta(p, z) for z >= M(p): u(p) - z + (1/2) int v^2 / (z - w(p, t)) dt.
 *
 * Used to screen for fiber eigenvalues above the band.
 */
inline double delta_upper(const ModelSpec& model, const TorusGrid& grid, const Point3& p, double z) {
  const FiberExtremum fmax = fiber_maximum(model, p);
  if (z < fmax.value - 1e-12 * (1.0 + std::abs(fmax.value))) {
    throw std::domain_error("denominator sign change: z is below M(p)");
  }
  const double gap = std::max(z - fmax.value, 0.0);
  const Point3 q1 = fmax.q;
  const Point3 pq1 = p + q1;
  auto f = [&](const Point3& s) {
    const double vt = model.v(q1 + s);
    return vt * vt / (gap - model.eps_increment(pq1, s) - model.eps_increment(q1, s));
  };
  const double integral = gap == 0.0 ? integrate_singular(grid, f) : integrate(grid, f);
  return model.u(p) - z + 0.5 * integral;
}

/**
 * @brief D(0, zeta) - D(0, 0), where D(0, zeta) = Delta(0, m - zeta^2).
 *
 * Evaluated from the combined integrand zeta^2 v^2 / ((w - m)(w - m + zeta^2)).
 */
inline double threshold_increment(const ModelSpec& model, const TorusGrid& grid, double zeta) {
  const double z2 = zeta * zeta;
  if (model.form_factor().identically_zero()) return z2;
  const Point3 origin{0, 0, 0};
  const double integral = integrate_singular(grid, [&](const Point3& t) {
    const double vt = model.v(t);
    const double w0 = model.w_above_min(origin, t);
    return vt * vt * z2 / (w0 * (w0 + z2));
  });
  return z2 + 0.5 * integral;
}

/// @brief Local minimizer q0(p) of q -> w(p, q), seeded at -(l2/l1) p.
inline Point3 minimizer_q0(const ModelSpec& model, const Point3& p) {
  const QuadraticData qd = extract_quadratic_data(model);
  const FiberExtremum r = detail::polish_fiber(model, p, -qd.s * p, +1.0, 200);
  if (!r.converged) throw std::runtime_error("minimizer_q0: descent did not converge");
  return r.q;
}

inline double m_of_p(const ModelSpec& model, const Point3& p) { return model.w(p, minimizer_q0(model, p)); }

/**
 * @brief Eigenvalue of the fiber operator below min(m(p), ceiling), if any.
 *
 * Bisection on the strictly decreasing Delta(p, .), with the lower end pushed
 * down until Delta > 0.
 */
inline std::optional<double> fiber_eigenvalue(const ModelSpec& model, const TorusGrid& grid, const Point3& p,
                                              std::optional<double> ceiling = std::nullopt) {
  double top = fiber_minimum(model, p).value;
  if (ceiling) top = std::min(top, *ceiling);
  const double d_top = delta(model, grid, p, top);
  if (!(d_top < 0.0)) return std::nullopt;

  double hi = top;
  double gap = 1.0;
  double lo = top - gap;
  int expansions = 0;
  while (delta(model, grid, p, lo) <= 0.0) {
    if (++expansions > 80) throw std::runtime_error("fiber_eigenvalue: bracket expansion exceeded budget");
    hi = lo;
    gap *= 2.0;
    lo = top - gap;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double d = delta(model, grid, p, mid);
    if (std::abs(d) <= 1e-9 * (1.0 + std::abs(mid))) return mid;
    if (d > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(mid))) break;
  }
  const double root = 0.5 * (lo + hi);
  const double res = std::abs(delta(model, grid, p, root));
  if (res > 1e-9 * (1.0 + std::abs(root))) {
    std::ostringstream os;
    os << "fiber_eigenvalue: bisection stalled with residual " << res;
    throw std::runtime_error(os.str());
  }
  return root;
}

/// @brief Shift c* that makes Delta(0, m) vanish: c* = m - eps(0) + Lambda(0, m) / 2.
inline double tune_resonance(const ModelSpec& model, const TorusGrid& grid) {
  const Point3 origin{0, 0, 0};
  return model.m() - model.epsilon(origin) + 0.5 * lambda_fn(model, grid, origin, model.m());
}

inline ThresholdClass classify_threshold(const ModelSpec& model, const TorusGrid& grid, double tol = -1.0) {
  const Point3 origin{0, 0, 0};
  ThresholdClass tc;
  tc.tol = tol > 0.0 ? tol : 1e-8 * (1.0 + std::abs(model.u(origin)));
  tc.delta0m = delta(model, grid, origin, model.m());
  tc.v_at_0 = model.v(origin);
  tc.distance_delta = std::abs(tc.delta0m) - tc.tol;
  tc.distance_v = std::abs(tc.v_at_0) - tc.tol;
  if (std::abs(tc.delta0m) > tc.tol) {
    tc.kind = ThresholdClass::Kind::regular;
  } else if (std::abs(tc.v_at_0) > tc.tol) {
    tc.kind = ThresholdClass::Kind::resonance;
  } else {
    tc.kind = ThresholdClass::Kind::eigenvalue;
  }
  return tc;
}

/// Predicted sqrt-coefficient 2 sqrt(2) pi^2 v(0)^2 l1^(-3/2) det(W)^(-1/2).
inline double threshold_slope_prediction(const ModelSpec& model) {
  const QuadraticData qd = extract_quadratic_data(model);
  const double v0 = model.v(Point3{0, 0, 0});
  return 2.0 * std::sqrt(2.0) * std::numbers::pi * std::numbers::pi * v0 * v0 / std::pow(qd.l1, 1.5) /
         std::sqrt(qd.W.determinant());
}

/// The alternative prefactor 4 pi^2 v(0)^2 l1^(-3/2) det(W)^(-1/2), reported for comparison.
inline double threshold_slope_alternative(const ModelSpec& model) {
  return threshold_slope_prediction(model) * std::sqrt(2.0);
}

struct SlopeEstimate {
  double estimate = 0.0;
  double prediction = 0.0;
  double alternative = 0.0;
  std::vector<double> zeta;
  std::vector<double> quotient;
  std::vector<double> extrapolated;
};

/**
 * @brief Right-hand derivative of zeta -> D(0, zeta) at 0.
 *
 * Difference quotients on zeta_k = 2^-k (k = 4..14) with first-order
 * Richardson extrapolation between consecutive levels.
 */
inline SlopeEstimate d_zeta_slope(const ModelSpec& model, const TorusGrid& grid, int k_min = 4, int k_max = 14) {
  if (std::abs(model.v(Point3{0, 0, 0})) == 0.0) throw std::domain_error("d_zeta_slope: needs v(0) != 0");
  SlopeEstimate out;
  out.prediction = threshold_slope_prediction(model);
  out.alternative = threshold_slope_alternative(model);
  for (int k = k_min; k <= k_max; ++k) {
    const double zeta = std::ldexp(1.0, -k);
    out.zeta.push_back(zeta);
    out.quotient.push_back(threshold_increment(model, grid, zeta) / zeta);
  }
  for (std::size_t i = 0; i + 1 < out.quotient.size(); ++i)
    out.extrapolated.push_back(2.0 * out.quotient[i + 1] - out.quotient[i]);

  const std::size_t n = out.extrapolated.size();
  if (n < 3) throw std::invalid_argument("d_zeta_slope: need at least four zeta levels");
  const double last = out.extrapolated[n - 1];
  const double d1 = std::abs(out.extrapolated[n - 1] - out.extrapolated[n - 2]);
  const double d2 = std::abs(out.extrapolated[n - 2] - out.extrapolated[n - 3]);
  if (d1 > 1e-2 * std::abs(last) && d1 > d2) {
    std::ostringstream os;
    os << "d_zeta_slope: extrapolation not converging (last differences " << d2 << ", " << d1 << ")";
    throw std::runtime_error(os.str());
  }
  out.estimate = last;
  return out;
}

struct SqrtFit {
  double coefficient = 0.0;
  double second_order = 0.0;
  double prediction = 0.0;
  double alternative = 0.0;
  double relative_residual = 0.0;
};

/**
 * @brief Fit of Delta(0, z) = A sqrt(m - z) + B (m - z) over z - m in [-1e-3, -1e-6].
 *
 * Delta(0, z) is formed as Delta(0, m) + D(0, zeta) - D(0, 0).
 */
inline SqrtFit delta_sqrt_coefficient(const ModelSpec& model, const TorusGrid& grid, int points = 13,
                                      double max_relative_residual = 1e-3) {
  const Point3 origin{0, 0, 0};
  const double d0 = delta(model, grid, origin, model.m());
  Eigen::MatrixXd a(points, 2);
  Eigen::VectorXd b(points);
  for (int i = 0; i < points; ++i) {
    const double dist = std::pow(10.0, -6.0 + 3.0 * i / (points - 1));
    const double zeta = std::sqrt(dist);
    const double value = d0 + threshold_increment(model, grid, zeta);
    a(i, 0) = 1.0;
    a(i, 1) = zeta;
    b(i) = value / zeta;
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((a * coef - b).squaredNorm() / points);
  SqrtFit fit;
  fit.coefficient = coef[0];
  fit.second_order = coef[1];
  fit.prediction = threshold_slope_prediction(model);
  fit.alternative = threshold_slope_alternative(model);
  fit.relative_residual = rms / std::max(std::abs(coef[0]), 1e-300);
  if (!(fit.relative_residual <= max_relative_residual)) {
    std::ostringstream os;
    os << "delta_sqrt_coefficient: fit rejected, relative residual " << fit.relative_residual << " (A = " << coef[0]
       << ", B = " << coef[1] << ", Delta(0,m) = " << d0 << ")";
    throw std::runtime_error(os.str());
  }
  return fit;
}

/// Bounds c, C with c |p|^k <= Delta(p, m) <= C |p|^k sampled along a ray.
struct RayBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> radii;
  std::vector<double> ratios;
};

inline RayBounds delta_bounds_on_ray(const ModelSpec& model, const TorusGrid& grid, const Point3& direction,
                                     const std::vector<double>& radii, int power) {
  const double len = norm(direction);
  if (len == 0.0) throw std::invalid_argument("delta_bounds_on_ray: zero direction");
  RayBounds rb;
  rb.lower = 1e300;
  rb.upper = -1e300;
  for (double r : radii) {
    const Point3 p = (r / len) * direction;
    const double ratio = delta(model, grid, p, model.m()) / std::pow(r, power);
    rb.radii.push_back(r);
    rb.ratios.push_back(ratio);
    rb.lower = std::min(rb.lower, ratio);
    rb.upper = std::max(rb.upper, ratio);
  }
  return rb;
}

}  // namespace fockspec
