#pragma once

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fockspec/inertia.hpp"
#include "fockspec/model.hpp"

namespace fockspec {

/// Kernel parameters s = l2 / l1 and l0 = (1 - s^2)^(-1/2).
struct EfimovParams {
  double s = 0.5;
  double l0 = 2.0 / std::sqrt(3.0);

  EfimovParams() = default;
  EfimovParams(double s_, double l0_) : s(s_), l0(l0_) {
    if (!(std::abs(s) < 1.0)) throw std::invalid_argument("EfimovParams: need |s| < 1");
    if (!(l0 > 0.0)) throw std::invalid_argument("EfimovParams: need l0 > 0");
  }
  static EfimovParams from_s(double s) { return EfimovParams(s, 1.0 / std::sqrt(1.0 - s * s)); }
  static EfimovParams from_quadratic(const QuadraticData& q) { return EfimovParams(q.s, q.l0); }
};

/**
 * @brief Which angle enters sinh(lambda * angle) in the kernel.
 *
 * `arccos` uses arccos(s t); `reflected` uses pi - arccos(s t), i.e. the
 * kernel with t -> -t.
 */
enum class AngleConvention { arccos, reflected };

struct EfimovEstimate {
  double y_star = 0.0;
  std::vector<std::pair<int, double>> per_harmonic;
  double U0 = 0.0;
  double U0_lower = 0.0;
  double mu = 1.0;
  int l_max = 0;
};

namespace detail {

inline double gk_integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                           unsigned max_depth = 15) {
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, tol, &err);
  if (!std::isfinite(val)) throw std::runtime_error("quadrature returned a non-finite value");
  if (err > 1e-8 * std::max(1.0, std::abs(val))) {
    std::ostringstream os;
    os << "quadrature did not converge (error estimate " << err << ")";
    throw std::runtime_error(os.str());
  }
  return val;
}

// sinh(lambda a) / sinh(pi lambda) for 0 <= a <= pi, stable for large |lambda|.
inline double sinh_ratio(double lambda, double a) {
  const double x = std::abs(lambda);
  if (x < 1e-8) return a / std::numbers::pi;
  return std::exp(x * (a - std::numbers::pi)) * (-std::expm1(-2.0 * x * a)) / (-std::expm1(-2.0 * std::numbers::pi * x));
}

}  // namespace detail

/// @brief Kernel S^(t; lambda) = l0 sinh(lambda angle) / (2 pi sqrt(1 - s^2 t^2) sinh(pi lambda)).
inline double s_hat_kernel(const EfimovParams& p, double t, double lambda,
                           AngleConvention conv = AngleConvention::arccos) {
  if (std::abs(t) > 1.0) throw std::domain_error("s_hat_kernel: |t| must be <= 1");
  const double st = p.s * t;
  double a = std::acos(st);
  if (conv == AngleConvention::reflected) a = std::numbers::pi - a;
  return p.l0 * detail::sinh_ratio(lambda, a) / (2.0 * std::numbers::pi * std::sqrt(1.0 - st * st));
}

/// @brief Legendre coefficients s_l(lambda) = 2 pi int_{-1}^{1} S^(t; lambda) P_l(t) dt, l = 0..l_max.
inline std::vector<double> legendre_eigenvalues(const EfimovParams& p, double lambda, int l_max,
                                                AngleConvention conv = AngleConvention::arccos) {
  if (l_max < 0) throw std::invalid_argument("legendre_eigenvalues: l_max must be >= 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(l_max + 1));
  for (int l = 0; l <= l_max; ++l) {
    auto f = [&](double t) { return s_hat_kernel(p, t, lambda, conv) * boost::math::legendre_p(l, t); };
    out.push_back(2.0 * std::numbers::pi * detail::gk_integrate(f, -1.0, 1.0));
  }
  return out;
}

/// Single Legendre coefficient s_l(lambda).
inline double legendre_eigenvalues_single(const EfimovParams& p, double lambda, int l,
                                          AngleConvention conv = AngleConvention::arccos) {
  auto f = [&](double t) { return s_hat_kernel(p, t, lambda, conv) * boost::math::legendre_p(l, t); };
  return 2.0 * std::numbers::pi * detail::gk_integrate(f, -1.0, 1.0);
}

/// @brief Closed form of the zero harmonic: l0 sinh(lambda arcsin s) / (s lambda cosh(pi lambda / 2)).
inline double s0_closed_form(const EfimovParams& p, double lambda) {
  const double x = std::abs(lambda);
  const double as = std::asin(p.s);
  if (x < 1e-8) return p.l0 * as / p.s;
  const double num = (-std::expm1(-2.0 * x * as)) / x;
  const double den = 1.0 + std::exp(-std::numbers::pi * x);
  return p.l0 / p.s * std::exp(x * (as - 0.5 * std::numbers::pi)) * num / den;
}

/// @brief The unique y* > 0 with s0(y*) = 1, by bisection.
inline double zero_harmonic_root(const EfimovParams& p) {
  if (!(s0_closed_form(p, 0.0) > 1.0)) throw std::domain_error("zero_harmonic_root: s0(0) <= 1, no root");
  double hi = 1.0;
  while (s0_closed_form(p, hi) > 1.0) {
    hi *= 2.0;
    if (hi > 100.0) throw std::runtime_error("zero_harmonic_root: no sign change up to Y = 100");
  }
  double lo = 0.0;
  double prev = s0_closed_form(p, lo);
  for (int i = 1; i <= 64; ++i) {
    const double y = hi * i / 64.0;
    const double val = s0_closed_form(p, y);
    if (val > prev) throw std::runtime_error("zero_harmonic_root: s0 is not decreasing");
    prev = val;
  }
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (s0_closed_form(p, mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Measure of {y in R : f(y) > mu} for an even f on [0, y_max], by scanning and bisection.
template <class F>
double superlevel_measure(F&& f, double mu, double y_max, double step = 1e-2, double resolution = 1e-6) {
  auto above = [&](double y) { return f(y) > mu; };
  double total = 0.0;
  double y0 = 0.0;
  bool in0 = above(0.0);
  double start = 0.0;
  const int n = static_cast<int>(std::ceil(y_max / step));
  for (int i = 1; i <= n; ++i) {
    const double y1 = std::min(y_max, i * step);
    const bool in1 = above(y1);
    if (in1 != in0) {
      double lo = y0, hi = y1;
      while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        (above(mid) == in0 ? lo : hi) = mid;
      }
      const double cross = 0.5 * (lo + hi);
      if (in0) {
        total += cross - start;
      } else {
        start = cross;
      }
    }
    y0 = y1;
    in0 = in1;
  }
  if (in0) total += y_max - start;
  return 2.0 * total;
}

/**
 * @brief U(mu) = (4 pi)^-1 sum_l (2l + 1) mes{y : s_l(y) > mu}.
 *
 * The scan stops where s_0 drops below mu, since |s_l| <= s_0. The last two
 * harmonics must contribute zero measure.
 */
inline EfimovEstimate u_of_mu(const EfimovParams& p, double mu, int l_max = 8,
                              AngleConvention conv = AngleConvention::arccos) {
  if (!(mu > 0.0)) throw std::invalid_argument("u_of_mu: mu must be positive");
  if (l_max < 2) throw std::invalid_argument("u_of_mu: l_max must be >= 2");
  EfimovEstimate est;
  est.mu = mu;
  est.l_max = l_max;
  double y_max = 0.0;
  if (s0_closed_form(p, 0.0) > mu) {
    y_max = 1.0;
    while (s0_closed_form(p, y_max) > mu) y_max *= 2.0;
  }
  double sum = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    double mes = 0.0;
    if (y_max > 0.0) {
      auto f = [&](double y) { return legendre_eigenvalues_single(p, y, l, conv); };
      mes = superlevel_measure(f, mu, y_max);
    }
    est.per_harmonic.emplace_back(l, mes);
    sum += (2 * l + 1) * mes;
  }
  if (est.per_harmonic[static_cast<std::size_t>(l_max)].second > 0.0 ||
      est.per_harmonic[static_cast<std::size_t>(l_max - 1)].second > 0.0) {
    throw std::runtime_error("u_of_mu: the last harmonics still contribute; increase l_max");
  }
  est.U0 = sum / (4.0 * std::numbers::pi);
  est.U0_lower = est.per_harmonic[0].second / (4.0 * std::numbers::pi);
  if (s0_closed_form(p, 0.0) > 1.0) est.y_star = zero_harmonic_root(p);
  return est;
}

/**
 * @brief Harmonic kernel S_l(y) = (l0 / 2 pi) int_{-1}^{1} P_l(t) / (cosh y + s t) dt.
 *
 * The reflected convention uses cosh y - s t.
 */
inline double harmonic_kernel(const EfimovParams& p, double y, int l, AngleConvention conv = AngleConvention::arccos) {
  const double ch = std::cosh(y);
  const double s = conv == AngleConvention::arccos ? p.s : -p.s;
  if (l == 0) return p.l0 / (2.0 * std::numbers::pi) * std::log((ch + std::abs(s)) / (ch - std::abs(s))) / std::abs(s);
  auto f = [&](double t) { return boost::math::legendre_p(l, t) / (ch + s * t); };
  return p.l0 / (2.0 * std::numbers::pi) * detail::gk_integrate(f, -1.0, 1.0, 1e-12);
}

/// Gauss-Legendre nodes and weights on (a, b).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = w[hi] = wt;
  }
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = mid + half * x[static_cast<std::size_t>(i)];
    w[static_cast<std::size_t>(i)] *= half;
  }
  return {x, w};
}

/// @brief Symmetrized Nystrom matrix of the convolution with S_l(x - x') on (0, r).
inline Eigen::MatrixXd assemble_S_r(const EfimovParams& p, double r, int l, int n_nodes,
                                    AngleConvention conv = AngleConvention::arccos) {
  if (!(r > 0.0) || n_nodes < 1) throw std::invalid_argument("assemble_S_r: need r > 0 and n_nodes >= 1");
  const auto [x, w] = gauss_legendre(n_nodes, 0.0, r);
  Eigen::MatrixXd a(n_nodes, n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = 0; j <= i; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      const double k = harmonic_kernel(p, x[ui] - x[uj], l, conv);
      a(i, j) = a(j, i) = std::sqrt(w[ui] * w[uj]) * k;
    }
  return a;
}

struct SobolevRow {
  double r = 0.0;
  int count = 0;
  double density = 0.0;
  double gap = 0.0;
  std::vector<int> per_harmonic;
};

struct SobolevReport {
  double mu = 1.0;
  double U = 0.0;
  std::vector<SobolevRow> rows;
};

/// n(mu, S_r) = sum_l (2l + 1) #{eigenvalues of S_{r,l} > mu}, compared with U(mu) via n / (2r).
inline SobolevReport sobolev_limit_check(const EfimovParams& p, double mu, const std::vector<double>& r_list,
                                         int l_max = 8, int n_nodes = 400) {
  SobolevReport rep;
  rep.mu = mu;
  rep.U = u_of_mu(p, mu, l_max).U0;
  for (double r : r_list) {
    SobolevRow row;
    row.r = r;
    for (int l = 0; l <= l_max; ++l) {
      const int c = count_above(assemble_S_r(p, r, l, n_nodes), mu);
      row.per_harmonic.push_back(c);
      row.count += (2 * l + 1) * c;
    }
    row.density = row.count / (2.0 * r);
    row.gap = std::abs(row.density - rep.U);
    rep.rows.push_back(row);
  }
  return rep;
}

/// Numerical Fourier transform int_R S_l(y) exp(-i lambda y) dy of the harmonic kernel.
inline double kernel_fourier_transform(const EfimovParams& p, int l, double lambda,
                                       AngleConvention conv = AngleConvention::arccos, double y_cut = 40.0) {
  double total = 0.0;
  for (double a = 0.0; a < y_cut; a += 1.0) {
    auto f = [&](double y) { return harmonic_kernel(p, y, l, conv) * std::cos(lambda * y); };
    total += detail::gk_integrate(f, a, a + 1.0, 1e-10, 3);
  }
  return 2.0 * total;
}

struct ConventionReport {
  AngleConvention selected = AngleConvention::arccos;
  /// max |FT(S_l) - s_l| over the test lambdas and l = 0, 1, per convention of the s_l.
  double deviation_arccos = 0.0;
  double deviation_reflected = 0.0;
};

/// Compares the Fourier transform of the kernel with s_l under both angle conventions.
inline ConventionReport select_angle_convention(const EfimovParams& p,
                                                const std::vector<double>& lambdas = {0.25, 0.5, 1.0, 2.0}) {
  ConventionReport rep;
  for (double lam : lambdas)
    for (int l = 0; l <= 1; ++l) {
      const double ft = kernel_fourier_transform(p, l, lam);
      rep.deviation_arccos =
          std::max(rep.deviation_arccos, std::abs(ft - legendre_eigenvalues_single(p, lam, l, AngleConvention::arccos)));
      rep.deviation_reflected = std::max(
          rep.deviation_reflected, std::abs(ft - legendre_eigenvalues_single(p, lam, l, AngleConvention::reflected)));
    }
  rep.selected = rep.deviation_arccos <= rep.deviation_reflected ? AngleConvention::arccos : AngleConvention::reflected;
  return rep;
}

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Least-squares fit N = slope |log(m - z)| + intercept.
inline LogFit fit_log_asymptotics(const std::vector<std::pair<double, double>>& points, double m = 0.0) {
  if (points.size() < 4) throw std::invalid_argument("fit_log_asymptotics: need at least 4 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [z, count] = points[static_cast<std::size_t>(i)];
    if (!(z < m)) throw std::invalid_argument("fit_log_asymptotics: every z must be below m");
    a(i, 0) = std::abs(std::log(m - z));
    a(i, 1) = 1.0;
    b(i) = count;
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  return {c[0], c[1], std::sqrt((a * c - b).squaredNorm() / double(n))};
}

}  // namespace fockspec
