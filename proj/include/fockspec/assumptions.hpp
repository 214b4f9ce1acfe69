#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockspec/friedrichs.hpp"
#include "fockspec/model.hpp"
#include "fockspec/torus_grid.hpp"

namespace fockspec {

struct ClauseResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/**
 * @brief Outcome of the sampled checks on a model.
 *
 * Clause failures are entries in the report; nothing here throws on a failed clause.
 */
struct AssumptionReport {
  std::vector<ClauseResult> clauses;
  double delta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double lambda_c = 0.0;
  double min_outside_ball = 0.0;
  std::optional<QuadraticData> quadratic;

  bool all_passed() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.passed; });
  }
  const ClauseResult& clause(const std::string& name) const {
    for (const auto& c : clauses)
      if (c.name == name) return c;
    throw std::out_of_range("no clause named " + name);
  }
};

struct AssumptionOptions {
  double delta = 0.5;
  int samples = 100;
  std::uint64_t seed = 12345;
  int scan_per_axis = 8;
  double margin = 1e-6;
  int lambda_radii = 4;
  /// Replaces w(p, q) in the evenness, minimum and two-sided bound checks.
  std::function<double(const Point3&, const Point3&)> w_override;
};

namespace detail {

inline Point3 random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng), u(rng)};
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace detail

inline AssumptionReport check_assumptions(const ModelSpec& model, const TorusGrid& grid,
                                          const AssumptionOptions& opt = {}) {
  AssumptionReport rep;
  rep.delta = opt.delta;
  const double m = model.m();
  std::function<double(const Point3&, const Point3&)> w = opt.w_override;
  if (!w) w = [&model](const Point3& p, const Point3& q) { return model.w(p, q); };
  std::mt19937_64 rng(opt.seed);
  const double pi = std::numbers::pi;

  {
    double worst = 0.0;
    for (int k = 0; k < opt.samples; ++k) {
      const Point3 p = detail::random_point(rng, pi), q = detail::random_point(rng, pi);
      worst = std::max(worst, std::abs(model.u(p) - model.u(-p)));
      worst = std::max(worst, std::abs(model.v(q) - model.v(-q)));
      worst = std::max(worst, std::abs(w(p, q) - w(-p, -q)));
    }
    rep.clauses.push_back({"a_evenness", worst <= 1e-12, "max asymmetry " + detail::fmt(worst)});
  }

  {
    const TorusGrid g = build_grid(opt.scan_per_axis, false, 0);
    const auto& nodes = g.nodes();
    double min_out = std::numeric_limits<double>::infinity();
    for (const auto& p : nodes)
      for (const auto& q : nodes)
        if (norm2(p) + norm2(q) >= opt.delta * opt.delta) min_out = std::min(min_out, w(p, q) - m);
    double at_origin = w(Point3{0, 0, 0}, Point3{0, 0, 0}) - m;
    rep.min_outside_ball = min_out;
    rep.clauses.push_back({"b_unique_minimum", min_out > opt.margin && std::abs(at_origin) <= 1e-12,
                           "min of w - m outside the ball " + detail::fmt(min_out) + ", w(0,0) - m " +
                               detail::fmt(at_origin)});
  }

  {
    bool ok = true;
    std::string why;
    try {
      const auto [hpp, hpq] = finite_difference_hessians(w);
      Eigen::Matrix<double, 6, 6> full;
      full << hpp, hpq, hpq.transpose(), hpp;
      const double lo = Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>>(full).eigenvalues().minCoeff();
      rep.quadratic = quadratic_data_from_hessians(hpp, hpq, 1e-5);
      ok = lo > 0.0;
      why = "smallest eigenvalue of the (p,q) Hessian " + detail::fmt(lo);
    } catch (const std::exception& e) {
      ok = false;
      why = e.what();
    }
    rep.clauses.push_back({"c_hessians", ok, why});
  }

  {
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
    for (int k = 0; k < opt.samples; ++k) {
      const Point3 p = detail::random_point(rng, opt.delta / std::sqrt(3.0));
      const Point3 q = detail::random_point(rng, opt.delta / std::sqrt(3.0));
      const double r2 = norm2(p) + norm2(q);
      if (r2 == 0.0) continue;
      const double ratio = (w(p, q) - m) / r2;
      c1 = std::min(c1, ratio);
      c2 = std::max(c2, ratio);
    }
    rep.c1 = c1;
    rep.c2 = c2;
    rep.clauses.push_back({"d_two_sided_bound", c1 > 0.0 && std::isfinite(c2),
                           "C1 " + detail::fmt(c1) + ", C2 " + detail::fmt(c2)});
  }

  if (model.form_factor().identically_zero()) {
    rep.clauses.push_back({"e_lambda_gap", true, "v is identically zero; clause is vacuous"});
  } else {
    const double lam0 = lambda_fn(model, grid, Point3{0, 0, 0}, m);
    double c = std::numeric_limits<double>::infinity();
    const std::vector<Point3> dirs{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 1}, {-1, 2, 1}};
    for (const auto& d : dirs) {
      const Point3 e = (1.0 / norm(d)) * d;
      for (int k = 0; k < opt.lambda_radii; ++k) {
        const double r = opt.delta * std::pow(0.5, k);
        const double diff = lam0 - lambda_fn(model, grid, r * e, m);
        c = std::min(c, diff / (r * r));
      }
    }
    rep.lambda_c = c;
    rep.clauses.push_back({"e_lambda_gap", c > 0.0, "fitted c " + detail::fmt(c)});
  }
  return rep;
}

}  // namespace fockspec
