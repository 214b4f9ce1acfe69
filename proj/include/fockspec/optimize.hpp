#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fockspec/model.hpp"

namespace fockspec {

/// Location and value of a fiber extremum q -> w(p, q).
struct FiberExtremum {
  Point3 q{};
  double value = 0.0;
  bool converged = false;
};

namespace detail {

inline Point3 to_point(const Eigen::Vector3d& x) { return {x[0], x[1], x[2]}; }
inline Eigen::Vector3d to_vec(const Point3& x) { return {x[0], x[1], x[2]}; }

// Newton iteration for an extremum of q -> w(p, q); sign = +1 minimizes, -1 maximizes.
inline FiberExtremum polish_fiber(const ModelSpec& model, const Point3& p, Point3 q, double sign, int max_iter = 100) {
  auto f = [&](const Point3& x) { return sign * model.w(p, x); };
  double fq = f(q);
  for (int it = 0; it < max_iter; ++it) {
    const Point3 pq = p + q;
    const Eigen::Vector3d g = sign * (model.grad_eps(pq) + model.grad_eps(q));
    if (g.norm() <= 1e-14 * (1.0 + std::abs(fq))) return {q, sign * fq, true};
    const Matrix3 h = sign * (model.hessian_eps(pq) + model.hessian_eps(q));
    Eigen::Vector3d step;
    Eigen::LLT<Matrix3> llt(h);
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(g);
    } else {
      step = -g / std::max(1.0, h.norm());
    }
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Point3 cand = q + detail::to_point(t * step);
      const double fc = f(cand);
      if (fc <= fq) {
        const bool stalled = (t * step).norm() <= 1e-16 * (1.0 + norm(q));
        q = cand;
        fq = fc;
        accepted = true;
        if (stalled) return {q, sign * fq, true};
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return {q, sign * fq, g.norm() <= 1e-9};
  }
  return {q, sign * fq, false};
}

inline FiberExtremum fiber_extremum(const ModelSpec& model, const Point3& p, double sign, int scan) {
  const double pi = std::numbers::pi;
  const double h = 2.0 * pi / scan;
  Point3 best{0, 0, 0};
  double best_val = sign * model.w(p, best);
  for (int i = 0; i < scan; ++i)
    for (int j = 0; j < scan; ++j)
      for (int k = 0; k < scan; ++k) {
        const Point3 q{-pi + (i + 0.5) * h, -pi + (j + 0.5) * h, -pi + (k + 0.5) * h};
        const double val = sign * model.w(p, q);
        if (val < best_val) {
          best_val = val;
          best = q;
        }
      }
  // Extra seeds besides the scan.
  const std::array<Point3, 3> seeds{Point3{0, 0, 0}, -0.5 * p, wrap_to_torus(-0.5 * p + Point3{pi, pi, pi})};
  for (const auto& s : seeds) {
    const double val = sign * model.w(p, s);
    if (val < best_val) {
      best_val = val;
      best = s;
    }
  }
  FiberExtremum r = polish_fiber(model, p, best, sign);
  r.q = wrap_to_torus(r.q);
  return r;
}

}  // namespace detail

/// @brief Global minimum of q -> w(p, q) over the torus (value is m(p)).
inline FiberExtremum fiber_minimum(const ModelSpec& model, const Point3& p, int scan = 8) {
  return detail::fiber_extremum(model, p, +1.0, scan);
}

/// @brief Global maximum of q -> w(p, q) over the torus (value is M(p)).
inline FiberExtremum fiber_maximum(const ModelSpec& model, const Point3& p, int scan = 8) {
  return detail::fiber_extremum(model, p, -1.0, scan);
}

/// Global maximum M of w over the torus squared, by a p-scan of fiber maxima and a joint Newton polish.
inline double w_max(const ModelSpec& model, int scan = 12) {
  const double pi = std::numbers::pi;
  const double h = 2.0 * pi / scan;
  Point3 bp{0, 0, 0}, bq{0, 0, 0};
  double best = -1e300;
  for (int i = 0; i < scan; ++i)
    for (int j = 0; j < scan; ++j)
      for (int k = 0; k < scan; ++k) {
        const Point3 p{-pi + (i + 0.5) * h, -pi + (j + 0.5) * h, -pi + (k + 0.5) * h};
        const FiberExtremum e = fiber_maximum(model, p, 6);
        if (e.value > best) {
          best = e.value;
          bp = p;
          bq = e.q;
        }
      }
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  for (int it = 0; it < 100; ++it) {
    const Point3 pq = bp + bq;
    const Eigen::Vector3d gp = model.grad_eps(bp), gpq = model.grad_eps(pq), gq = model.grad_eps(bq);
    Vec6 g;
    g << gp + gpq, gpq + gq;
    if (g.norm() < 1e-14) break;
    const Matrix3 hp = model.hessian_eps(bp), hpq = model.hessian_eps(pq), hq = model.hessian_eps(bq);
    Mat6 hm;
    hm << hp + hpq, hpq, hpq, hpq + hq;
    Vec6 step = -(-hm).ldlt().solve(-g);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Point3 np = bp + Point3{t * step[0], t * step[1], t * step[2]};
      const Point3 nq = bq + Point3{t * step[3], t * step[4], t * step[5]};
      const double val = model.w(np, nq);
      if (val >= best) {
        bp = np;
        bq = nq;
        best = val;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return best;
}

}  // namespace fockspec
