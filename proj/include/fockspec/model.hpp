#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockspec/point.hpp"

namespace fockspec {

using Matrix3 = Eigen::Matrix3d;
using LatticeVector = std::array<int, 3>;

/// One Fourier coefficient of the dispersion: the term value * (cos(p, s) - 1).
struct EpsTerm {
  LatticeVector s{};
  double value = 0.0;
};

/**
 * @brief Even form factor v on the torus.
 *
 * - constant:  v(q) = params[0] (default 1)
 * - cos_poly:  v(q) = params[0] + params[1] cos q1 + params[2] cos q2 + params[3] cos q3
 * - abs_sin:   v(q) = params[0] |sin q1|
 */
class FormFactor {
 public:
  enum class Kind { constant, cos_poly, abs_sin };

  FormFactor() = default;
  FormFactor(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {
    switch (kind_) {
      case Kind::constant:
        if (params_.empty()) params_ = {1.0};
        if (params_.size() != 1) throw std::invalid_argument("form factor 'constant' takes one parameter");
        break;
      case Kind::cos_poly:
        if (params_.empty() || params_.size() > 4)
          throw std::invalid_argument("form factor 'cos_poly' takes 1 to 4 parameters");
        params_.resize(4, 0.0);
        break;
      case Kind::abs_sin:
        if (params_.empty()) params_ = {1.0};
        if (params_.size() != 1) throw std::invalid_argument("form factor 'abs_sin' takes one parameter");
        break;
    }
  }

  static FormFactor constant(double value) { return FormFactor(Kind::constant, {value}); }
  static FormFactor cos_poly(std::vector<double> coeffs) { return FormFactor(Kind::cos_poly, std::move(coeffs)); }
  static FormFactor abs_sin(double amplitude) { return FormFactor(Kind::abs_sin, {amplitude}); }

  static FormFactor from_name(const std::string& name, std::vector<double> params) {
    if (name == "constant") return FormFactor(Kind::constant, std::move(params));
    if (name == "cos_poly") return FormFactor(Kind::cos_poly, std::move(params));
    if (name == "abs_sin") return FormFactor(Kind::abs_sin, std::move(params));
    throw std::invalid_argument("unknown form factor kind '" + name + "' (expected constant, cos_poly, abs_sin)");
  }

  double operator()(const Point3& q) const {
    switch (kind_) {
      case Kind::constant:
        return params_[0];
      case Kind::cos_poly:
        return params_[0] + params_[1] * std::cos(q[0]) + params_[2] * std::cos(q[1]) + params_[3] * std::cos(q[2]);
      case Kind::abs_sin:
        return params_[0] * std::abs(std::sin(q[0]));
    }
    return 0.0;
  }

  /// Multiplies v by t.
  FormFactor scaled(double t) const {
    FormFactor out = *this;
    for (double& a : out.params_) a *= t;
    return out;
  }

  bool identically_zero() const {
    return std::all_of(params_.begin(), params_.end(), [](double a) { return a == 0.0; });
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }

  std::string name() const {
    switch (kind_) {
      case Kind::constant:
        return "constant";
      case Kind::cos_poly:
        return "cos_poly";
      case Kind::abs_sin:
        return "abs_sin";
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::constant;
  std::vector<double> params_{1.0};
};

/**
 * @brief Model data (eps, c, u0, v) of the three-sector Hamiltonian.
 *
 * eps(p) = eps0 + sum_s eps_hat(s) (cos(p, s) - 1) with eps_hat(s) <= 0 and
 * eps_hat(s) = eps_hat(-s); u = eps + c; w(p, q) = eps(p) + eps(p + q) + eps(q).
 * A coefficient given for s only is mirrored onto -s.
 */
class ModelSpec {
 public:
  ModelSpec(std::vector<EpsTerm> eps_terms, double eps0, double c, double u0, FormFactor v)
      : eps0_(eps0), c_(c), u0_(u0), v_(std::move(v)) {
    std::map<LatticeVector, double> coeffs;
    for (const auto& t : eps_terms) {
      if (t.s == LatticeVector{0, 0, 0}) throw std::invalid_argument("eps coefficient at s = 0 is not allowed");
      if (t.value > 0.0) {
        std::ostringstream os;
        os << "eps coefficient at s = (" << t.s[0] << "," << t.s[1] << "," << t.s[2] << ") is positive (" << t.value
           << "); coefficients must be <= 0";
        throw std::invalid_argument(os.str());
      }
      auto [it, inserted] = coeffs.emplace(t.s, t.value);
      if (!inserted && it->second != t.value) throw std::invalid_argument("duplicate eps coefficient with differing values");
    }
    for (const auto& [s, value] : std::map<LatticeVector, double>(coeffs)) {
      const LatticeVector minus{-s[0], -s[1], -s[2]};
      auto it = coeffs.find(minus);
      if (it == coeffs.end()) {
        coeffs.emplace(minus, value);
      } else if (it->second != value) {
        throw std::invalid_argument("eps coefficients are not symmetric under s -> -s");
      }
    }
    for (const auto& [s, value] : coeffs)
      if (value != 0.0) terms_.push_back({s, value});
    if (terms_.empty()) throw std::invalid_argument("dispersion needs at least one nonzero coefficient");
    if (hessian_eps(Point3{0, 0, 0}).llt().info() != Eigen::Success)
      throw std::invalid_argument("dispersion Hessian at the origin is degenerate");
  }

  /// eps = 3 - sum cos q_i, v = 1, u0 = 0.
  static ModelSpec cubic(double c = 0.0, FormFactor v = FormFactor::constant(1.0), double u0 = 0.0) {
    std::vector<EpsTerm> t;
    for (int i = 0; i < 3; ++i) {
      LatticeVector e{0, 0, 0};
      e[static_cast<std::size_t>(i)] = 1;
      t.push_back({e, -0.5});
    }
    return ModelSpec(std::move(t), 0.0, c, u0, std::move(v));
  }

  double epsilon(const Point3& p) const { return eps0_ + excitation(p); }

  /// eps(p) - eps(0), evaluated without cancellation near p = 0.
  double excitation(const Point3& p) const {
    double e = 0.0;
    for (const auto& t : terms_) {
      const double sh = std::sin(0.5 * phase(p, t.s));
      e -= 2.0 * t.value * sh * sh;
    }
    return e;
  }

  /// eps(a + s) - eps(a), evaluated without cancellation for small s.
  double eps_increment(const Point3& a, const Point3& s) const {
    double e = 0.0;
    for (const auto& t : terms_) {
      const double ps = phase(s, t.s);
      e -= 2.0 * t.value * std::sin(phase(a, t.s) + 0.5 * ps) * std::sin(0.5 * ps);
    }
    return e;
  }

  Eigen::Vector3d grad_eps(const Point3& p) const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const auto& t : terms_) g -= t.value * std::sin(phase(p, t.s)) * svec(t.s);
    return g;
  }

  Matrix3 hessian_eps(const Point3& p) const {
    Matrix3 h = Matrix3::Zero();
    for (const auto& t : terms_) {
      const Eigen::Vector3d s = svec(t.s);
      h -= t.value * std::cos(phase(p, t.s)) * (s * s.transpose());
    }
    return h;
  }

  double u(const Point3& p) const { return epsilon(p) + c_; }
  double v(const Point3& q) const { return v_(q); }
  double w(const Point3& p, const Point3& q) const { return epsilon(p) + epsilon(p + q) + epsilon(q); }
  /// w(p, q) - m, accurate near the minimum.
  double w_above_min(const Point3& p, const Point3& q) const {
    return excitation(p) + excitation(p + q) + excitation(q);
  }

  /// Global minimum of w, attained at (0, 0).
  double m() const { return 3.0 * eps0_; }

  const std::vector<EpsTerm>& eps_terms() const { return terms_; }
  double eps0() const { return eps0_; }
  double c() const { return c_; }
  double u0() const { return u0_; }
  const FormFactor& form_factor() const { return v_; }

  ModelSpec with_c(double c) const {
    ModelSpec out = *this;
    out.c_ = c;
    return out;
  }
  ModelSpec with_u0(double u0) const {
    ModelSpec out = *this;
    out.u0_ = u0;
    return out;
  }
  ModelSpec with_form_factor(FormFactor v) const {
    ModelSpec out = *this;
    out.v_ = std::move(v);
    return out;
  }
  ModelSpec with_eps0(double eps0) const {
    ModelSpec out = *this;
    out.eps0_ = eps0;
    return out;
  }
  /// Multiplies every eps coefficient by a > 0.
  ModelSpec with_eps_scaled(double a) const {
    if (!(a > 0.0)) throw std::invalid_argument("dispersion scale must be positive");
    ModelSpec out = *this;
    for (auto& t : out.terms_) t.value *= a;
    return out;
  }

 private:
  static double phase(const Point3& p, const LatticeVector& s) { return p[0] * s[0] + p[1] * s[1] + p[2] * s[2]; }
  static Eigen::Vector3d svec(const LatticeVector& s) { return {double(s[0]), double(s[1]), double(s[2])}; }

  std::vector<EpsTerm> terms_;
  double eps0_ = 0.0;
  double c_ = 0.0;
  double u0_ = 0.0;
  FormFactor v_;
};

inline double eval_epsilon(const ModelSpec& model, const Point3& p) { return model.epsilon(p); }
inline double eval_w(const ModelSpec& model, const Point3& p, const Point3& q) { return model.w(p, q); }

/**
 * @brief Quadratic-form data of w at its minimum.
 *
 * Hessian_pp w(0,0) = l1 W, Hessian_pq w(0,0) = l2 W with det W = 1.
 */
struct QuadraticData {
  Matrix3 W = Matrix3::Identity();
  double l1 = 0.0;
  double l2 = 0.0;
  double l = 0.0;
  double s = 0.0;
  double l0 = 0.0;
};

/// Builds QuadraticData from the two Hessian blocks of w at the origin.
inline QuadraticData quadratic_data_from_hessians(const Matrix3& hpp, const Matrix3& hpq, double tol = 1e-5) {
  const Matrix3 sym_pp = 0.5 * (hpp + hpp.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix3> es(sym_pp);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::domain_error("Hessian proportionality assumption violated: Hessian_pp is not positive definite");

  QuadraticData q;
  q.l1 = std::cbrt(sym_pp.determinant());
  q.W = sym_pp / q.l1;
  q.l2 = (hpq.array() * q.W.array()).sum() / q.W.squaredNorm();
  const double misfit = (hpq - q.l2 * q.W).norm();
  if (misfit > tol * std::max(1.0, hpq.norm())) {
    std::ostringstream os;
    os << "Hessian proportionality assumption violated: Hessian_pq is not proportional to Hessian_pp (misfit " << misfit
       << ")";
    throw std::domain_error(os.str());
  }
  if (q.l2 == 0.0) throw std::domain_error("Hessian proportionality assumption violated: l2 = 0");
  if (std::abs(q.l2) >= q.l1) throw std::domain_error("quadratic data need |l2| < l1");
  q.l = (q.l1 * q.l1 - q.l2 * q.l2) / q.l1;
  q.s = q.l2 / q.l1;
  q.l0 = std::sqrt(q.l1 * q.l1 / (q.l1 * q.l1 - q.l2 * q.l2));
  return q;
}

inline QuadraticData extract_quadratic_data(const ModelSpec& model) {
  const Matrix3 e = model.hessian_eps(Point3{0, 0, 0});
  return quadratic_data_from_hessians(2.0 * e, e);
}

/// Central finite-difference Hessian blocks (d2/dp dp, d2/dp dq) of a function of (p, q) at the origin.
template <class WFn>
std::pair<Matrix3, Matrix3> finite_difference_hessians(WFn&& w, double h = 1e-4) {
  auto eval = [&](int a, double da, int b, double db) {
    std::array<double, 6> x{};
    x[static_cast<std::size_t>(a)] += da;
    x[static_cast<std::size_t>(b)] += db;
    return w(Point3{x[0], x[1], x[2]}, Point3{x[3], x[4], x[5]});
  };
  auto second = [&](int a, int b) {
    return (eval(a, h, b, h) - eval(a, h, b, -h) - eval(a, -h, b, h) + eval(a, -h, b, -h)) / (4.0 * h * h);
  };
  Matrix3 hpp, hpq;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      hpp(i, j) = second(i, j);
      hpq(i, j) = second(i, 3 + j);
    }
  return {hpp, hpq};
}

}  // namespace fockspec
