#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fockspec/assumptions.hpp"
#include "fockspec/friedrichs.hpp"
#include "fockspec/model.hpp"
#include "fockspec/optimize.hpp"

using namespace fockspec;

TEST(Model, CubicDispersionMatchesClosedForm) {
  const ModelSpec m = ModelSpec::cubic();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const Point3 p{u(rng), u(rng), u(rng)};
    EXPECT_NEAR(m.epsilon(p), 3.0 - std::cos(p[0]) - std::cos(p[1]) - std::cos(p[2]), 1e-13);
  }
  EXPECT_EQ(m.m(), 0.0);
}

TEST(Model, RejectsPositiveCoefficient) {
  EXPECT_THROW(ModelSpec({{{1, 0, 0}, 0.3}}, 0.0, 0.0, 0.0, FormFactor::constant(1.0)), std::invalid_argument);
}

TEST(Model, RejectsOriginCoefficient) {
  EXPECT_THROW(ModelSpec({{{0, 0, 0}, -1.0}}, 0.0, 0.0, 0.0, FormFactor::constant(1.0)), std::invalid_argument);
}

TEST(Model, RejectsDegenerateHessian) {
  EXPECT_THROW(ModelSpec({{{1, 0, 0}, -1.0}}, 0.0, 0.0, 0.0, FormFactor::constant(1.0)), std::invalid_argument);
}

TEST(Model, ExcitationIsAccurateNearOrigin) {
  const ModelSpec m = ModelSpec::cubic();
  const Point3 p{1e-9, 0.0, 0.0};
  EXPECT_NEAR(m.excitation(p), 0.5e-18, 1e-30);
}

TEST(Model, EpsIncrementMatchesDifference) {
  const ModelSpec m = ModelSpec::cubic();
  const Point3 a{0.3, -1.2, 2.0}, s{0.1, 0.05, -0.2};
  EXPECT_NEAR(m.eps_increment(a, s), m.epsilon(a + s) - m.epsilon(a), 1e-13);
}

TEST(Model, WMinimumAtOrigin) {
  const ModelSpec m = ModelSpec::cubic();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (int k = 0; k < 200; ++k) {
    const Point3 p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
    EXPECT_GE(m.w(p, q) - m.m(), 0.0);
  }
}

TEST(QuadraticData, CubicModel) {
  const QuadraticData q = extract_quadratic_data(ModelSpec::cubic());
  EXPECT_NEAR(q.l1, 2.0, 1e-12);
  EXPECT_NEAR(q.l2, 1.0, 1e-12);
  EXPECT_NEAR(q.l, 1.5, 1e-12);
  EXPECT_NEAR(q.s, 0.5, 1e-12);
  EXPECT_NEAR(q.l0, 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(q.W.isApprox(Matrix3::Identity(), 1e-12));
}

TEST(QuadraticData, FiniteDifferencesAgree) {
  const ModelSpec m = ModelSpec::cubic();
  const auto [hpp, hpq] = finite_difference_hessians([&](const Point3& p, const Point3& q) { return m.w(p, q); });
  const QuadraticData q = quadratic_data_from_hessians(hpp, hpq);
  EXPECT_NEAR(q.l1, 2.0, 1e-6);
  EXPECT_NEAR(q.l2, 1.0, 1e-6);
}

TEST(QuadraticData, ScalingKeepsRatios) {
  const QuadraticData a = extract_quadratic_data(ModelSpec::cubic());
  const QuadraticData b = extract_quadratic_data(ModelSpec::cubic().with_eps_scaled(2.5));
  EXPECT_NEAR(b.l1, 2.5 * a.l1, 1e-12);
  EXPECT_NEAR(b.l2, 2.5 * a.l2, 1e-12);
  EXPECT_NEAR(b.s, a.s, 1e-12);
  EXPECT_NEAR(b.l0, a.l0, 1e-12);
}

TEST(QuadraticData, AnisotropicModelStaysProportional) {
  const ModelSpec m({{{1, 0, 0}, -1.0}, {{0, 1, 0}, -0.5}, {{0, 0, 1}, -0.5}}, 0.0, 0.0, 0.0, FormFactor::constant(1.0));
  const QuadraticData q = extract_quadratic_data(m);
  EXPECT_FALSE(q.W.isApprox(Matrix3::Identity(), 1e-6));
  EXPECT_NEAR(q.W.determinant(), 1.0, 1e-12);
  EXPECT_NEAR(q.s, 0.5, 1e-12);
}

TEST(QuadraticData, NonProportionalHessiansRejected) {
  Matrix3 hpp = 2.0 * Matrix3::Identity();
  Matrix3 hpq = Matrix3::Identity();
  hpq(0, 0) = 0.2;
  EXPECT_THROW(quadratic_data_from_hessians(hpp, hpq), std::domain_error);
}

TEST(QuadraticData, AsymptoticRemainderIsCubic) {
  const ModelSpec m = ModelSpec::cubic();
  const QuadraticData q = extract_quadratic_data(m);
  const Point3 dp{0.3, -0.2, 0.5}, dq{-0.1, 0.4, 0.2};
  double k_max = 0.0;
  for (int k = 2; k <= 8; ++k) {
    const double r = std::ldexp(1.0, -k);
    const Point3 p = r * dp, q2 = r * dq;
    const Eigen::Vector3d a(p[0], p[1], p[2]), b(q2[0], q2[1], q2[2]);
    const double quad = 0.5 * (q.l1 * a.dot(q.W * a) + 2.0 * q.l2 * a.dot(q.W * b) + q.l1 * b.dot(q.W * b));
    const double rem = std::abs(m.w(p, q2) - m.m() - quad);
    k_max = std::max(k_max, rem / std::pow(norm(p) + norm(q2), 3));
  }
  EXPECT_LT(k_max, 1.0);
}

TEST(FormFactor, KindsAndNames) {
  EXPECT_EQ(FormFactor::from_name("cos_poly", {1.0, -1.0}).name(), "cos_poly");
  EXPECT_TRUE(FormFactor::constant(0.0).identically_zero());
  EXPECT_NEAR(FormFactor::cos_poly({1.0, -1.0})(Point3{0, 0, 0}), 0.0, 0.0);
  EXPECT_THROW(FormFactor::from_name("gauss", {}), std::invalid_argument);
}

TEST(Assumptions, CubicModelPassesEveryClause) {
  const TorusGrid g = build_grid(4, true, 14, 3);
  const ModelSpec m = ModelSpec::cubic();
  const AssumptionReport rep = check_assumptions(m.with_c(tune_resonance(m, g)), g);
  for (const auto& c : rep.clauses) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_GT(rep.c1, 0.0);
  EXPECT_GT(rep.lambda_c, 0.0);
}

TEST(Assumptions, SecondMinimumFailsUniqueness) {
  const TorusGrid g = build_grid(4, true, 8, 2);
  const ModelSpec m = ModelSpec::cubic();
  AssumptionOptions opt;
  const double pi = std::numbers::pi;
  opt.w_override = [&](const Point3& p, const Point3& q) {
    return std::min(m.w(p, q), m.w(p - Point3{pi, 0, 0}, q - Point3{pi, 0, 0}));
  };
  const AssumptionReport rep = check_assumptions(m, g, opt);
  EXPECT_FALSE(rep.clause("b_unique_minimum").passed);
  EXPECT_FALSE(rep.all_passed());
}
