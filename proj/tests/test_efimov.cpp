#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fockspec/efimov.hpp"

using namespace fockspec;

TEST(Efimov, ParamsValidation) {
  EXPECT_THROW(EfimovParams(1.2, 1.0), std::invalid_argument);
  EXPECT_THROW(EfimovParams(0.5, -1.0), std::invalid_argument);
  const EfimovParams p = EfimovParams::from_s(0.5);
  EXPECT_NEAR(p.l0, 2.0 / std::sqrt(3.0), 1e-14);
}

TEST(Efimov, ZeroHarmonicQuadratureMatchesClosedForm) {
  const EfimovParams p;
  for (double lam = 0.1; lam <= 5.0; lam += 0.1)
    EXPECT_NEAR(legendre_eigenvalues_single(p, lam, 0), s0_closed_form(p, lam), 1e-8) << lam;
}

TEST(Efimov, ZeroHarmonicAtOrigin) {
  const EfimovParams p;
  EXPECT_NEAR(s0_closed_form(p, 0.0), p.l0 * std::asin(p.s) / p.s, 1e-12);
  EXPECT_NEAR(s0_closed_form(p, 0.0), 1.2091995761561452, 1e-12);
}

TEST(Efimov, RootSolvesClosedFormEquation) {
  const EfimovParams p;
  const double y = zero_harmonic_root(p);
  EXPECT_NEAR(s0_closed_form(p, y), 1.0, 1e-12);
  EXPECT_NEAR(y, 0.413697, 1e-6);
  const double pi = std::numbers::pi;
  EXPECT_NEAR(4.0 / std::sqrt(3.0) * std::sinh(pi * y / 6.0), y * std::cosh(pi * y / 2.0), 1e-12);
}

TEST(Efimov, RootGrowsWithL0) {
  const EfimovParams a(0.5, 2.0 / std::sqrt(3.0));
  const EfimovParams b(0.5, 4.0 / std::sqrt(3.0));
  EXPECT_GT(zero_harmonic_root(b), zero_harmonic_root(a));
}

TEST(Efimov, NoRootBelowUnitPeak) { EXPECT_THROW(zero_harmonic_root(EfimovParams(0.5, 0.5)), std::domain_error); }

TEST(Efimov, HarmonicsAreEven) {
  const EfimovParams p;
  for (int l = 0; l <= 3; ++l)
    EXPECT_NEAR(legendre_eigenvalues_single(p, 0.8, l), legendre_eigenvalues_single(p, -0.8, l), 1e-13);
}

TEST(Efimov, CoefficientFromZeroHarmonic) {
  const EfimovEstimate e = u_of_mu(EfimovParams{}, 1.0);
  EXPECT_NEAR(e.y_star, 0.413697, 1e-6);
  EXPECT_NEAR(e.U0_lower, 2.0 * e.y_star / (4.0 * std::numbers::pi), 1e-6);
  EXPECT_GE(e.U0, e.U0_lower - 1e-12);
  EXPECT_NEAR(e.U0, 0.065842, 1e-6);
}

TEST(Efimov, CoefficientStableInLMax) {
  EXPECT_NEAR(u_of_mu(EfimovParams{}, 1.0, 8).U0, u_of_mu(EfimovParams{}, 1.0, 12).U0, 1e-3);
}

TEST(Efimov, CoefficientNonIncreasingInMu) {
  const EfimovParams p;
  double prev = 1e300;
  for (double mu : {0.05, 0.2, 0.5, 1.0, 1.1}) {
    const double u = u_of_mu(p, mu, 12).U0;
    EXPECT_LE(u, prev + 1e-12);
    prev = u;
  }
  EXPECT_EQ(u_of_mu(p, 2.0).U0, 0.0);
}

TEST(Efimov, TooSmallLMaxIsRejected) { EXPECT_THROW(u_of_mu(EfimovParams{}, 0.001, 3), std::runtime_error); }

TEST(Efimov, PositiveForEveryAdmissibleS) {
  for (double s = 0.05; s < 0.7; s += 0.1) {
    const EfimovParams p = EfimovParams::from_s(s);
    EXPECT_GT(s0_closed_form(p, 0.0), 1.0);
    EXPECT_GT(u_of_mu(p, 1.0, 12).U0, 0.0);
  }
}

TEST(Efimov, KernelIsEvenAndDecays) {
  const EfimovParams p;
  EXPECT_NEAR(harmonic_kernel(p, 1.3, 0), harmonic_kernel(p, -1.3, 0), 1e-14);
  EXPECT_LT(std::abs(harmonic_kernel(p, 10.0, 0)), 1e-3 * std::abs(harmonic_kernel(p, 0.0, 0)));
}

TEST(Efimov, NystromMatrixSymmetric) {
  const Eigen::MatrixXd s = assemble_S_r(EfimovParams{}, 5.0, 1, 40);
  EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Efimov, SobolevCountsGrowWithR) {
  const SobolevReport rep = sobolev_limit_check(EfimovParams{}, 1.0, {10.0, 20.0, 40.0}, 8, 200);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_GE(rep.rows[i].count, rep.rows[i - 1].count);
}

TEST(Efimov, ConventionSelection) {
  const ConventionReport rep = select_angle_convention(EfimovParams{}, {0.5, 1.0});
  EXPECT_EQ(rep.selected, AngleConvention::arccos);
  EXPECT_LT(rep.deviation_arccos, 1e-6);
  EXPECT_GT(rep.deviation_reflected, 1e-2);
}

TEST(Efimov, LogFitRecoversSyntheticSlope) {
  std::vector<std::pair<double, double>> pts;
  for (int k = 4; k <= 10; ++k) {
    const double d = std::pow(10.0, -k);
    pts.push_back({-d, 0.16 * std::abs(std::log(d)) + 1.0});
  }
  const LogFit f = fit_log_asymptotics(pts);
  EXPECT_NEAR(f.slope, 0.16, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-10);
  EXPECT_THROW(fit_log_asymptotics({{-1e-3, 1.0}, {-1e-4, 1.0}}), std::invalid_argument);
}
