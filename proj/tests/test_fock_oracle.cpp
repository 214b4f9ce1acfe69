#include <gtest/gtest.h>

#include "fockspec/fock_oracle.hpp"

using namespace fockspec;

TEST(FockOracle, DimensionAndLayout) {
  const TorusGrid g = build_grid(2, true, 0, 1);
  const FockMatrix h = assemble_H(ModelSpec::cubic(), g);
  EXPECT_EQ(h.dim(), 1u + 8u + 36u);
  EXPECT_EQ(h.pair_index(0, 0), 9u);
  EXPECT_EQ(h.pair_index(1, 0), 10u);
  EXPECT_EQ(h.pair_index(0, 1), 10u);
  EXPECT_EQ((h.entries - h.entries.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FockOracle, DimensionLimitIsEnforced) {
  const TorusGrid g = build_grid(9, true, 0, 1);
  EXPECT_GT(fock_dimension(g.size()), fock_dimension_limit);
  EXPECT_THROW(assemble_H(ModelSpec::cubic(), g), std::length_error);
}

TEST(FockOracle, DecoupledSectorsWhenFormFactorVanishes) {
  const TorusGrid g = build_grid(2, true, 0, 1);
  const ModelSpec m = ModelSpec::cubic(1.0, FormFactor::constant(0.0), -0.7);
  const FockMatrix h = assemble_H(m, g);
  const auto low = low_spectrum(h, 1);
  EXPECT_NEAR(low[0], -0.7, 1e-12);
  EXPECT_EQ(oracle_count_below(h, -0.5).count, 1);
  EXPECT_EQ(oracle_count_below(h, -0.8).count, 0);
}

TEST(FockOracle, LowSpectrumIsSorted) {
  const TorusGrid g = build_grid(2, true, 0, 1);
  const auto ev = low_spectrum(ModelSpec::cubic(-5.0), g, 5);
  for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_LE(ev[i - 1], ev[i]);
  EXPECT_THROW(low_spectrum(assemble_H(ModelSpec::cubic(), g), 1000), std::invalid_argument);
}

TEST(FockOracle, CountMatchesEigenvalues) {
  const TorusGrid g = build_grid(2, true, 1, 1);
  const FockMatrix h = assemble_H(ModelSpec::cubic(-3.0), g);
  const auto ev = low_spectrum(h, h.dim());
  for (double z : {-6.0, -2.0, 0.3, 4.0}) {
    int n = 0;
    for (double e : ev) n += e < z ? 1 : 0;
    EXPECT_EQ(oracle_count_below(h, z).count, n);
  }
}
