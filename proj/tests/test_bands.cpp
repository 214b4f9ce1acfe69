#include <gtest/gtest.h>

#include "fockspec/bands.hpp"

using namespace fockspec;

namespace {

const TorusGrid& grid() {
  static const TorusGrid g = band_grid();
  return g;
}

}  // namespace

TEST(Bands, DeepShiftGivesSeparatedTwoParticleBranch) {
  const ModelSpec m = ModelSpec::cubic(-5.0);
  const BandStructure b = band_structure(m, grid(), 5);
  EXPECT_EQ(b.band_case, BandStructure::Case::i);
  ASSERT_TRUE(b.two_branch.has_value());
  EXPECT_LT(b.two_branch->hi, m.m());
  EXPECT_EQ(b.tau_ess, b.two_branch->lo);
  EXPECT_TRUE(b.gap_resolved);
  EXPECT_EQ(b.spectrum.size(), 2u);
  EXPECT_EQ(b.fibers.size(), 125u);
}

TEST(Bands, IntermediateShiftMergesBranches) {
  const ModelSpec m = ModelSpec::cubic(10.0);
  const BandStructure b = band_structure(m, grid(), 5);
  EXPECT_EQ(b.band_case, BandStructure::Case::ii);
  ASSERT_TRUE(b.two_branch.has_value());
  EXPECT_EQ(b.two_branch->hi, m.m());
  EXPECT_GT(b.boundary_points, 0);
  EXPECT_TRUE(b.boundary_ok);
  EXPECT_EQ(b.spectrum.size(), 1u);
}

TEST(Bands, ResonanceShiftHasNoTwoParticleBranch) {
  const ModelSpec base = ModelSpec::cubic();
  const ModelSpec m = base.with_c(tune_resonance(base, grid()));
  const BandStructure b = band_structure(m, grid(), 5);
  EXPECT_EQ(b.band_case, BandStructure::Case::iii);
  EXPECT_FALSE(b.two_branch.has_value());
  EXPECT_EQ(b.tau_ess, m.m());
  EXPECT_NEAR(b.three_branch.hi, 13.5, 1e-9);
}

TEST(Bands, FiberReportsAreConsistent) {
  const ModelSpec m = ModelSpec::cubic(10.0);
  const auto reps = two_branch_profile(m, grid(), {Point3{0, 0, 0}, Point3{3.0, 3.0, 3.0}});
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_TRUE(reps[0].eigenvalue.has_value());
  EXPECT_FALSE(reps[1].eigenvalue.has_value());
  for (const auto& r : reps) EXPECT_LE(r.m_p, r.M_p);
  EXPECT_LT(*reps[0].eigenvalue, m.m());
}

TEST(Bands, RejectsTinyResolution) { EXPECT_THROW(band_structure(ModelSpec::cubic(), grid(), 1), std::invalid_argument); }
