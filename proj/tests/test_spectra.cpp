// Spectral census of the origin phase-point operator across a sign family.
// The Z_4 census has closed-form spectra, reproduced here from scratch per
// member and matched against the Gray-code walk.

#include "finwig/spectra.hpp"
#include "finwig/wigner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

namespace finwig {
namespace {

SolveOutcome solve_family(int n) {
  std::vector<IsotropicLine> used;
  for (auto& l : enumerate_lines(n)) {
    if (l.cyclic() || n % 2 == 1) used.push_back(std::move(l));
  }
  return solve(build_system(n, used));
}

TEST(MaskBits, RoundTripAndValidation) {
  auto outcome = solve_family(4);
  ASSERT_EQ(outcome.nullspace_dimension(), 4);
  EXPECT_EQ(mask_to_bits(outcome, 0), "0000");
  EXPECT_EQ(mask_to_bits(outcome, 5), "1010");
  EXPECT_EQ(bits_to_mask(outcome, "1010"), 5u);
  EXPECT_EQ(bits_to_mask(outcome, "-+-+"), 5u);
  for (std::uint64_t m = 0; m < 16; ++m) {
    EXPECT_EQ(bits_to_mask(outcome, mask_to_bits(outcome, m)), m);
  }
  EXPECT_THROW(bits_to_mask(outcome, "101"), std::invalid_argument);
  EXPECT_THROW(bits_to_mask(outcome, "10a0"), std::invalid_argument);
}

TEST(Census, QubitSingleClass) {
  auto entries = census(solve_family(2));
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].count, 2u);
  EXPECT_EQ(entries[0].representative, 0u);
  const double r3 = std::sqrt(3.0);
  ASSERT_EQ(entries[0].spectrum.values.size(), 2u);
  EXPECT_NEAR(entries[0].spectrum.values[0], (1 + r3) / 2, 1e-9);
  EXPECT_NEAR(entries[0].spectrum.values[1], (1 - r3) / 2, 1e-9);
}

TEST(Census, QuartitClosedForms) {
  auto outcome = solve_family(4);
  auto entries = census(outcome);
  ASSERT_EQ(entries.size(), 3u);

  const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
  Spectrum sqrt6{{(1 + r6) / 2, 0.5, -0.5, (1 - r6) / 2}, 1e-9};
  Spectrum tall{{(1 + 2 * r2) / 2, (1 - r2) / 2, (1 - r2) / 2, -0.5}, 1e-9};
  Spectrum wide{{(1 + r2) / 2, (1 + r2) / 2, -0.5, (1 - 2 * r2) / 2}, 1e-9};

  std::uint64_t n_sqrt6 = 0, n_tall = 0, n_wide = 0;
  for (const auto& e : entries) {
    EXPECT_NEAR(e.spectrum.sum(), 1.0, 1e-9);
    EXPECT_NEAR(e.spectrum.squared_norm(), 4.0, 1e-8);
    if (e.spectrum.approx_equal(sqrt6)) n_sqrt6 = e.count;
    if (e.spectrum.approx_equal(tall)) n_tall = e.count;
    if (e.spectrum.approx_equal(wide)) n_wide = e.count;
  }
  EXPECT_EQ(n_sqrt6, 8u);
  EXPECT_EQ(n_tall, 4u);
  EXPECT_EQ(n_wide, 4u);
}

TEST(Census, QuartitClassesFollowFreeSignPattern) {
  // The sqrt-6 spectrum appears exactly when the product of the four free
  // signs is -1 (odd mask parity). The eight even-parity members split into
  // two quartets; that split is quadratic in the free bits, not linear, so
  // the quartets are pinned as observed from a direct eigendecomposition.
  auto outcome = solve_family(4);

  const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
  Spectrum sqrt6{{(1 + r6) / 2, 0.5, -0.5, (1 - r6) / 2}, 1e-9};
  Spectrum tall{{(1 + 2 * r2) / 2, (1 - r2) / 2, (1 - r2) / 2, -0.5}, 1e-9};
  Spectrum wide{{(1 + r2) / 2, (1 + r2) / 2, -0.5, (1 - 2 * r2) / 2}, 1e-9};
  const std::set<std::uint64_t> tall_masks = {0, 6, 12, 15};

  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    SignAssignment s = family_member(outcome, mask);
    int product = s.sign(1, 1) * s.sign(1, 2) * s.sign(1, 3) * s.sign(2, 1);
    Spectrum spec =
        hermitian_eigenvalues(phase_point_operator(PhasePoint(0, 0, 4), s));
    spec.tolerance = 1e-9;
    if (product < 0) {
      EXPECT_TRUE(spec.approx_equal(sqrt6)) << mask;
    } else if (tall_masks.count(mask)) {
      EXPECT_TRUE(spec.approx_equal(tall)) << mask;
    } else {
      EXPECT_TRUE(spec.approx_equal(wide)) << mask;
    }
  }
}

TEST(Census, MatchesDirectComputation) {
  // Same census, assembled member by member through the full operator
  // construction instead of the tabulated walk.
  auto outcome = solve_family(4);
  auto entries = census(outcome);

  std::vector<CensusEntry> direct;
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    SignAssignment s = family_member(outcome, mask);
    Spectrum spec =
        hermitian_eigenvalues(phase_point_operator(PhasePoint(0, 0, 4), s));
    spec.tolerance = 1e-9;
    bool matched = false;
    for (auto& e : direct) {
      if (e.spectrum.approx_equal(spec)) {
        ++e.count;
        matched = true;
        break;
      }
    }
    if (!matched) direct.push_back({spec, 1, mask});
  }
  ASSERT_EQ(direct.size(), entries.size());
  for (const auto& d : direct) {
    bool found = false;
    for (const auto& e : entries) {
      if (e.spectrum.approx_equal(d.spectrum)) {
        EXPECT_EQ(e.count, d.count);
        EXPECT_EQ(e.representative, d.representative);
        found = true;
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(Census, OctitClassCountAndInvariants) {
  auto entries = census(solve_family(8));
  EXPECT_EQ(entries.size(), 4u);
  std::uint64_t total = 0;
  for (const auto& e : entries) {
    total += e.count;
    EXPECT_NEAR(e.spectrum.sum(), 1.0, 1e-9);
    EXPECT_NEAR(e.spectrum.squared_norm(), 8.0, 1e-8);
  }
  EXPECT_EQ(total, 1024u);
  // Entries are sorted by spectrum, descending.
  for (std::size_t i = 1; i < entries.size(); ++i) {
    EXPECT_GT(entries[i - 1].spectrum.values, entries[i].spectrum.values);
  }
}

TEST(Census, DeterministicAcrossThreadCounts) {
  auto outcome = solve_family(4);
  auto one = census(outcome, 1e-9, 1);
  auto three = census(outcome, 1e-9, 3);
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_TRUE(one[i].spectrum.approx_equal(three[i].spectrum));
    EXPECT_EQ(one[i].count, three[i].count);
    EXPECT_EQ(one[i].representative, three[i].representative);
  }
}

TEST(Census, GuardsAgainstBadInput) {
  auto inconsistent = solve(build_system(4, enumerate_lines(4)));
  ASSERT_EQ(inconsistent.kind, SolveOutcome::Kind::Inconsistent);
  EXPECT_THROW(census(inconsistent), std::invalid_argument);

  // Z_32 has 46 free signs, far beyond any walkable family.
  auto huge = solve_family(32);
  ASSERT_EQ(huge.nullspace_dimension(), 46);
  EXPECT_THROW(census(huge), std::invalid_argument);
}

}  // namespace
}  // namespace finwig
