// Frozen values produced by tests/oracles/golden_oracle.py.
#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "mixgap/confidence.hpp"
#include "test_support.hpp"

namespace mixgap {
namespace {

constexpr double kRel = 1e-9;

void expect_rel(double got, double want) { EXPECT_NEAR(got, want, kRel * std::abs(want)) << "want " << want; }

struct GoldenTerms {
  int k;
  std::int64_t n_min;
  double a_hat, b_hat, d_hat, tau, gap, g_hat;
};

constexpr std::array<GoldenTerms, 3> kGeneral{{
    {1, 29437, 0.9537543661002088, 60.46408285682925, 0.41866547893538913, 10.363440845933276, 0.5487851762568936,
     0.5487889695818677},
    {2, 14622, 1.3634146000581402, 58.69648239605535, 0.5941233872903061, 10.363440845933276, 0.8038192928174683,
     0.8038238929322982},
    {3, 9753, 1.6481018566780343, 62.41964964657003, 0.720853136022848, 10.268130666125572, 0.91696274295493,
     0.916965610447279},
}};

Trajectory golden_trajectory(const TransitionMatrix& m) {
  return simulate(m, stationary_distribution(m).probs(), 100000, 42);
}

TEST(Golden, NonReversibleChainIntervalTerms) {
  const auto traj = golden_trajectory(testing::nonreversible3());
  const auto r = pssg_interval(traj, 3, 1.0, 0.05);
  ASSERT_EQ(r.per_k_terms.size(), kGeneral.size());
  for (std::size_t i = 0; i < kGeneral.size(); ++i) {
    const auto& got = r.per_k_terms[i];
    const auto& want = kGeneral[i];
    SCOPED_TRACE(want.k);
    EXPECT_EQ(got.k, want.k);
    EXPECT_EQ(skipped_counts(traj, want.k).n_min, want.n_min);
    expect_rel(got.a_hat, want.a_hat);
    expect_rel(got.b_hat, want.b_hat);
    expect_rel(got.d_hat, want.d_hat);
    expect_rel(got.tau, want.tau);
    expect_rel(got.gap_used, want.gap);
    expect_rel(got.g_hat, want.g_hat);
    EXPECT_TRUE(std::isinf(got.c_hat));
  }
  expect_rel(r.point, 0.5487889695818677);
  EXPECT_TRUE(std::isinf(r.half_width));
}

TEST(Golden, ReversibleChainIntervalTerms) {
  const auto traj = golden_trajectory(testing::birth_death3());
  const auto rep = reversible_intervals(traj, 1.0, 0.05);
  expect_rel(rep.asg.point, 0.3537435522165455);
  ASSERT_EQ(rep.asg.per_k_terms.size(), 1u);
  const auto& t = rep.asg.per_k_terms.front();
  expect_rel(t.a_hat, 1.3307730769086248);
  expect_rel(t.b_hat, 96.82404460873009);
  expect_rel(t.d_hat, 0.3881487958738188);
  expect_rel(t.tau, 7.965545573133571);
  expect_rel(t.gap_used, 0.3537435522165455);
  EXPECT_TRUE(std::isinf(t.c_hat));
}

}  // namespace
}  // namespace mixgap
