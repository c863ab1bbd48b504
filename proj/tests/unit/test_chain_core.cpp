#include <gtest/gtest.h>

#include <cmath>

#include "mixgap/chain_core.hpp"
#include "mixgap/errors.hpp"
#include "test_support.hpp"

namespace mixgap {
namespace {

using testing::footnote_chain;
using testing::random_ergodic;
using testing::random_reversible;
using testing::two_state;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mixgap::Error thrown";
  return ErrorCode::ParseError;
}

TEST(TransitionMatrix, RejectsBadRows) {
  Matrix bad(2, 2);
  bad << 0.5, 0.4, 0.5, 0.5;
  EXPECT_EQ(code_of([&] { TransitionMatrix{bad}; }), ErrorCode::InvalidMatrix);
  bad << -0.1, 1.1, 0.5, 0.5;
  EXPECT_EQ(code_of([&] { TransitionMatrix{bad}; }), ErrorCode::InvalidMatrix);
  EXPECT_EQ(code_of([&] { TransitionMatrix{Matrix(2, 3)}; }), ErrorCode::InvalidMatrix);
}

TEST(StationaryDistribution, RejectsNonProbabilityVectors) {
  Vector v(2);
  v << 0.7, 0.7;
  EXPECT_EQ(code_of([&] { StationaryDistribution{v}; }), ErrorCode::InvalidDistribution);
  v << 1.5, -0.5;
  EXPECT_EQ(code_of([&] { StationaryDistribution{v}; }), ErrorCode::InvalidDistribution);
}

TEST(Ergodicity, DetectsPeriodicAndReducibleChains) {
  EXPECT_TRUE(is_ergodic(footnote_chain()));
  Matrix flip(2, 2);
  flip << 0, 1, 1, 0;
  EXPECT_FALSE(is_ergodic(TransitionMatrix(flip)));
  Matrix absorbing(2, 2);
  absorbing << 1, 0, 0.5, 0.5;
  EXPECT_FALSE(is_ergodic(TransitionMatrix(absorbing)));
  EXPECT_EQ(code_of([&] { stationary_distribution(TransitionMatrix(flip)); }), ErrorCode::NonErgodic);
  EXPECT_EQ(code_of([&] { spectral_summary(TransitionMatrix(absorbing)); }), ErrorCode::NonErgodic);
}

TEST(Ergodicity, WielandtExtremalChainNeedsTheFullBound) {
  // Cycle 0->1->...->d-1->0 plus the chord d-1 -> 1: primitive with exponent (d-1)^2 + 1.
  const int d = 6;
  Matrix m = Matrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) m(i, i + 1) = 1.0;
  m(d - 1, 0) = 0.5;
  m(d - 1, 1) = 0.5;
  EXPECT_TRUE(is_ergodic(TransitionMatrix(m)));
}

TEST(StationaryDistribution, FootnoteChainClosedForm) {
  const auto pi = stationary_distribution(footnote_chain());
  EXPECT_NEAR(pi(0), 0.25, 1e-14);
  EXPECT_NEAR(pi(1), 0.25, 1e-14);
  EXPECT_NEAR(pi(2), 0.5, 1e-14);
  EXPECT_DOUBLE_EQ(pi.pi_min(), pi.probs().minCoeff());
}

TEST(StationaryDistribution, IsLeftFixedPointForRandomChains) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_ergodic(2 + trial % 9, rng);
    const auto pi = stationary_distribution(m);
    EXPECT_LT((pi.probs().transpose() * m.entries() - pi.probs().transpose()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(TimeReversal, FootnoteChainEntries) {
  const auto m = footnote_chain();
  const auto rev = time_reversal(m, stationary_distribution(m));
  Matrix expected(3, 3);
  expected << 0, 0, 1, 1, 0, 0, 0, 0.5, 0.5;
  EXPECT_LT((rev.entries() - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TimeReversal, IsAnInvolutionWithTheSameStationaryLaw) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_ergodic(5, rng);
    const auto pi = stationary_distribution(m);
    const auto rev = time_reversal(m, pi);
    EXPECT_LT((pi.probs().transpose() * rev.entries() - pi.probs().transpose()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((time_reversal(rev, pi).entries() - m.entries()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(RescaledMatrix, FootnoteEntryAndSimilarity) {
  const auto m = footnote_chain();
  const auto l = rescaled_matrix(m, stationary_distribution(m));
  EXPECT_NEAR(l.entries(2, 0), std::sqrt(2.0) * 0.5, 1e-15);
  SplitMix64 rng(5);
  const auto r = random_reversible(6, rng);
  const auto lr = rescaled_matrix(r, stationary_distribution(r));
  EXPECT_LT((lr.entries - lr.entries.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dilation, FootnoteDilationIsNotStronglyConnected) {
  const auto m = footnote_chain();
  const auto dil = dilate(m, stationary_distribution(m));
  const Eigen::Index n = dil.entries.rows();
  Eigen::MatrixXi reach = (dil.entries.array() > 0).cast<int>().matrix();
  reach += Eigen::MatrixXi::Identity(n, n);
  for (int step = 0; step < 8; ++step) reach = ((reach * reach).array() > 0).cast<int>().matrix();
  EXPECT_FALSE((reach.array() > 0).all());
}

TEST(Dilation, StochasticFlavourIsReversibleWithHalfStationaryLaw) {
  SplitMix64 rng(17);
  const auto m = random_ergodic(4, rng);
  const auto pi = stationary_distribution(m);
  const auto dil = dilate(m, pi);
  EXPECT_EQ(dil.flavor, DilationFlavor::Stochastic);
  Vector pi2(8);
  pi2 << pi.probs(), pi.probs();
  pi2 /= 2.0;
  const TransitionMatrix s(dil.entries);
  EXPECT_TRUE(is_reversible(s, StationaryDistribution(pi2)));
}

TEST(Dilation, SymmetricSpectrumIsPlusMinusSingularValues) {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial;
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = rng.uniform() - 0.3;
    const auto ev = eigen::dense_symmetric_eigenvalues(dilate_sym(a).entries);
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector sv = svd.singularValues();
    for (int i = 0; i < d; ++i) {
      EXPECT_NEAR(ev[static_cast<std::size_t>(i)], sv(i), 1e-12);
      EXPECT_NEAR(ev[static_cast<std::size_t>(2 * d - 1 - i)], -sv(i), 1e-12);
    }
  }
}

TEST(SpectralGaps, LazyChainHasEqualGaps) {
  SplitMix64 rng(29);
  const auto base = random_reversible(5, rng);
  const TransitionMatrix lazy(0.5 * (Matrix::Identity(5, 5) + base.entries()));
  const auto g = spectral_gaps(lazy, stationary_distribution(lazy));
  EXPECT_NEAR(g.gamma, g.gamma_star, 1e-12);
}

TEST(SpectralGaps, NonReversibleChainIsRejected) {
  const auto m = footnote_chain();
  EXPECT_EQ(code_of([&] { spectral_gaps(m, stationary_distribution(m)); }), ErrorCode::NotReversible);
}

TEST(PseudoSpectralGap, TwoStateClosedForm) {
  const auto m = two_state(0.25);
  const auto pi = stationary_distribution(m);
  const auto g = pseudo_spectral_gap(m, pi);
  EXPECT_NEAR(g.value, 0.75, 1e-12);
  EXPECT_EQ(g.k, 1);
  const auto gd = dilated_pseudo_spectral_gap(m, pi);
  EXPECT_NEAR(gd.value, 0.5, 1e-12);
  EXPECT_EQ(gd.k, 1);
}

TEST(PseudoSpectralGap, FootnoteChainNeedsPowersAboveOne) {
  const auto m = footnote_chain();
  const auto pi = stationary_distribution(m);
  EXPECT_NEAR(multiplicative_gap(m, pi, 1), 0.0, 1e-12);
  const auto g = pseudo_spectral_gap(m, pi, 50);
  EXPECT_GT(g.value, 0.0);
  EXPECT_GE(g.k, 2);
  EXPECT_LE(g.k_scanned, 50);
  EXPECT_GE(g.k_scanned, g.k);
}

TEST(PseudoSpectralGap, ReversibleChainsCollapseToAbsoluteGap) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = random_reversible(2 + trial % 7, rng);
    const auto pi = stationary_distribution(m);
    const double gs = spectral_gaps(m, pi).gamma_star;
    const auto ps = pseudo_spectral_gap(m, pi);
    EXPECT_NEAR(ps.value, gs * (2 - gs), 1e-9);
    EXPECT_EQ(ps.k, 1);
    EXPECT_NEAR(dilated_pseudo_spectral_gap(m, pi).value, gs, 1e-9);
  }
}

TEST(PseudoSpectralGap, PerPowerDilationIdentity) {
  SplitMix64 rng(37);
  const auto m = random_ergodic(4, rng);
  const auto pi = stationary_distribution(m);
  for (int k = 1; k <= 6; ++k) {
    const double s = dilated_gap(m, pi, k);
    EXPECT_NEAR(multiplicative_gap(m, pi, k), s * (2 - s), 1e-10) << "k=" << k;
  }
}

TEST(PseudoSpectralGap, SandwichBetweenDilatedAndTwiceDilated) {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_sparse_ergodic(3 + trial % 6, rng);
    const auto pi = stationary_distribution(m);
    const double ps = pseudo_spectral_gap(m, pi, 40).value;
    const double pd = dilated_pseudo_spectral_gap(m, pi, 40).value;
    EXPECT_LE(pd, ps + 1e-12);
    EXPECT_LE(ps, 2 * pd + 1e-12);
  }
}

TEST(MatrixPower, StaysStochastic) {
  SplitMix64 rng(43);
  const auto m = random_ergodic(7, rng);
  const auto p = matrix_power(m, 200);
  EXPECT_LT((p.entries().rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_TRUE(matrix_power(m, 0).entries() == Matrix::Identity(7, 7));
}

TEST(MixingTime, FootnoteChainIsSmallAndInsideSandwiches) {
  const auto m = footnote_chain();
  const auto t = mixing_time(m);
  EXPECT_GE(t, 1);
  EXPECT_LE(t, 10);
  const auto s = spectral_summary(m, 50);
  EXPECT_EQ(s.t_mix, t);
  for (auto mode : {BoundMode::Pseudo, BoundMode::Dilated}) {
    const auto b = tmix_bounds(s, s.pi_min, mode);
    EXPECT_LE(b.lower, static_cast<double>(t));
    EXPECT_GE(b.upper, static_cast<double>(t));
  }
  EXPECT_EQ(code_of([&] { tmix_bounds(s, s.pi_min, BoundMode::Reversible); }), ErrorCode::MissingGap);
}

TEST(MixingTime, ReversibleBoundArithmetic) {
  SpectralSummary s;
  s.gamma_star = 0.5;
  const auto b = tmix_bounds(s, 0.5, BoundMode::Reversible);
  EXPECT_NEAR(b.lower, std::log(2.0), 1e-15);
  EXPECT_NEAR(b.upper, 2 * std::log(8.0), 1e-14);
}

TEST(MixingTime, TwoStateInsideReversibleSandwich) {
  const auto m = two_state(0.25);
  const auto s = spectral_summary(m);
  ASSERT_TRUE(s.reversible);
  const auto b = tmix_bounds(s, s.pi_min, BoundMode::Reversible);
  EXPECT_LE(b.lower, static_cast<double>(s.t_mix));
  EXPECT_GE(b.upper, static_cast<double>(s.t_mix));
}

TEST(MixingTime, MonotoneInXiAndCapped) {
  SplitMix64 rng(47);
  const auto m = random_ergodic(5, rng);
  EXPECT_LE(mixing_time(m, 0.25), mixing_time(m, 0.01));
  Matrix slow(2, 2);
  slow << 1 - 1e-7, 1e-7, 1e-7, 1 - 1e-7;
  EXPECT_EQ(code_of([&] { mixing_time(TransitionMatrix(slow), 0.25, 1000); }), ErrorCode::Overflow);
}

TEST(Balance, DoublyStochasticIsOne) {
  const auto u = TransitionMatrix::uniform(5);
  EXPECT_DOUBLE_EQ(balance(stationary_distribution(u)), 1.0);
  EXPECT_NEAR(balance(stationary_distribution(footnote_chain())), 2.0, 1e-13);
}

TEST(SpectralSummary, ReversibleFieldsOnlyForReversibleChains) {
  EXPECT_FALSE(spectral_summary(footnote_chain(), 50).gamma_star.has_value());
  const auto s = spectral_summary(two_state(0.25));
  ASSERT_TRUE(s.gamma_star.has_value());
  EXPECT_NEAR(*s.gamma_star, 0.5, 1e-12);
  EXPECT_NEAR(s.gamma_ps_dilated, 0.5, 1e-12);
}

}  // namespace
}  // namespace mixgap
