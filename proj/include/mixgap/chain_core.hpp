#pragma once

#include <cstdint>
#include <optional>

#include "mixgap/eigensolver.hpp"

namespace mixgap {

/// Row-stochastic d x d matrix. Construction validates entries in [0,1] and
/// row sums equal to 1 within 1e-12; rows are then renormalized exactly.
class TransitionMatrix {
 public:
  static constexpr double kRowSumTol = 1e-12;

  explicit TransitionMatrix(Matrix entries);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& entries() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  static TransitionMatrix uniform(Eigen::Index d);

 private:
  Matrix m_;
};

/// Probability vector; entries nonnegative and summing to 1 within 1e-12.
class StationaryDistribution {
 public:
  explicit StationaryDistribution(Vector probs);

  Eigen::Index dim() const noexcept { return p_.size(); }
  const Vector& probs() const noexcept { return p_; }
  double operator()(Eigen::Index i) const { return p_(i); }
  double pi_min() const noexcept { return pi_min_; }

 private:
  Vector p_;
  double pi_min_;
};

/// D_pi^{1/2} M D_pi^{-1/2}.
struct RescaledMatrix {
  Matrix entries;
};

enum class DilationFlavor { Stochastic, Symmetric };

/// [[0, A], [A', 0]]: A' = M* (stochastic flavor) or A^T (symmetric flavor).
struct DilatedMatrix {
  Matrix entries;
  DilationFlavor flavor;
};

struct SpectralGaps {
  double gamma;       // 1 - lambda_2
  double gamma_star;  // 1 - max(lambda_2, |lambda_d|)
};

struct GapMaximum {
  double value;
  int k;  // smallest achieving power
  int k_scanned;
};

struct SpectralSummary {
  std::optional<double> gamma;
  std::optional<double> gamma_star;
  double gamma_ps = 0.0;
  int k_ps = 1;
  double gamma_ps_dilated = 0.0;
  int k_ps_dilated = 1;
  std::int64_t t_mix = 0;
  double xi = 0.25;
  double balance_beta = 1.0;
  double pi_min = 0.0;
  double gamma_mult_k1 = 0.0;  // gap of M* M, reported for diagnostics
  bool reversible = false;
};

enum class BoundMode { Reversible, Pseudo, Dilated };

struct TmixBounds {
  double lower;
  double upper;
};

/// Primitivity via boolean powers: M^((d-1)^2 + 1) entrywise positive
/// (Wielandt's bound).
bool is_ergodic(const TransitionMatrix& m);

StationaryDistribution stationary_distribution(const TransitionMatrix& m);

/// ||D_pi M - M^T D_pi||_max <= tol * max entry of D_pi M.
bool is_reversible(const TransitionMatrix& m, const StationaryDistribution& pi, double tol = 1e-10);

/// M*(i,j) = pi(j) M(j,i) / pi(i).
TransitionMatrix time_reversal(const TransitionMatrix& m, const StationaryDistribution& pi);

RescaledMatrix rescaled_matrix(const TransitionMatrix& m, const StationaryDistribution& pi);

DilatedMatrix dilate(const TransitionMatrix& m, const StationaryDistribution& pi);
DilatedMatrix dilate_sym(const Matrix& a);

/// M^k by repeated multiplication; rows are renormalized whenever their sum
/// drifts from 1 by more than 1e-12.
TransitionMatrix matrix_power(const TransitionMatrix& m, int k);

SpectralGaps spectral_gaps(const TransitionMatrix& m, const StationaryDistribution& pi);

/// gamma((M*)^k M^k), computed from the explicit product.
double multiplicative_gap(const TransitionMatrix& m, const StationaryDistribution& pi, int k);

/// gamma(S_pi(M^k)) = 1 - lambda_2 of the symmetric dilation of L^k.
double dilated_gap(const TransitionMatrix& m, const StationaryDistribution& pi, int k);

/// Hard ceiling on the power scan when no k_max is given.
inline constexpr int kPowerScanCeiling = 10000;

/// max_k gamma((M*)^k M^k)/k. Without k_max the scan stops at the first k with
/// 1/k <= best (g(k) <= 1/k), capped at 10 * ceil(1/gamma(S_pi(M))).
GapMaximum pseudo_spectral_gap(const TransitionMatrix& m, const StationaryDistribution& pi,
                               std::optional<int> k_max = std::nullopt);

/// max_k gamma(S_pi(M^k))/k, same scan policy.
GapMaximum dilated_pseudo_spectral_gap(const TransitionMatrix& m, const StationaryDistribution& pi,
                                       std::optional<int> k_max = std::nullopt);

inline constexpr std::int64_t kMixingTimeCap = 1'000'000;

/// Smallest t with max_i TV(e_i M^t, pi) <= xi, TV = half the l1 distance.
std::int64_t mixing_time(const TransitionMatrix& m, const StationaryDistribution& pi, double xi = 0.25,
                         std::int64_t cap = kMixingTimeCap);
std::int64_t mixing_time(const TransitionMatrix& m, double xi = 0.25, std::int64_t cap = kMixingTimeCap);

TmixBounds tmix_bounds(const SpectralSummary& summary, double pi_min, BoundMode mode);

/// max_{i,j} pi_i / pi_j.
double balance(const StationaryDistribution& pi);

SpectralSummary spectral_summary(const TransitionMatrix& m, std::optional<int> k_max = std::nullopt,
                                 double xi = 0.25);

}  // namespace mixgap
