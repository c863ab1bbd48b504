#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixgap/estimators.hpp"

namespace mixgap {

/// Universal constant of the perturbation bound, taken at its stated maximum.
inline constexpr double kPerturbationConstant = 48.0;

/// inf{ t > 0 : (1 + ceil(ln(2m/t))_+) * d_plus * exp(-t) <= delta }.
/// m = 0 is accepted and drops the logarithmic factor.
double tau(double delta, std::int64_t m, double d_plus);

/// The function whose sublevel set defines tau, exposed for verification.
double tau_objective(double t, std::int64_t m, double d_plus);

/// 4 tau_{delta/d, n_steps} sqrt(d / n_min); +inf when n_min = 0.
double empirical_linf_bound(const SkippedCounts& counts, double delta);

/// (C / gap) ln(2 sqrt(2 / pi_min)).
double perturbation_kappa(double gap, double pi_min);

struct IntervalTerms {
  int k = 1;
  double a_hat = 0.0;
  double b_hat = 0.0;
  double c_hat = 0.0;  // +inf when some pi_hat_i <= b_hat
  double d_hat = 0.0;
  double tau = 0.0;
  double g_hat = 0.0;      // point gap estimate at this k, when relevant
  double gap_used = 0.0;   // divisor inside b_hat
};

/// Empirical deviation terms for one skip rate at a given tau.
IntervalTerms interval_terms(const SkippedCounts& counts, const SmoothedEstimates& est, double gap_emp,
                             double tau_value);

/// Non-reversible flavour: tau at delta/(4 d K) over floor((m-1)/k) steps.
IntervalTerms interval_terms(const SkippedCounts& counts, const SmoothedEstimates& est, double gap_emp,
                             double alpha, double delta, int K);

enum class Target { PssgDilated, Pimin, AsgReversible };

std::string to_string(Target t);

struct Range {
  double lower;
  double upper;
};

struct ConfidenceReport {
  Target target = Target::PssgDilated;
  double point = 0.0;
  double half_width = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double delta = 0.05;
  double alpha = 1.0;
  int K = 1;
  std::vector<IntervalTerms> per_k_terms;
  std::string gap_divisor;
  /// Only for the dilated target: [g, min(1, 2g)] at the point estimate and a
  /// mixing-time sandwich from the point estimates of the gap and pi_min.
  std::optional<Range> implied_gamma_ps;
  std::optional<Range> implied_tmix;

  bool contains(double value) const { return lower <= value && value <= upper; }
};

/// Gap used inside b_hat: dilated pseudo-spectral gap of the smoothed
/// k-skipped chain, powers scanned up to K.
double empirical_gap_divisor(const SmoothedEstimates& est, int K);

ConfidenceReport pssg_interval(std::span<const SkippedCounts> counts, double alpha, double delta);
ConfidenceReport pssg_interval(const Trajectory& traj, int K, double alpha, double delta);

/// `K` only sets the delta split and the divisor's power scan.
ConfidenceReport pimin_interval(const SkippedCounts& counts_k1, double alpha, double delta, int K = 1);
ConfidenceReport pimin_interval(const Trajectory& traj, double alpha, double delta, int K = 1);

struct ReversibleReport {
  ConfidenceReport asg;
  ConfidenceReport pimin;
};

ReversibleReport reversible_intervals(const SkippedCounts& counts_k1, double alpha, double delta);
ReversibleReport reversible_intervals(const Trajectory& traj, double alpha, double delta);

}  // namespace mixgap
