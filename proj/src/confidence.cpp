#include "mixgap/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixgap/errors.hpp"

namespace mixgap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int ceil_plus(double x) {
  if (!(x > 0.0)) return 0;
  return static_cast<int>(std::ceil(x));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void fill_endpoints(ConfidenceReport& r) {
  if (std::isfinite(r.half_width)) {
    r.lower = clamp01(r.point - r.half_width);
    r.upper = clamp01(r.point + r.half_width);
  } else {
    r.lower = 0.0;
    r.upper = 1.0;
  }
}

void check_common(double alpha, double delta) {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be > 0");
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0,1)");
}

}  // namespace

double tau_objective(double t, std::int64_t m, double d_plus) {
  const double log_term = m > 0 ? std::log(2.0 * static_cast<double>(m) / t) : -kInf;
  return (1.0 + ceil_plus(log_term)) * d_plus * std::exp(-t);
}

double tau(double delta, std::int64_t m, double d_plus) {
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  require(m >= 0, ErrorCode::InvalidArgument, "m must be >= 0");
  require(d_plus >= 1.0, ErrorCode::InvalidArgument, "d_plus must be >= 1");

  double best = kInf;
  if (m == 0) {
    best = std::log(d_plus / delta);
  } else {
    // Plateau n of the ceiling term: t in [2m e^{-n}, 2m e^{1-n}), n = 0 is [2m, inf).
    const double two_m = 2.0 * static_cast<double>(m);
    for (int n = 0;; ++n) {
      const double lo = n == 0 ? two_m : two_m * std::exp(-static_cast<double>(n));
      const double hi = n == 0 ? kInf : two_m * std::exp(1.0 - static_cast<double>(n));
      const double root = std::log((1.0 + n) * d_plus / delta);
      if (hi <= root) break;  // every later plateau is further left with a larger root
      const double candidate = std::max(lo, root);
      if (candidate < hi) best = std::min(best, candidate);
    }
  }
  best = std::max(best, std::numeric_limits<double>::min());
  // Rounding at a plateau edge can leave the substituted value a hair above delta.
  for (int guard = 0; guard < 1000 && tau_objective(best, m, d_plus) > delta; ++guard) {
    best = std::nextafter(best, kInf);
  }
  require(tau_objective(best, m, d_plus) <= delta, ErrorCode::NoConvergence, "tau verification failed");
  return best;
}

double empirical_linf_bound(const SkippedCounts& counts, double delta) {
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  if (counts.n_min <= 0) return kInf;
  const double d = counts.d;
  return 4.0 * tau(delta / d, counts.n_steps, d + 1.0) * std::sqrt(d / static_cast<double>(counts.n_min));
}

double perturbation_kappa(double gap, double pi_min) {
  require(gap > 0.0, ErrorCode::DegenerateGap, "gap must be > 0");
  require(pi_min > 0.0 && pi_min <= 1.0, ErrorCode::InvalidArgument, "pi_min must lie in (0,1]");
  return kPerturbationConstant / gap * std::log(2.0 * std::sqrt(2.0 / pi_min));
}

IntervalTerms interval_terms(const SkippedCounts& counts, const SmoothedEstimates& est, double gap_emp,
                             double tau_value) {
  require(gap_emp > 0.0, ErrorCode::DegenerateGap, "empirical gap must be > 0");
  const double alpha = est.alpha;
  require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be > 0");
  const double d = counts.d;
  const double da = d * alpha;
  const double lo_mass = static_cast<double>(counts.n_min) + da;
  const double hi_mass = static_cast<double>(counts.n_max) + da;
  const double norm = static_cast<double>(counts.n_steps) + d * da;

  IntervalTerms t;
  t.k = counts.k;
  t.tau = tau_value;
  t.gap_used = gap_emp;
  t.d_hat = 4.0 * tau_value * std::sqrt(d / lo_mass) + 2.0 * da / lo_mass;
  t.a_hat = std::sqrt(d) * hi_mass / lo_mass * t.d_hat;
  t.b_hat = kPerturbationConstant / gap_emp * std::log(2.0 * std::sqrt(2.0 * norm / lo_mass)) * t.d_hat;

  double c = 0.0;
  for (Eigen::Index i = 0; i < est.pi_hat.size(); ++i) {
    const double p = est.pi_hat(i);
    const double margin = p - t.b_hat;
    c = std::max(c, t.b_hat / p);
    c = std::max(c, margin > 0.0 ? t.b_hat / margin : kInf);
  }
  t.c_hat = 0.5 * c;
  return t;
}

IntervalTerms interval_terms(const SkippedCounts& counts, const SmoothedEstimates& est, double gap_emp,
                             double alpha, double delta, int K) {
  check_common(alpha, delta);
  require(K >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
  require(est.alpha == alpha, ErrorCode::InvalidArgument, "estimates use a different alpha");
  const double d = counts.d;
  const double t = tau(delta / (4.0 * d * K), counts.n_steps, d + 1.0);
  return interval_terms(counts, est, gap_emp, t);
}

std::string to_string(Target t) {
  switch (t) {
    case Target::PssgDilated:
      return "pssg_dilated";
    case Target::Pimin:
      return "pimin";
    case Target::AsgReversible:
      return "asg_reversible";
  }
  return "unknown";
}

double empirical_gap_divisor(const SmoothedEstimates& est, int K) {
  require(K >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
  const TransitionMatrix chain(est.m_hat);
  const StationaryDistribution pi = stationary_distribution(chain);
  const double gap = dilated_pseudo_spectral_gap(chain, pi, K).value;
  require(gap > 0.0, ErrorCode::DegenerateGap, "empirical chain has zero dilated gap");
  return gap;
}

ConfidenceReport pssg_interval(std::span<const SkippedCounts> counts, double alpha, double delta) {
  check_common(alpha, delta);
  const PssgEstimate est = estimate_pssg_dilated(counts, alpha);
  const int K = est.k_used;

  ConfidenceReport r;
  r.target = Target::PssgDilated;
  r.point = est.value;
  r.delta = delta;
  r.alpha = alpha;
  r.K = K;
  r.gap_divisor = "dilated_pseudo_spectral_gap(M_hat^(k,alpha), k_max=K)";

  double worst = 0.0;
  for (const SkippedCounts& c : counts) {
    const SmoothedEstimates s = smoothed_estimates(c, alpha);
    IntervalTerms t = interval_terms(c, s, empirical_gap_divisor(s, K), alpha, delta, K);
    t.g_hat = est.per_k[static_cast<std::size_t>(c.k - 1)].g;
    const double spread = t.a_hat + 2.0 * t.c_hat + t.c_hat * t.c_hat;
    worst = std::max(worst, spread / c.k);
    r.per_k_terms.push_back(t);
  }
  r.half_width = 1.0 / K + worst;
  fill_endpoints(r);

  r.implied_gamma_ps = Range{r.point, std::min(1.0, 2.0 * r.point)};
  const SmoothedEstimates first = smoothed_estimates(counts.front(), alpha);
  const double pimin_hat = first.pi_hat.minCoeff();
  const double tail = std::log(1.0 / pimin_hat) + 2.0 * std::log(2.0) + 1.0;
  r.implied_tmix = r.point > 0.0 ? Range{1.0 / (4.0 * r.point), tail / r.point} : Range{kInf, kInf};
  return r;
}

ConfidenceReport pssg_interval(const Trajectory& traj, int K, double alpha, double delta) {
  require(K >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
  require(traj.size() >= 2 && static_cast<std::size_t>(K) <= traj.size() - 1, ErrorCode::SkipTooLarge,
          "K exceeds m - 1");
  std::vector<SkippedCounts> counts;
  for (int k = 1; k <= K; ++k) counts.push_back(skipped_counts(traj, k));
  return pssg_interval(counts, alpha, delta);
}

ConfidenceReport pimin_interval(const SkippedCounts& counts_k1, double alpha, double delta, int K) {
  check_common(alpha, delta);
  require(counts_k1.k == 1, ErrorCode::InvalidArgument, "pi_min interval uses skip-1 counts");
  const SmoothedEstimates s = smoothed_estimates(counts_k1, alpha);
  const IntervalTerms t = interval_terms(counts_k1, s, empirical_gap_divisor(s, K), alpha, delta, K);

  ConfidenceReport r;
  r.target = Target::Pimin;
  r.point = s.pi_hat.minCoeff();
  r.delta = delta;
  r.alpha = alpha;
  r.K = K;
  r.gap_divisor = "dilated_pseudo_spectral_gap(M_hat^(1,alpha), k_max=K)";
  r.per_k_terms.push_back(t);
  r.half_width = t.b_hat;
  const double d = counts_k1.d;
  const double floor = d * alpha / (static_cast<double>(counts_k1.n_steps) + d * d * alpha);
  r.lower = std::max(r.point - r.half_width, floor);
  r.upper = std::min(r.point + r.half_width, 1.0);
  return r;
}

ConfidenceReport pimin_interval(const Trajectory& traj, double alpha, double delta, int K) {
  return pimin_interval(skipped_counts(traj, 1), alpha, delta, K);
}

ReversibleReport reversible_intervals(const SkippedCounts& counts_k1, double alpha, double delta) {
  check_common(alpha, delta);
  require(counts_k1.k == 1, ErrorCode::InvalidArgument, "reversible intervals use skip-1 counts");
  const SmoothedEstimates s = smoothed_estimates(counts_k1, alpha);
  const double asg_hat = estimate_asg_reversible(counts_k1, alpha);
  const double d = counts_k1.d;
  // n_steps equals m - 1 at skip 1.
  const double t_level = tau(delta / d, counts_k1.n_steps, d + 1.0);
  IntervalTerms t = interval_terms(counts_k1, s, asg_hat, t_level);
  t.g_hat = asg_hat;

  ReversibleReport out;
  ConfidenceReport& a = out.asg;
  a.target = Target::AsgReversible;
  a.point = asg_hat;
  a.delta = delta;
  a.alpha = alpha;
  a.K = 1;
  a.gap_divisor = "absolute_spectral_gap((M_hat + M_hat*)/2)";
  a.per_k_terms.push_back(t);
  a.half_width = t.a_hat + 2.0 * t.c_hat + t.c_hat * t.c_hat;
  fill_endpoints(a);

  ConfidenceReport& p = out.pimin;
  p = a;
  p.target = Target::Pimin;
  p.point = s.pi_hat.minCoeff();
  p.half_width = t.b_hat;
  const double floor = d * alpha / (static_cast<double>(counts_k1.n_steps) + d * d * alpha);
  p.lower = std::max(p.point - p.half_width, floor);
  p.upper = std::min(p.point + p.half_width, 1.0);
  return out;
}

ReversibleReport reversible_intervals(const Trajectory& traj, double alpha, double delta) {
  return reversible_intervals(skipped_counts(traj, 1), alpha, delta);
}

}  // namespace mixgap
