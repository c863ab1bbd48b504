#include "mixgap/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "mixgap/errors.hpp"

namespace mixgap {

namespace {

void check_alpha(double alpha, bool allow_zero) {
  require(std::isfinite(alpha) && (allow_zero ? alpha >= 0.0 : alpha > 0.0), ErrorCode::InvalidArgument,
          allow_zero ? "alpha must be >= 0" : "alpha must be > 0");
}

}  // namespace

double estimate_pimin(const Trajectory& traj, double alpha) {
  check_alpha(alpha, true);
  require(traj.size() >= 2, ErrorCode::InvalidArgument, "trajectory needs m >= 2");
  const SkippedCounts c = skipped_counts(traj, 1);
  const double d = c.d;
  return (static_cast<double>(c.n_min) + d * alpha) / (static_cast<double>(c.n_steps) + d * d * alpha);
}

Matrix algorithm_one_matrix(const SkippedCounts& counts, double alpha) {
  check_alpha(alpha, false);
  const Eigen::Index d = counts.d;
  Vector n = Vector::Constant(d, static_cast<double>(d) * alpha);
  Matrix t = Matrix::Constant(d, d, alpha);
  n += counts.n_visits.cast<double>();
  t += counts.n_trans.cast<double>();
  const Vector diag = n.cwiseSqrt().cwiseInverse();
  return diag.asDiagonal() * t * diag.asDiagonal();
}

double spec_gap_dil_rev(const SkippedCounts& counts, double alpha, eigen::SolverPath path) {
  check_alpha(alpha, false);
  const SmoothedEstimates est = smoothed_estimates(counts, alpha);
  const double rho = eigen::spectral_radius_deflated(algorithm_one_matrix(counts, alpha), est.pi_hat, path);
  return std::clamp(1.0 - rho, 0.0, 1.0);
}

PssgEstimate estimate_pssg_dilated(std::span<const SkippedCounts> counts, double alpha, eigen::SolverPath path) {
  require(!counts.empty(), ErrorCode::InvalidArgument, "need at least one skip rate");
  PssgEstimate out;
  out.alpha = alpha;
  out.k_used = static_cast<int>(counts.size());
  out.per_k.reserve(counts.size());
  double best = -1.0;
  for (std::size_t idx = 0; idx < counts.size(); ++idx) {
    const int k = static_cast<int>(idx + 1);
    require(counts[idx].k == k, ErrorCode::InvalidArgument, "counts must be ordered by skip rate 1..K");
    const double g = spec_gap_dil_rev(counts[idx], alpha, path);
    const double ratio = g / k;
    out.per_k.push_back({k, g, ratio});
    if (ratio > best) {
      best = ratio;
      out.argmax_k = k;
    }
  }
  out.value = best;
  return out;
}

PssgEstimate estimate_pssg_dilated(const Trajectory& traj, int K, double alpha, eigen::SolverPath path) {
  require(K >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
  require(traj.size() >= 2 && static_cast<std::size_t>(K) <= traj.size() - 1, ErrorCode::SkipTooLarge,
          "K exceeds m - 1");
  std::vector<SkippedCounts> counts;
  counts.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) counts.push_back(skipped_counts(traj, k));
  return estimate_pssg_dilated(counts, alpha, path);
}

int adaptive_K(std::int64_t n_min, std::int64_t m, double eps) {
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be > 0");
  const double raw = std::ceil(std::cbrt(static_cast<double>(std::max<std::int64_t>(n_min, 0)) / eps));
  const double upper = static_cast<double>(std::max<std::int64_t>(m - 1, 1));
  return static_cast<int>(std::clamp(raw, 1.0, upper));
}

int adaptive_K(const Trajectory& traj, double eps) {
  require(traj.size() >= 2, ErrorCode::InvalidArgument, "trajectory needs m >= 2");
  return adaptive_K(skipped_counts(traj, 1).n_min, static_cast<std::int64_t>(traj.size()), eps);
}

double estimate_asg_reversible(const SkippedCounts& counts, double alpha) {
  check_alpha(alpha, true);
  require(alpha > 0.0 || counts.n_min > 0, ErrorCode::ZeroCountUnsmoothed,
          "unsmoothed estimate needs every state visited");
  const Eigen::Index d = counts.d;
  if (d == 1) return 1.0;
  const Matrix n = counts.n_trans.cast<double>();
  const Vector mass = counts.n_visits.cast<double>().array() + static_cast<double>(d) * alpha;
  const Vector inv_root = mass.cwiseSqrt().cwiseInverse();
  const Matrix sym = (inv_root.asDiagonal() * ((n + n.transpose()).array() + 2.0 * alpha).matrix() *
                      inv_root.asDiagonal()) *
                     0.5;
  const auto values = eigen::dense_symmetric_eigenvalues(sym);
  const double second = std::max(values[1], std::abs(values.back()));
  return std::clamp(1.0 - second, 0.0, 1.0);
}

double estimate_asg_reversible(const Trajectory& traj, double alpha) {
  return estimate_asg_reversible(skipped_counts(traj, 1), alpha);
}

}  // namespace mixgap
