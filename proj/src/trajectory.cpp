#include "mixgap/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "mixgap/errors.hpp"
#include "mixgap/rng.hpp"

namespace mixgap {

namespace {

std::vector<double> cumulative(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::vector<double> cdf(static_cast<std::size_t>(row.size()));
  double acc = 0.0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    acc += row(j);
    cdf[static_cast<std::size_t>(j)] = acc;
    if (row(j) > 0.0) last_positive = j;
  }
  for (auto j = static_cast<std::size_t>(last_positive); j < cdf.size(); ++j) cdf[j] = 1.0;
  return cdf;
}

std::uint32_t draw(const std::vector<double>& cdf, SplitMix64& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(it - cdf.begin());
}

void finalize(SkippedCounts& c) {
  c.n_visits = c.n_trans.rowwise().sum();
  c.n_steps = c.n_visits.sum();
  c.n_min = c.n_visits.size() ? c.n_visits.minCoeff() : 0;
  c.n_max = c.n_visits.size() ? c.n_visits.maxCoeff() : 0;
}

}  // namespace

Trajectory make_trajectory(std::vector<std::uint32_t> states, int d) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  for (std::uint32_t s : states) {
    require(s < static_cast<std::uint32_t>(d), ErrorCode::InvalidArgument,
            "state " + std::to_string(s) + " outside [0, d)");
  }
  return Trajectory{std::move(states), d, std::nullopt};
}

Trajectory simulate(const TransitionMatrix& m, const Vector& mu, std::size_t length, std::uint64_t seed) {
  const Eigen::Index d = m.dim();
  require(mu.size() == d, ErrorCode::InvalidDistribution, "initial law has wrong dimension");
  require(mu.allFinite() && (mu.array() >= 0.0).all(), ErrorCode::InvalidDistribution,
          "initial law has negative entries");
  require(std::abs(mu.sum() - 1.0) <= 1e-12, ErrorCode::InvalidDistribution, "initial law does not sum to 1");
  require(length >= 1, ErrorCode::InvalidArgument, "trajectory length must be >= 1");

  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) rows.push_back(cumulative(m.entries().row(i)));
  const std::vector<double> initial = cumulative(mu.transpose());

  SplitMix64 rng(seed);
  Trajectory t;
  t.d = static_cast<int>(d);
  t.seed = seed;
  t.states.resize(length);
  t.states[0] = draw(initial, rng);
  for (std::size_t i = 1; i < length; ++i) t.states[i] = draw(rows[t.states[i - 1]], rng);
  return t;
}

SkippedCounts skipped_counts(const Trajectory& traj, int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "skip rate must be >= 1");
  require(traj.size() >= 2 && static_cast<std::size_t>(k) <= traj.size() - 1, ErrorCode::SkipTooLarge,
          "skip rate exceeds m - 1");
  SkippedCounts c;
  c.k = k;
  c.d = traj.d;
  c.n_trans = CountMatrix::Zero(traj.d, traj.d);
  const std::size_t steps = (traj.size() - 1) / static_cast<std::size_t>(k);
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t from = t * static_cast<std::size_t>(k);
    ++c.n_trans(traj.states[from], traj.states[from + static_cast<std::size_t>(k)]);
  }
  finalize(c);
  return c;
}

SkippedCounts counts_from_transitions(CountMatrix n_trans, int k) {
  require(n_trans.rows() >= 1 && n_trans.rows() == n_trans.cols(), ErrorCode::InvalidArgument,
          "transition counts must be square");
  require((n_trans.array() >= 0).all(), ErrorCode::InvalidArgument, "transition counts must be nonnegative");
  require(k >= 1, ErrorCode::InvalidArgument, "skip rate must be >= 1");
  SkippedCounts c;
  c.k = k;
  c.d = static_cast<int>(n_trans.rows());
  c.n_trans = std::move(n_trans);
  finalize(c);
  return c;
}

SkipCountAccumulator::SkipCountAccumulator(int d, int max_k)
    : d_(d), anchors_(static_cast<std::size_t>(std::max(max_k, 0)), 0U) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  require(max_k >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
  trans_.assign(static_cast<std::size_t>(max_k), CountMatrix::Zero(d, d));
}

void SkipCountAccumulator::push(std::uint32_t state) {
  require(state < static_cast<std::uint32_t>(d_), ErrorCode::InvalidArgument,
          "state " + std::to_string(state) + " outside [0, d)");
  const std::int64_t pos = length_++;
  for (std::size_t idx = 0; idx < anchors_.size(); ++idx) {
    const auto k = static_cast<std::int64_t>(idx + 1);
    if (pos % k != 0) continue;
    if (pos > 0) ++trans_[idx](anchors_[idx], state);
    anchors_[idx] = state;
  }
}

SkippedCounts SkipCountAccumulator::counts(int k) const {
  require(k >= 1 && k <= max_k(), ErrorCode::InvalidArgument, "skip rate outside accumulated range");
  require(length_ >= 2 && k <= length_ - 1, ErrorCode::SkipTooLarge, "skip rate exceeds m - 1");
  return counts_from_transitions(trans_[static_cast<std::size_t>(k - 1)], k);
}

std::vector<SkippedCounts> SkipCountAccumulator::all_counts() const {
  std::vector<SkippedCounts> out;
  out.reserve(anchors_.size());
  for (int k = 1; k <= max_k(); ++k) out.push_back(counts(k));
  return out;
}

SmoothedEstimates smoothed_estimates(const SkippedCounts& counts, double alpha) {
  require(std::isfinite(alpha) && alpha >= 0.0, ErrorCode::InvalidArgument, "alpha must be >= 0");
  require(alpha > 0.0 || counts.n_min > 0, ErrorCode::ZeroCountUnsmoothed,
          "unsmoothed estimates need every state visited");
  const int d = counts.d;
  const double da = d * alpha;
  const Vector row_mass = counts.n_visits.cast<double>().array() + da;
  const Matrix trans = counts.n_trans.cast<double>().array() + alpha;

  SmoothedEstimates e;
  e.alpha = alpha;
  e.m_hat = row_mass.cwiseInverse().asDiagonal() * trans;
  e.pi_hat = row_mass / (static_cast<double>(counts.n_steps) + d * da);
  const Vector inv_root = row_mass.cwiseSqrt().cwiseInverse();
  e.l_hat = inv_root.asDiagonal() * trans * inv_root.asDiagonal();
  return e;
}

}  // namespace mixgap
