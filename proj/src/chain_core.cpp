#include "mixgap/chain_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mixgap/errors.hpp"

namespace mixgap {

namespace {

void renormalize_rows(Matrix& m, double drift_tol) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double s = m.row(i).sum();
    if (std::abs(s - 1.0) > drift_tol) m.row(i) /= s;
  }
}

Matrix checked_square(Matrix entries) {
  require(entries.rows() >= 1 && entries.rows() == entries.cols(), ErrorCode::InvalidMatrix,
          "transition matrix must be square with d >= 1");
  require(entries.allFinite(), ErrorCode::InvalidMatrix, "transition matrix has non-finite entries");
  return entries;
}

// Boolean matrix with 64-bit packed rows.
class BitMatrix {
 public:
  explicit BitMatrix(Eigen::Index n) : n_(n), words_((n + 63) / 64), bits_(static_cast<std::size_t>(n * words_), 0) {}

  void set(Eigen::Index i, Eigen::Index j) { row(i)[j / 64] |= (std::uint64_t{1} << (j % 64)); }
  bool get(Eigen::Index i, Eigen::Index j) const { return (row(i)[j / 64] >> (j % 64)) & 1U; }

  BitMatrix operator*(const BitMatrix& rhs) const {
    BitMatrix out(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      std::uint64_t* dst = out.row(i);
      for (Eigen::Index l = 0; l < n_; ++l) {
        if (!get(i, l)) continue;
        const std::uint64_t* src = rhs.row(l);
        for (Eigen::Index w = 0; w < words_; ++w) dst[w] |= src[w];
      }
    }
    return out;
  }

  bool all_set() const {
    for (Eigen::Index i = 0; i < n_; ++i) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!get(i, j)) return false;
      }
    }
    return true;
  }

 private:
  std::uint64_t* row(Eigen::Index i) { return bits_.data() + i * words_; }
  const std::uint64_t* row(Eigen::Index i) const { return bits_.data() + i * words_; }

  Eigen::Index n_;
  Eigen::Index words_;
  std::vector<std::uint64_t> bits_;
};

double clamp_gap(double g) { return std::clamp(g, 0.0, 1.0); }

// gamma of a reversible kernel given through its symmetric similarity form.
double second_eigenvalue(const Matrix& sym) {
  const auto values = eigen::dense_symmetric_eigenvalues(sym);
  return values.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : values[1];
}

Matrix rescale(const Matrix& m, const Vector& pi) {
  const Vector root = pi.cwiseSqrt();
  return root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
}

double multiplicative_gap_of_power(const Matrix& power, const Vector& pi) {
  if (power.rows() == 1) return 1.0;
  // (M^k)* (i,j) = pi_j M^k(j,i) / pi_i
  const Matrix reversal = pi.cwiseInverse().asDiagonal() * power.transpose() * pi.asDiagonal();
  const Matrix product = reversal * power;
  Matrix sym = rescale(product, pi);
  sym = 0.5 * (sym + sym.transpose()).eval();
  return clamp_gap(1.0 - second_eigenvalue(sym));
}

double dilated_gap_of_power(const Matrix& power, const Vector& pi) {
  if (power.rows() == 1) return 1.0;
  const DilatedMatrix s = dilate_sym(rescale(power, pi));
  return clamp_gap(1.0 - second_eigenvalue(s.entries));
}

template <class GapFn>
GapMaximum scan_powers(const TransitionMatrix& m, const StationaryDistribution& pi, std::optional<int> k_max,
                       GapFn gap) {
  require(pi.dim() == m.dim(), ErrorCode::InvalidArgument, "distribution dimension mismatch");
  require(pi.pi_min() > 0.0, ErrorCode::NonErgodic, "stationary distribution has a zero entry");
  int limit = 0;
  if (k_max) {
    require(*k_max >= 1, ErrorCode::InvalidArgument, "k_max must be >= 1");
    limit = *k_max;
  } else {
    const double first = dilated_gap_of_power(m.entries(), pi.probs());
    limit = kPowerScanCeiling;
    if (first > 0.0) {
      const double cap = 10.0 * std::ceil(1.0 / first);
      if (cap < limit) limit = static_cast<int>(cap);
    }
  }

  GapMaximum best{0.0, 1, 0};
  Matrix power = m.entries();
  for (int k = 1; k <= limit; ++k) {
    // g(k) <= 1/k, so nothing beyond this point can beat the current best.
    if (best.value > 0.0 && 1.0 / k <= best.value) break;
    if (k > 1) {
      power = (power * m.entries()).eval();
      renormalize_rows(power, 1e-12);
    }
    const double g = gap(power, pi.probs()) / k;
    best.k_scanned = k;
    if (g > best.value) {
      best.value = g;
      best.k = k;
    }
  }
  return best;
}

}  // namespace

TransitionMatrix::TransitionMatrix(Matrix entries) : m_(checked_square(std::move(entries))) {
  require((m_.array() >= 0.0).all() && (m_.array() <= 1.0 + kRowSumTol).all(), ErrorCode::InvalidMatrix,
          "transition matrix entries must lie in [0,1]");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    const double s = m_.row(i).sum();
    require(std::abs(s - 1.0) <= kRowSumTol, ErrorCode::InvalidMatrix,
            "row " + std::to_string(i) + " does not sum to 1 within 1e-12");
    m_.row(i) /= s;
  }
}

TransitionMatrix TransitionMatrix::uniform(Eigen::Index d) {
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  return TransitionMatrix(Matrix::Constant(d, d, 1.0 / static_cast<double>(d)));
}

StationaryDistribution::StationaryDistribution(Vector probs) : p_(std::move(probs)) {
  require(p_.size() >= 1 && p_.allFinite(), ErrorCode::InvalidDistribution, "distribution must be non-empty");
  require((p_.array() >= 0.0).all(), ErrorCode::InvalidDistribution, "distribution has negative entries");
  require(std::abs(p_.sum() - 1.0) <= 1e-12, ErrorCode::InvalidDistribution, "distribution does not sum to 1");
  pi_min_ = p_.minCoeff();
}

bool is_ergodic(const TransitionMatrix& m) {
  const Eigen::Index d = m.dim();
  BitMatrix b(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (m(i, j) > 0.0) b.set(i, j);
    }
  }
  // Once B^t is positive every later power is too, so squaring up past the
  // Wielandt exponent (d-1)^2 + 1 decides primitivity.
  const double wielandt = static_cast<double>(d - 1) * static_cast<double>(d - 1) + 1.0;
  double power = 1.0;
  while (true) {
    if (b.all_set()) return true;
    if (power >= wielandt) return false;
    b = b * b;
    power *= 2.0;
  }
}

StationaryDistribution stationary_distribution(const TransitionMatrix& m) {
  require(is_ergodic(m), ErrorCode::NonErgodic, "transition matrix is not primitive");
  const Eigen::Index d = m.dim();
  const Matrix& p = m.entries();
  Vector pi(d);

  auto residual = [&](const Vector& x) { return (p.transpose() * x - x).lpNorm<1>(); };

  if (d <= 2000) {
    // (M^T - I) x = 0 with the last equation replaced by sum(x) = 1.
    Matrix a = p.transpose() - Matrix::Identity(d, d);
    a.row(d - 1).setOnes();
    Vector rhs = Vector::Zero(d);
    rhs(d - 1) = 1.0;
    const Eigen::PartialPivLU<Matrix> lu(a);
    pi = lu.solve(rhs);
    for (int refine = 0; refine < 3; ++refine) {
      const Vector r = rhs - a * pi;
      pi += lu.solve(r);
    }
  } else {
    pi = Vector::Constant(d, 1.0 / static_cast<double>(d));
    const Matrix lazy = 0.5 * (p + Matrix::Identity(d, d));
    for (int it = 0; it < 1'000'000 && residual(pi) > 1e-13; ++it) {
      pi = lazy.transpose() * pi;
      pi /= pi.sum();
    }
  }
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  require(residual(pi) <= 1e-12, ErrorCode::NoConvergence, "stationary solve residual above 1e-12");
  require((pi.array() > 0.0).all(), ErrorCode::NonErgodic, "stationary distribution has a zero entry");
  return StationaryDistribution(pi);
}

bool is_reversible(const TransitionMatrix& m, const StationaryDistribution& pi, double tol) {
  require(pi.dim() == m.dim(), ErrorCode::InvalidArgument, "distribution dimension mismatch");
  const Matrix q = pi.probs().asDiagonal() * m.entries();
  const double scale = q.cwiseAbs().maxCoeff();
  return (q - q.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

TransitionMatrix time_reversal(const TransitionMatrix& m, const StationaryDistribution& pi) {
  require(pi.dim() == m.dim(), ErrorCode::InvalidArgument, "distribution dimension mismatch");
  require(pi.pi_min() > 0.0, ErrorCode::ZeroStationaryEntry, "time reversal needs pi > 0");
  const Vector& p = pi.probs();
  Matrix r = p.cwiseInverse().asDiagonal() * m.entries().transpose() * p.asDiagonal();
  renormalize_rows(r, 0.0);
  return TransitionMatrix(std::move(r));
}

RescaledMatrix rescaled_matrix(const TransitionMatrix& m, const StationaryDistribution& pi) {
  require(pi.dim() == m.dim(), ErrorCode::InvalidArgument, "distribution dimension mismatch");
  require(pi.pi_min() > 0.0, ErrorCode::ZeroStationaryEntry, "rescaling needs pi > 0");
  return {rescale(m.entries(), pi.probs())};
}

DilatedMatrix dilate(const TransitionMatrix& m, const StationaryDistribution& pi) {
  const TransitionMatrix reversal = time_reversal(m, pi);
  const Eigen::Index d = m.dim();
  Matrix s = Matrix::Zero(2 * d, 2 * d);
  s.topRightCorner(d, d) = m.entries();
  s.bottomLeftCorner(d, d) = reversal.entries();
  return {std::move(s), DilationFlavor::Stochastic};
}

DilatedMatrix dilate_sym(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorCode::InvalidArgument, "dilation needs a square matrix");
  const Eigen::Index d = a.rows();
  Matrix s = Matrix::Zero(2 * d, 2 * d);
  s.topRightCorner(d, d) = a;
  s.bottomLeftCorner(d, d) = a.transpose();
  return {std::move(s), DilationFlavor::Symmetric};
}

TransitionMatrix matrix_power(const TransitionMatrix& m, int k) {
  require(k >= 0, ErrorCode::InvalidArgument, "power must be nonnegative");
  if (k == 0) return TransitionMatrix(Matrix::Identity(m.dim(), m.dim()));
  Matrix p = m.entries();
  for (int i = 1; i < k; ++i) {
    p = (p * m.entries()).eval();
    renormalize_rows(p, 1e-12);
  }
  p = p.cwiseMax(0.0);
  renormalize_rows(p, 0.0);
  return TransitionMatrix(std::move(p));
}

SpectralGaps spectral_gaps(const TransitionMatrix& m, const StationaryDistribution& pi) {
  require(is_reversible(m, pi), ErrorCode::NotReversible, "detailed balance fails beyond 1e-10");
  if (m.dim() == 1) return {1.0, 1.0};
  Matrix l = rescale(m.entries(), pi.probs());
  l = 0.5 * (l + l.transpose()).eval();
  const auto values = eigen::dense_symmetric_eigenvalues(l);
  const double lambda2 = values[1];
  const double lambda_d = values.back();
  return {1.0 - lambda2, 1.0 - std::max(lambda2, std::abs(lambda_d))};
}

double multiplicative_gap(const TransitionMatrix& m, const StationaryDistribution& pi, int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  require(pi.pi_min() > 0.0, ErrorCode::ZeroStationaryEntry, "needs pi > 0");
  return multiplicative_gap_of_power(matrix_power(m, k).entries(), pi.probs());
}

double dilated_gap(const TransitionMatrix& m, const StationaryDistribution& pi, int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  require(pi.pi_min() > 0.0, ErrorCode::ZeroStationaryEntry, "needs pi > 0");
  return dilated_gap_of_power(matrix_power(m, k).entries(), pi.probs());
}

GapMaximum pseudo_spectral_gap(const TransitionMatrix& m, const StationaryDistribution& pi,
                               std::optional<int> k_max) {
  return scan_powers(m, pi, k_max, multiplicative_gap_of_power);
}

GapMaximum dilated_pseudo_spectral_gap(const TransitionMatrix& m, const StationaryDistribution& pi,
                                       std::optional<int> k_max) {
  return scan_powers(m, pi, k_max, dilated_gap_of_power);
}

std::int64_t mixing_time(const TransitionMatrix& m, const StationaryDistribution& pi, double xi,
                         std::int64_t cap) {
  require(xi > 0.0 && xi < 0.5, ErrorCode::InvalidArgument, "xi must lie in (0, 1/2)");
  require(pi.dim() == m.dim(), ErrorCode::InvalidArgument, "distribution dimension mismatch");
  require(pi.pi_min() > 0.0, ErrorCode::NonErgodic, "chain is not ergodic");
  const Eigen::Index d = m.dim();
  Matrix p = Matrix::Identity(d, d);
  const Eigen::RowVectorXd target = pi.probs().transpose();
  for (std::int64_t t = 0; t <= cap; ++t) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) worst = std::max(worst, 0.5 * (p.row(i) - target).lpNorm<1>());
    if (worst <= xi) return t;
    p = (p * m.entries()).eval();
    renormalize_rows(p, 1e-12);
  }
  fail(ErrorCode::Overflow, "mixing time exceeds cap " + std::to_string(cap));
}

std::int64_t mixing_time(const TransitionMatrix& m, double xi, std::int64_t cap) {
  return mixing_time(m, stationary_distribution(m), xi, cap);
}

TmixBounds tmix_bounds(const SpectralSummary& summary, double pi_min, BoundMode mode) {
  require(pi_min > 0.0 && pi_min <= 1.0, ErrorCode::InvalidArgument, "pi_min must lie in (0,1]");
  const double tail = std::log(1.0 / pi_min) + 2.0 * std::log(2.0) + 1.0;
  switch (mode) {
    case BoundMode::Reversible: {
      require(summary.gamma_star.has_value(), ErrorCode::MissingGap, "absolute spectral gap not available");
      const double g = *summary.gamma_star;
      return {(1.0 / g - 1.0) * std::log(2.0), std::log(4.0 / pi_min) / g};
    }
    case BoundMode::Pseudo: {
      const double g = summary.gamma_ps;
      return {1.0 / (2.0 * g), tail / g};
    }
    case BoundMode::Dilated: {
      const double g = summary.gamma_ps_dilated;
      return {1.0 / (4.0 * g), tail / g};
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown bound mode");
}

double balance(const StationaryDistribution& pi) {
  require(pi.pi_min() > 0.0, ErrorCode::ZeroStationaryEntry, "balance needs pi > 0");
  return pi.probs().maxCoeff() / pi.pi_min();
}

SpectralSummary spectral_summary(const TransitionMatrix& m, std::optional<int> k_max, double xi) {
  const StationaryDistribution pi = stationary_distribution(m);
  SpectralSummary s;
  s.xi = xi;
  s.pi_min = pi.pi_min();
  s.balance_beta = balance(pi);
  s.reversible = is_reversible(m, pi);
  if (s.reversible) {
    const SpectralGaps g = spectral_gaps(m, pi);
    s.gamma = g.gamma;
    s.gamma_star = g.gamma_star;
  }
  const GapMaximum ps = pseudo_spectral_gap(m, pi, k_max);
  s.gamma_ps = ps.value;
  s.k_ps = ps.k;
  const GapMaximum dil = dilated_pseudo_spectral_gap(m, pi, k_max);
  s.gamma_ps_dilated = dil.value;
  s.k_ps_dilated = dil.k;
  s.gamma_mult_k1 = multiplicative_gap_of_power(m.entries(), pi.probs());
  s.t_mix = mixing_time(m, pi, xi);
  return s;
}

}  // namespace mixgap
