#include "mixgap/lower_bound_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixgap/errors.hpp"

namespace mixgap::lab {

namespace {

void check_distribution(const Vector& p, const char* what) {
  require(p.size() >= 1 && p.allFinite() && (p.array() >= 0.0).all(), ErrorCode::InvalidDistribution, what);
  require(std::abs(p.sum() - 1.0) <= 1e-12, ErrorCode::InvalidDistribution, what);
}

void check_family_params(double alpha, int d) {
  require(d >= 4, ErrorCode::ConstraintViolation, "symmetric family needs d >= 4");
  require(alpha > 0.0 && alpha < 0.125, ErrorCode::ConstraintViolation, "symmetric family needs 0 < alpha < 1/8");
}

Matrix family_matrix(double alpha, int d) {
  const double dm1 = d - 1.0;
  Matrix m = Matrix::Constant(d, d, 1.0 / (2.0 * (d - 2.0)));
  m.row(0).setConstant(alpha / dm1);
  m.col(0).setConstant(alpha / dm1);
  m(0, 0) = 1.0 - alpha;
  for (int i = 1; i < d; ++i) m(i, i) = 0.5 - alpha / dm1;
  return m;
}

}  // namespace

StarChain star_chain(double alpha, const Vector& p_bar) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ConstraintViolation, "star chain needs 0 < alpha < 1");
  check_distribution(p_bar, "spoke distribution must be a probability vector");
  require((p_bar.array() > 0.0).all(), ErrorCode::InvalidDistribution, "spoke distribution must be positive");

  const Eigen::Index d = p_bar.size();
  Matrix m = Matrix::Zero(d + 1, d + 1);
  m(0, 0) = alpha;
  m.row(0).tail(d) = (1.0 - alpha) * p_bar.transpose();
  for (Eigen::Index i = 1; i <= d; ++i) {
    m(i, 0) = alpha;
    m(i, i) = 1.0 - alpha;
  }
  Vector pi(d + 1);
  pi << alpha, (1.0 - alpha) * p_bar;

  StarChain s{alpha, p_bar, TransitionMatrix(m), pi};
  require((s.matrix.entries().transpose() * pi - pi).lpNorm<1>() <= 1e-12, ErrorCode::ConstraintViolation,
          "star chain stationary law check failed");

  const StationaryDistribution stat(pi);
  require(is_reversible(s.matrix, stat), ErrorCode::ConstraintViolation, "star chain is not reversible");
  Matrix sym = rescaled_matrix(s.matrix, stat).entries;
  sym = 0.5 * (sym + sym.transpose()).eval();
  const auto values = eigen::dense_symmetric_eigenvalues(sym);
  std::vector<double> expected;
  expected.push_back(1.0);
  for (Eigen::Index i = 0; i + 1 < d; ++i) expected.push_back(1.0 - alpha);
  expected.push_back(0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::abs(values[i] - expected[i]) <= 1e-9, ErrorCode::ConstraintViolation,
            "star chain spectrum check failed");
  }
  return s;
}

std::pair<Vector, Vector> perturbed_pair(double beta, double eps, int d) {
  require(d >= 3, ErrorCode::ConstraintViolation, "perturbed pair needs d >= 3");
  require(eps >= 0.0 && 2.0 * eps < beta && beta < 1.0 / d, ErrorCode::ConstraintViolation,
          "perturbed pair needs 2 eps < beta < 1/d");
  Vector p = Vector::Constant(d, (1.0 - 2.0 * beta) / (d - 2.0));
  Vector q = p;
  p(0) = p(1) = beta;
  q(0) = beta + 2.0 * eps;
  q(1) = beta - 2.0 * eps;
  return {p, q};
}

double kl_divergence(const Vector& nu0, const Vector& nu1) {
  require(nu0.size() == nu1.size(), ErrorCode::InvalidArgument, "distributions differ in size");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < nu0.size(); ++i) {
    if (nu0(i) <= 0.0) continue;
    require(nu1(i) > 0.0, ErrorCode::AbsoluteContinuityViolation,
            "first law charges a state the second law does not");
    kl += nu0(i) * std::log(nu0(i) / nu1(i));
  }
  return std::max(kl, 0.0);
}

double kl_trajectory(const Matrix& m0, const Vector& mu0, const Matrix& m1, const Vector& mu1, int m) {
  require(m >= 1, ErrorCode::InvalidArgument, "trajectory length must be >= 1");
  require(m0.rows() == m1.rows() && m0.cols() == m1.cols() && m0.rows() == mu0.size() &&
              mu0.size() == mu1.size(),
          ErrorCode::InvalidArgument, "dimension mismatch");
  const Eigen::Index d = mu0.size();
  double total = kl_divergence(mu0, mu1);
  Vector marginal = mu0;
  Vector row_kl = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
  for (int t = 1; t < m; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (marginal(i) <= 0.0) continue;
      if (std::isnan(row_kl(i))) row_kl(i) = kl_divergence(m0.row(i).transpose(), m1.row(i).transpose());
      total += marginal(i) * row_kl(i);
    }
    marginal = (m0.transpose() * marginal).eval();
  }
  return total;
}

double kl_trajectory_star(double alpha, const Vector& p_bar, const Vector& p_bar_eps, int m) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::ConstraintViolation, "star chain needs 0 < alpha < 1");
  require(m >= 1, ErrorCode::InvalidArgument, "trajectory length must be >= 1");
  return (1.0 - alpha) * (1.0 + (m - 1.0) * alpha) * kl_divergence(p_bar_eps, p_bar);
}

SymmetricFamilyChain symmetric_family(double alpha, int d) {
  check_family_params(alpha, d);
  SymmetricFamilyChain c{alpha, d, TransitionMatrix(family_matrix(alpha, d))};
  const auto values = eigen::dense_symmetric_eigenvalues(c.matrix.entries());
  const SymmetricFamilySpectrum ex = symmetric_family_spectrum(alpha, d);
  // lambda_alpha exceeds lambda_bulk for alpha < 1/4, so the sorted order is fixed.
  bool ok = std::abs(values[0] - 1.0) <= 1e-9 && std::abs(values[1] - ex.lambda_alpha) <= 1e-9;
  for (int i = 2; i < d; ++i) ok = ok && std::abs(values[static_cast<std::size_t>(i)] - ex.lambda_bulk) <= 1e-9;
  require(ok, ErrorCode::ConstraintViolation, "symmetric family spectrum check failed");
  return c;
}

SymmetricFamilySpectrum symmetric_family_spectrum(double alpha, int d) {
  check_family_params(alpha, d);
  const double dm1 = d - 1.0;
  return {1.0, 1.0 - d * alpha / dm1, 1.0 - (dm1 / (2.0 * (d - 2.0)) + alpha / dm1), d * alpha / dm1};
}

GeometricMean geometric_mean_pair(const Matrix& m0, const Matrix& m1, const Vector& mu0, const Vector& mu1) {
  require(m0.rows() == m1.rows() && m0.cols() == m1.cols() && mu0.size() == mu1.size(),
          ErrorCode::InvalidArgument, "dimension mismatch");
  return {m0.cwiseProduct(m1).cwiseSqrt(), mu0.cwiseProduct(mu1).cwiseSqrt()};
}

double hellinger_trajectory(const Matrix& m0, const Vector& mu0, const Matrix& m1, const Vector& mu1, int m) {
  require(m >= 0, ErrorCode::InvalidArgument, "trajectory length must be >= 0");
  if (m == 0) return 0.0;
  const GeometricMean g = geometric_mean_pair(m0, m1, mu0, mu1);
  Eigen::RowVectorXd v = g.initial.transpose();
  for (int t = 1; t < m; ++t) v = (v * g.matrix).eval();
  return std::clamp(1.0 - v.sum(), 0.0, 1.0);
}

PerronPair perron_left(const Matrix& g, double tol, int max_iter) {
  require(g.rows() == g.cols() && g.rows() >= 1, ErrorCode::InvalidArgument, "matrix must be square");
  require((g.array() >= 0.0).all(), ErrorCode::InvalidArgument, "matrix must be nonnegative");
  const Eigen::Index d = g.rows();
  const Matrix shifted = g + Matrix::Identity(d, d);
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(d, 1.0 / static_cast<double>(d));
  for (int it = 0; it < max_iter; ++it) {
    Eigen::RowVectorXd y = x * shifted;
    y /= y.sum();
    const double change = (y - x).lpNorm<1>();
    x = y;
    if (change <= tol) {
      require((x.array() > 1e-14).all(), ErrorCode::ConstraintViolation, "Perron vector is not positive");
      return {(x * g).sum(), x.transpose()};
    }
  }
  fail(ErrorCode::NoConvergence, "power iteration did not converge");
}

Matrix family_geometric_mean(double alpha0, double alpha1, int d) {
  require(d >= 4, ErrorCode::ConstraintViolation, "symmetric family needs d >= 4");
  require(alpha0 > 0.0 && alpha0 < 0.25 && alpha1 > 0.0 && alpha1 < 0.25, ErrorCode::ConstraintViolation,
          "needs 0 < alpha0, alpha1 < 1/4");
  return family_matrix(alpha0, d).cwiseProduct(family_matrix(alpha1, d)).cwiseSqrt();
}

double rho_closed_form(double alpha0, double alpha1, int d) {
  require(d >= 4, ErrorCode::ConstraintViolation, "rho closed form needs d >= 4");
  require(alpha0 > 0.0 && alpha0 < 0.25 && alpha1 > 0.0 && alpha1 < 0.25, ErrorCode::ConstraintViolation,
          "rho closed form needs 0 < alpha0, alpha1 < 1/4");
  const double dm1 = d - 1.0;
  const double r = std::sqrt((1.0 - alpha0) * (1.0 - alpha1));
  const double s = std::sqrt((0.5 - alpha0 / dm1) * (0.5 - alpha1 / dm1));
  const double disc = (r - s - 0.5) * (r - s - 0.5) + 4.0 * alpha0 * alpha1 / dm1;
  return 0.5 * ((r + s + 0.5) + std::sqrt(disc));
}

RhoBounds rho_bounds(double alpha, double eps, int d) {
  check_family_params(alpha, d);
  require(eps > 0.0 && eps < 0.5, ErrorCode::ConstraintViolation, "needs 0 < eps < 1/2");
  const double a0 = alpha * (1.0 - eps);
  const double a1 = alpha * (1.0 + eps);
  const double dm1 = d - 1.0;
  const double r = std::sqrt((1.0 - a0) * (1.0 - a1));
  const double diff = (a0 - a1) / dm1;

  RhoBounds b{};
  b.rho = rho_closed_form(a0, a1, d);
  b.intermediate = 1.0 - ((a0 + a1) - 2.0 * a0 * a1 / (1.0 - r)) / dm1 - 0.5 * diff * diff;
  b.final_bound = 1.0 - 6.0 * alpha * eps * eps / dm1;
  b.s = std::sqrt((0.5 - a0 / dm1) * (0.5 - a1 / dm1));
  b.s_upper = 0.5 * (1.0 - (a0 + a1) / dm1);
  b.s_lower = 0.5 * (1.0 - (a0 + a1) / dm1 - 2.0 * diff * diff);
  b.main_lhs = std::sqrt((r - 1.0) * (r - 1.0) + (4.0 * a0 * a1 + (a0 + a1) * (r - 1.0)) / dm1 +
                         a0 * a1 / (dm1 * dm1));
  b.main_rhs = (1.0 - r) + (4.0 * a0 * a1 / (1.0 - r) - 1.5 * (a0 + a1)) / dm1;
  b.micro_lhs = a0 + a1 - 2.0 * a0 * a1 / (1.0 - r);
  b.micro_rhs = 4.0 * eps * eps * alpha;
  return b;
}

}  // namespace mixgap::lab
