#include "mixgap/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixgap/errors.hpp"
#include "mixgap/rng.hpp"

namespace mixgap::eigen {

namespace {

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double inf_norm(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

SymmetricSpectrum dense_symmetric_spectrum(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorCode::InvalidArgument, "matrix must be square");
  const double scale = std::max(1.0, max_abs(a));
  require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorCode::NotSymmetric,
          "matrix is not symmetric within 1e-10");

  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  require(solver.info() == Eigen::Success, ErrorCode::NoConvergence, "symmetric eigensolver did not converge");

  // Eigen returns ascending order.
  const Eigen::Index n = sym.rows();
  SymmetricSpectrum out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }

  if (n > 0) {
    const Vector lambda = Eigen::Map<const Vector>(out.values.data(), n);
    const Matrix residual = sym * out.vectors - out.vectors * lambda.asDiagonal();
    require(residual.cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, inf_norm(sym)), ErrorCode::NoConvergence,
            "eigen decomposition residual above 1e-9");
  }
  return out;
}

std::vector<double> dense_symmetric_eigenvalues(const Matrix& a) { return dense_symmetric_spectrum(a).values; }

DenseOperator::DenseOperator(Matrix a) : a_(std::move(a)), norm_bound_(inf_norm(a_)) {
  require(a_.rows() == a_.cols(), ErrorCode::InvalidArgument, "operator matrix must be square");
  const double scale = std::max(1.0, max_abs(a_));
  require((a_ - a_.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorCode::NotSymmetric,
          "operator matrix is not symmetric");
}

DilationOperator::DilationOperator(Matrix a)
    : a_(std::move(a)), norm_bound_(std::sqrt(inf_norm(a_) * inf_norm(a_.transpose()))) {
  require(a_.rows() == a_.cols(), ErrorCode::InvalidArgument, "dilated block must be square");
}

void DilationOperator::apply(const Vector& x, Vector& y) const {
  const Eigen::Index d = a_.rows();
  y.resize(2 * d);
  y.head(d).noalias() = a_ * x.tail(d);
  y.tail(d).noalias() = a_.transpose() * x.head(d);
}

DeflationPair DeflationPair::from_stationary(const Vector& pi) {
  require(pi.size() > 0 && (pi.array() > 0.0).all(), ErrorCode::ZeroStationaryEntry,
          "deflation requires a strictly positive distribution");
  const Eigen::Index d = pi.size();
  Vector root = pi.cwiseSqrt();
  root /= root.norm();
  DeflationPair pair;
  pair.v_plus.resize(2 * d);
  pair.v_minus.resize(2 * d);
  pair.v_plus << root, root;
  pair.v_minus << root, -root;
  pair.v_plus /= std::sqrt(2.0);
  pair.v_minus /= std::sqrt(2.0);
  return pair;
}

DeflatedOperator::DeflatedOperator(const SymmetricOperator& base, DeflationPair pair)
    : base_(base), pair_(std::move(pair)) {
  require(pair_.v_plus.size() == base_.dim() && pair_.v_minus.size() == base_.dim(), ErrorCode::InvalidArgument,
          "deflation vectors do not match operator dimension");
}

void DeflatedOperator::apply(const Vector& x, Vector& y) const {
  base_.apply(x, y);
  y -= (pair_.lambda_plus * pair_.v_plus.dot(x)) * pair_.v_plus;
  y -= (pair_.lambda_minus * pair_.v_minus.dot(x)) * pair_.v_minus;
}

namespace {

Vector start_vector(Eigen::Index n, std::span<const Vector> orthogonal_to) {
  SplitMix64 rng(0x5EEDULL ^ (static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ULL));
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = rng.uniform() - 0.5;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& v : orthogonal_to) {
      const double vv = v.squaredNorm();
      if (vv > 0.0) q -= (v.dot(q) / vv) * v;
    }
  }
  const double nrm = q.norm();
  require(nrm > 1e-12, ErrorCode::EigensolverFailure, "start vector collapsed after orthogonalization");
  return q / nrm;
}

}  // namespace

LanczosResult lanczos_extreme_eigenvalue(const SymmetricOperator& op, std::span<const Vector> orthogonal_to,
                                         const LanczosOptions& opts) {
  const Eigen::Index n = op.dim();
  require(n > 0, ErrorCode::InvalidArgument, "empty operator");
  const int max_iter = opts.max_iter.value_or(static_cast<int>(5 * n));
  require(max_iter >= 1, ErrorCode::InvalidArgument, "max_iter must be positive");
  const double scale = std::max(1.0, op.norm_bound());

  const Eigen::Index max_dim = std::min<Eigen::Index>(n, max_iter);
  Matrix basis(n, max_dim);
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples q_j and q_{j+1}
  alpha.reserve(static_cast<std::size_t>(max_dim));
  beta.reserve(static_cast<std::size_t>(max_dim));

  basis.col(0) = start_vector(n, orthogonal_to);
  Vector w(n);
  std::vector<double> history;
  double theta = 0.0;
  double residual = 0.0;

  for (Eigen::Index j = 0; j < max_dim; ++j) {
    op.apply(basis.col(j), w);
    const double a = basis.col(j).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(j);
    if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
    // Full reorthogonalization, two classical Gram-Schmidt passes.
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = basis.leftCols(j + 1);
      w -= q * (q.transpose() * w);
    }
    const double b = w.norm();

    const Eigen::Index k = j + 1;
    Vector diag = Eigen::Map<const Vector>(alpha.data(), k);
    Vector sub = k > 1 ? Vector(Eigen::Map<const Vector>(beta.data(), k - 1)) : Vector(0);
    Eigen::SelfAdjointEigenSolver<Matrix> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    require(tri.info() == Eigen::Success, ErrorCode::EigensolverFailure, "tridiagonal eigensolver failed");

    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < k; ++i) {
      if (std::abs(tri.eigenvalues()(i)) > std::abs(tri.eigenvalues()(best))) best = i;
    }
    theta = tri.eigenvalues()(best);
    residual = b * std::abs(tri.eigenvectors()(k - 1, best));
    history.push_back(theta);

    const bool breakdown = b <= 1e-14 * scale;
    const bool small_residual = residual <= opts.tol * scale;
    bool stable = false;
    if (history.size() >= 4) {
      stable = true;
      for (std::size_t h = history.size() - 3; h < history.size(); ++h) {
        stable = stable && std::abs(history[h] - history[h - 1]) <= opts.tol * scale;
      }
    }
    // Stabilization alone can stall on a slowly converging extreme value, so it
    // is only trusted once the residual bound is also moderately small.
    if (breakdown || small_residual || (stable && residual <= std::sqrt(opts.tol) * scale) || k == n) {
      return {theta, static_cast<int>(k), residual};
    }
    beta.push_back(b);
    if (j + 1 < max_dim) basis.col(j + 1) = w / b;
  }
  fail(ErrorCode::NoConvergence, "Lanczos did not converge within max_iter");
}

double lanczos_third_eigenvalue(const SymmetricOperator& op, const DeflationPair& deflation,
                                const LanczosOptions& opts) {
  DeflatedOperator deflated(op, deflation);
  const Vector pair[] = {deflation.v_plus, deflation.v_minus};
  return lanczos_extreme_eigenvalue(deflated, pair, opts).eigenvalue;
}

double spectral_radius_deflated(const Matrix& l, const Vector& pi, SolverPath path, const LanczosOptions& opts) {
  require(l.rows() == l.cols() && l.rows() == pi.size(), ErrorCode::InvalidArgument,
          "rescaled matrix and distribution dimensions differ");
  const DeflationPair pair = DeflationPair::from_stationary(pi);
  const Eigen::Index n = 2 * l.rows();
  const bool dense = path == SolverPath::Dense || (path == SolverPath::Auto && n <= kDenseFallbackDim);

  if (dense) {
    Matrix s = Matrix::Zero(n, n);
    s.topRightCorner(l.rows(), l.rows()) = l;
    s.bottomLeftCorner(l.rows(), l.rows()) = l.transpose();
    s -= pair.lambda_plus * pair.v_plus * pair.v_plus.transpose();
    s -= pair.lambda_minus * pair.v_minus * pair.v_minus.transpose();
    const auto values = dense_symmetric_eigenvalues(s);
    return std::max(std::abs(values.front()), std::abs(values.back()));
  }
  DilationOperator op(l);
  return std::abs(lanczos_third_eigenvalue(op, pair, opts));
}

}  // namespace mixgap::eigen
