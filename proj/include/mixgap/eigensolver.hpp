#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mixgap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace eigen {

/// Full spectrum of a real symmetric matrix, eigenvalues in descending order.
/// Column i of `vectors` is the unit eigenvector for `values[i]`.
struct SymmetricSpectrum {
  std::vector<double> values;
  Matrix vectors;
};

/// Dense reference solver. Throws NotSymmetric when A deviates from its
/// transpose by more than 1e-10 (relative to max |A|), NoConvergence when the
/// residual ||AV - V diag(values)|| exceeds 1e-9 ||A||.
SymmetricSpectrum dense_symmetric_spectrum(const Matrix& a);

/// Only eigenvalues, descending.
std::vector<double> dense_symmetric_eigenvalues(const Matrix& a);

/// Matrix-free symmetric operator y = A x.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;
  virtual Eigen::Index dim() const = 0;
  virtual void apply(const Vector& x, Vector& y) const = 0;
  /// Cheap upper bound on ||A||_2, used to scale tolerances.
  virtual double norm_bound() const = 0;
};

class DenseOperator final : public SymmetricOperator {
 public:
  explicit DenseOperator(Matrix a);
  Eigen::Index dim() const override { return a_.rows(); }
  void apply(const Vector& x, Vector& y) const override { y.noalias() = a_ * x; }
  double norm_bound() const override { return norm_bound_; }
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
  double norm_bound_;
};

/// Applies the self-adjoint dilation [[0, A], [A^T, 0]] of a d x d matrix A
/// without materializing the 2d x 2d block matrix.
class DilationOperator final : public SymmetricOperator {
 public:
  explicit DilationOperator(Matrix a);
  Eigen::Index dim() const override { return 2 * a_.rows(); }
  void apply(const Vector& x, Vector& y) const override;
  double norm_bound() const override { return norm_bound_; }
  const Matrix& block() const { return a_; }

 private:
  Matrix a_;
  double norm_bound_;
};

/// Unit vectors (sqrt(pi), +-sqrt(pi)) / sqrt(2) in dimension 2d: the
/// eigenvectors for +1 and -1 of the dilation of a rescaled stochastic matrix.
struct DeflationPair {
  Vector v_plus;
  Vector v_minus;
  double lambda_plus = 1.0;
  double lambda_minus = -1.0;

  static DeflationPair from_stationary(const Vector& pi);
};

/// Hotelling deflation A - lambda_+ v_+ v_+^T - lambda_- v_- v_-^T.
class DeflatedOperator final : public SymmetricOperator {
 public:
  DeflatedOperator(const SymmetricOperator& base, DeflationPair pair);
  Eigen::Index dim() const override { return base_.dim(); }
  void apply(const Vector& x, Vector& y) const override;
  double norm_bound() const override { return base_.norm_bound() + 2.0; }
  const DeflationPair& pair() const { return pair_; }

 private:
  const SymmetricOperator& base_;
  DeflationPair pair_;
};

struct LanczosOptions {
  double tol = 1e-10;
  /// Defaults to 5 * dim.
  std::optional<int> max_iter;
};

struct LanczosResult {
  double eigenvalue;  // largest-magnitude Ritz value (signed)
  int iterations;
  double residual;
};

/// Largest-magnitude eigenvalue of a symmetric operator, Lanczos with full
/// reorthogonalization. Start vector is deterministic in dim and is made
/// orthogonal to every vector in `orthogonal_to`.
LanczosResult lanczos_extreme_eigenvalue(const SymmetricOperator& op,
                                         std::span<const Vector> orthogonal_to = {},
                                         const LanczosOptions& opts = {});

/// Largest-magnitude eigenvalue of the deflated operator op - Pi_bar. When the
/// deflation pair are exact +-1 eigenvectors of op this is the third
/// largest-magnitude eigenvalue of op.
double lanczos_third_eigenvalue(const SymmetricOperator& op, const DeflationPair& deflation,
                                const LanczosOptions& opts = {});

enum class SolverPath { Auto, Dense, Lanczos };

/// Problems with 2d at or below this size go through the dense solver on Auto.
inline constexpr Eigen::Index kDenseFallbackDim = 64;

/// rho(S(L) - Pi_bar) with Pi_bar built from sqrt(pi). The operator is never
/// formed on the Lanczos path.
double spectral_radius_deflated(const Matrix& l, const Vector& pi, SolverPath path = SolverPath::Auto,
                                const LanczosOptions& opts = {});

}  // namespace eigen
}  // namespace mixgap
