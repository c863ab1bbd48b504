#pragma once

#include <utility>

#include "mixgap/chain_core.hpp"

namespace mixgap::lab {

/// Hub state 0 with d spokes. Row 0 = (a, (1-a) p), row i = a e_0 + (1-a) e_i.
struct StarChain {
  double alpha;
  Vector spoke_dist;
  TransitionMatrix matrix;
  Vector stationary;  // (a, (1-a) p)
};

/// Verifies stationarity and the spectrum {1, (1-a) x (d-1), 0} on construction.
StarChain star_chain(double alpha, const Vector& p_bar);

/// p = (b, b, (1-2b)/(d-2), ...), p_eps = (b+2e, b-2e, ...). Needs d >= 3
/// and 0 <= 2e < b < 1/d.
std::pair<Vector, Vector> perturbed_pair(double beta, double eps, int d);

/// sum nu0 ln(nu0/nu1). Throws AbsoluteContinuityViolation when nu0 puts mass
/// where nu1 has none.
double kl_divergence(const Vector& nu0, const Vector& nu1);

/// KL between the laws of length-m trajectories of two chains.
/// KL(mu0||mu1) + sum_{t=1}^{m-1} sum_i P0(X_t = i) KL(M0(i,.)||M1(i,.)).
double kl_trajectory(const Matrix& m0, const Vector& mu0, const Matrix& m1, const Vector& mu1, int m);

/// Stationary star chains S_a(p_eps) against S_a(p), length m:
/// (1-a)(1 + (m-1)a) KL(p_eps||p).
double kl_trajectory_star(double alpha, const Vector& p_bar, const Vector& p_bar_eps, int m);

struct SymmetricFamilyChain {
  double alpha;
  int d;
  TransitionMatrix matrix;
};

struct SymmetricFamilySpectrum {
  double lambda_top;     // 1
  double lambda_alpha;   // 1 - d a/(d-1), multiplicity 1
  double lambda_bulk;    // 1 - ((d-1)/(2(d-2)) + a/(d-1)), multiplicity d-2
  double gap;            // d a/(d-1)
};

/// Doubly stochastic, symmetric; needs d >= 4 and 0 < a < 1/8.
SymmetricFamilyChain symmetric_family(double alpha, int d);
SymmetricFamilySpectrum symmetric_family_spectrum(double alpha, int d);

/// Entrywise square roots of M0 * M1 and mu0 * mu1.
struct GeometricMean {
  Matrix matrix;
  Vector initial;
};
GeometricMean geometric_mean_pair(const Matrix& m0, const Matrix& m1, const Vector& mu0, const Vector& mu1);

/// Squared Hellinger distance 1 - sum_paths sqrt(P0 P1) between length-m
/// trajectory laws, via mu_sqrt G^(m-1) 1. m = 0 gives 0.
double hellinger_trajectory(const Matrix& m0, const Vector& mu0, const Matrix& m1, const Vector& mu1, int m);

struct PerronPair {
  double rho;
  Vector left;  // positive, sums to 1
};

/// Perron root and left vector of a nonnegative irreducible matrix by power
/// iteration on G + I.
PerronPair perron_left(const Matrix& g, double tol = 1e-14, int max_iter = 1000000);

/// Entrywise geometric mean of the family matrices at a0 and a1. Accepts
/// 0 < a0, a1 < 1/4, which covers a(1 +- e) for the whole parameter range.
Matrix family_geometric_mean(double alpha0, double alpha1, int d);

/// Spectral radius of [M(a0), M(a1)]_sqrt for the symmetric family.
double rho_closed_form(double alpha0, double alpha1, int d);

/// Numerical forms of the inequalities bounding rho, with a0 = a(1-e),
/// a1 = a(1+e) where relevant. Each field holds both sides of one inequality.
struct RhoBounds {
  double rho;
  double intermediate;  // 1 - [(a0+a1) - 2 a0 a1/(1-r)]/(d-1) - ((a0-a1)/(d-1))^2 / 2
  double final_bound;   // 1 - 6 a e^2/(d-1)
  double s;
  double s_lower;
  double s_upper;
  double main_lhs;
  double main_rhs;
  double micro_lhs;
  double micro_rhs;

  bool all_hold() const {
    return rho >= intermediate && intermediate >= final_bound && s_lower <= s && s <= s_upper &&
           main_lhs >= main_rhs && micro_lhs <= micro_rhs;
  }
};

RhoBounds rho_bounds(double alpha, double eps, int d);

}  // namespace mixgap::lab
