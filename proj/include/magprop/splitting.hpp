#pragma once

#include "magprop/core.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace magprop {

enum class SplitVariant {
  Plain,      // e^{lambda A} e^{lambda B}
  Symmetric,  // e^{lambda B/2} e^{lambda A} e^{lambda B/2}
};

std::string_view to_string(SplitVariant v);

/// Hermitian A, B and the splitting parameter; the -i factor is applied at
/// exponentiation time, so the product formulas act on -iA, -iB.
struct OperatorPair {
  MatrixXc a;
  MatrixXc b;
  Real lambda = 0.1;
};

inline constexpr Real kHermitianTolerance = 1e-12;
inline constexpr Index kMaxPairDimension = 64;

template <typename Derived>
Real hermiticity_residual(const Eigen::MatrixBase<Derived>& h) {
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() != h.cols()) raise(ErrorCode::DimensionMismatch, "matrix is not square");
  if (hermiticity_residual(h) > kHermitianTolerance) {
    raise(ErrorCode::NotHermitian, "matrix asymmetry exceeds 1e-12");
  }
}

/// exp(-i theta H) via the spectral decomposition of H.
template <typename Derived>
MatrixXc hermitian_exponential(const Eigen::MatrixBase<Derived>& h, Real theta) {
  require_hermitian(h);
  const MatrixXc hm = h.template cast<Complex>();
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(hm);
  const VectorXc phases =
      (es.eigenvalues().template cast<Complex>() * Complex(0.0, -theta)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Operator 2-norm from the eigenvalues of M^dagger M.
template <typename Derived>
Real spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  const MatrixXc g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

template <typename DA, typename DB>
MatrixXc commutator(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return a * b - b * a;
}

/// Product formula built from e^{-i lambda A}, e^{-i lambda B}.
MatrixXc split_product(const OperatorPair& pair, SplitVariant variant);

/// || exp[-i lambda (A + B)] - split product ||_2
Real product_formula_error(const OperatorPair& pair, SplitVariant variant);

/// Taylor coefficients (orders 0..3 in lambda) of
///   product(lambda X, lambda Y) - exp(lambda (X + Y))
/// for general square X, Y, computed by truncated series multiplication.
std::array<MatrixXc, 4> product_taylor_defect(const MatrixXc& x, const MatrixXc& y,
                                              SplitVariant variant);

struct OrderFit {
  Real order = 0.0;
  Real intercept = 0.0;
  /// Largest deviation of log(error) from the fitted line.
  Real residual = 0.0;
};

/// Least-squares slope of log(y) against log(x); at least two points.
OrderFit fit_power_law(std::span<const Real> x, std::span<const Real> y);

/// fit_power_law with the order-study preconditions: >= 4 points, a decade of
/// lambda, every error above 10 * machine epsilon * norm_scale.
OrderFit fit_error_order(std::span<const Real> lambdas, std::span<const Real> errors,
                         Real norm_scale = 1.0);

/// n points logarithmically spaced from hi down to lo.
std::vector<Real> log_spaced_descending(Real lo, Real hi, int n);

/// Default lambda ladder: 8 points in [1e-3, 1e-1], decreasing.
std::vector<Real> default_lambda_ladder();

/// Hermitian matrix with i.i.d. complex Gaussian entries of variance 1/n.
MatrixXc random_hermitian(Index n, Rng& rng);

OperatorPair random_hermitian_pair(Index n, Real lambda, std::uint64_t seed);

OperatorPair pauli_pair(Real lambda);

}  // namespace magprop
