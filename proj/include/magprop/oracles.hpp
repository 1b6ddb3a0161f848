#pragma once

#include "magprop/core.hpp"
#include "magprop/fields.hpp"
#include "magprop/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <memory>

namespace magprop {

/// Dense periodic spectral discretization of
///   H = (p^2 - p.a - a.p + a^2) / 2m + V,   a = eA/c,
/// with p diagonal in the discrete Fourier basis. The eigendecomposition is
/// computed on first use and shared between copies.
class SpectralHamiltonian {
 public:
  SpectralHamiltonian(SpatialGrid grid, PhysicalConstants constants, MatrixXc matrix);

  const SpatialGrid& grid() const { return grid_; }
  const PhysicalConstants& constants() const { return constants_; }
  const MatrixXc& matrix() const { return matrix_; }

  Real hermiticity_residual() const;

  const Eigen::SelfAdjointEigenSolver<MatrixXc>& eigensystem() const;
  const Eigen::VectorXd& eigenvalues() const { return eigensystem().eigenvalues(); }

  /// <psi|H|psi> / <psi|psi>
  Real energy(const WaveFunction& psi) const;

 private:
  struct Cache;
  SpatialGrid grid_;
  PhysicalConstants constants_;
  MatrixXc matrix_;
  std::shared_ptr<Cache> cache_;
};

SpectralHamiltonian build_spectral_hamiltonian(const SpatialGrid& grid,
                                               const FieldConfiguration& field,
                                               Index row_cap = kDefaultRowCap);

/// exp(-iHt/hbar) psi0 in real time, exp(-H tau/hbar) psi0 in imaginary time.
WaveFunction oracle_propagate(const WaveFunction& psi0, Real t, const SpectralHamiltonian& h,
                              TimeMode mode = TimeMode::RealTime);

/// Multiplies psi by exp(sign * i e chi(x) / (hbar c)) pointwise.
WaveFunction apply_gauge_phase(const WaveFunction& psi, const GaugeFunction& chi,
                               const PhysicalConstants& constants, Real sign);

/// e^{ie chi/hbar c} U_base(t) e^{-ie chi/hbar c} psi0, the evolution under
/// the gauge-transformed field predicted by gauge covariance.
WaveFunction gauge_phase_reference(const WaveFunction& psi0, Real t, const GaugeFunction& chi,
                                   const SpectralHamiltonian& base,
                                   TimeMode mode = TimeMode::RealTime);

WaveFunction gauge_phase_reference(const WaveFunction& psi0, Real t, const GaugeFunction& chi,
                                   const FieldConfiguration& base_field,
                                   TimeMode mode = TimeMode::RealTime);

/// Lowest eigenvector of H as a normalized wave function.
WaveFunction oracle_ground_state(const SpectralHamiltonian& h);

}  // namespace magprop
