#include "magprop/oracles.hpp"

#include <mutex>
#include <sstream>

namespace magprop {

struct SpectralHamiltonian::Cache {
  std::once_flag once;
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver;
};

SpectralHamiltonian::SpectralHamiltonian(SpatialGrid grid, PhysicalConstants constants,
                                         MatrixXc matrix)
    : grid_(std::move(grid)),
      constants_(constants),
      matrix_(std::move(matrix)),
      cache_(std::make_shared<Cache>()) {
  if (matrix_.rows() != grid_.size() || matrix_.cols() != grid_.size()) {
    raise(ErrorCode::DimensionMismatch, "Hamiltonian size does not match the grid");
  }
}

Real SpectralHamiltonian::hermiticity_residual() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

const Eigen::SelfAdjointEigenSolver<MatrixXc>& SpectralHamiltonian::eigensystem() const {
  std::call_once(cache_->once, [this] { cache_->solver.compute(matrix_); });
  return cache_->solver;
}

Real SpectralHamiltonian::energy(const WaveFunction& psi) const {
  require_same_grid(grid_, psi.grid());
  const VectorXc hpsi = matrix_ * psi.amplitudes();
  return psi.amplitudes().dot(hpsi).real() / psi.amplitudes().squaredNorm();
}

namespace {

// First row of the circulant matrix F^dagger diag(f(k)) F along one axis:
// c[n] = (1/M) sum_q f(k_q) exp(2 pi i q n / M).
template <typename F>
VectorXc circulant_symbol(const SpatialGrid& grid, int axis, F&& f) {
  const Index m = grid.axis(axis).points;
  const Eigen::VectorXd k = wavevectors(grid, axis);
  VectorXc roots(m);
  for (Index j = 0; j < m; ++j) {
    roots[j] = std::polar(1.0, 2.0 * kPi * static_cast<Real>(j) / static_cast<Real>(m));
  }
  VectorXc c = VectorXc::Zero(m);
  for (Index n = 0; n < m; ++n) {
    Complex sum = 0.0;
    for (Index q = 0; q < m; ++q) sum += f(k[q]) * roots[(q * n) % m];
    c[n] = sum / static_cast<Real>(m);
  }
  return c;
}

}  // namespace

SpectralHamiltonian build_spectral_hamiltonian(const SpatialGrid& grid,
                                               const FieldConfiguration& field, Index row_cap) {
  const Index n = grid.size();
  if (n > row_cap) {
    std::ostringstream msg;
    msg << "spectral Hamiltonian with " << n << " rows exceeds cap " << row_cap;
    raise(ErrorCode::MatrixTooLarge, msg.str());
  }
  const auto& c = field.constants();
  const int d = grid.dimension();
  const Real inv2m = 1.0 / (2.0 * c.mass);

  std::vector<VectorXc> p1, p2;
  for (int ax = 0; ax < d; ++ax) {
    p1.push_back(circulant_symbol(grid, ax, [&](Real k) { return c.hbar * k; }));
    p2.push_back(circulant_symbol(grid, ax, [&](Real k) { return c.hbar * c.hbar * k * k; }));
  }

  Eigen::MatrixXd a(d, n);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) {
    const Position x = grid.point(i);
    a.col(i) = field.reduced_vector_potential(x);
    v[i] = field.potential(x);
  }

  MatrixXc h = MatrixXc::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    h(r, r) += inv2m * a.col(r).squaredNorm() + v[r];
    for (int ax = 0; ax < d; ++ax) {
      const Index m = grid.axis(ax).points;
      const Index stride = grid.stride(ax);
      const Index ra = grid.axis_index(r, ax);
      for (Index j = 0; j < m; ++j) {
        const Index col = r + (j - ra) * stride;
        const Index offset = ((ra - j) % m + m) % m;
        h(r, col) += inv2m * (p2[static_cast<std::size_t>(ax)][offset] -
                              p1[static_cast<std::size_t>(ax)][offset] * (a(ax, r) + a(ax, col)));
      }
    }
  }
  return SpectralHamiltonian(grid, c, std::move(h));
}

WaveFunction oracle_propagate(const WaveFunction& psi0, Real t, const SpectralHamiltonian& h,
                              TimeMode mode) {
  require_same_grid(psi0.grid(), h.grid());
  if (t == 0.0) return psi0;
  const auto& es = h.eigensystem();
  const Real hbar = h.constants().hbar;
  VectorXc coeff = es.eigenvectors().adjoint() * psi0.amplitudes();
  for (Index k = 0; k < coeff.size(); ++k) {
    const Real e = es.eigenvalues()[k];
    coeff[k] *= mode == TimeMode::RealTime ? std::polar(1.0, -e * t / hbar)
                                           : Complex(std::exp(-e * t / hbar), 0.0);
  }
  return WaveFunction(psi0.grid(), es.eigenvectors() * coeff);
}

WaveFunction apply_gauge_phase(const WaveFunction& psi, const GaugeFunction& chi,
                               const PhysicalConstants& constants, Real sign) {
  const auto& g = psi.grid();
  const Real scale = sign * constants.coupling() / constants.hbar;
  VectorXc out(psi.size());
  for (Index i = 0; i < g.size(); ++i) {
    out[i] = std::polar(1.0, scale * chi.value(g.point(i))) * psi[i];
  }
  return WaveFunction(g, std::move(out));
}

WaveFunction gauge_phase_reference(const WaveFunction& psi0, Real t, const GaugeFunction& chi,
                                   const SpectralHamiltonian& base, TimeMode mode) {
  require_same_grid(psi0.grid(), base.grid());
  const WaveFunction stripped = apply_gauge_phase(psi0, chi, base.constants(), -1.0);
  return apply_gauge_phase(oracle_propagate(stripped, t, base, mode), chi, base.constants(), 1.0);
}

WaveFunction gauge_phase_reference(const WaveFunction& psi0, Real t, const GaugeFunction& chi,
                                   const FieldConfiguration& base_field, TimeMode mode) {
  return gauge_phase_reference(psi0, t, chi, build_spectral_hamiltonian(psi0.grid(), base_field),
                               mode);
}

WaveFunction oracle_ground_state(const SpectralHamiltonian& h) {
  return normalized(WaveFunction(h.grid(), h.eigensystem().eigenvectors().col(0)));
}

}  // namespace magprop
