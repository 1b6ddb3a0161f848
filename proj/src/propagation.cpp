#include "magprop/propagation.hpp"

#include "magprop/oracles.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace magprop {

void PropagationPlan::validate() const {
  if (steps < 1) raise(ErrorCode::InvalidArgument, "step count N must be at least 1");
  if (total_time == 0.0) raise(ErrorCode::ZeroStep, "total time must be nonzero");
  if (scheme.mode == TimeMode::ImaginaryTime && !(total_time > 0.0)) {
    raise(ErrorCode::InvalidArgument, "imaginary-time propagation needs positive tau");
  }
}

void check_boundary_margin(const WaveFunction& psi0, const PropagationPlan& plan) {
  const auto& g = psi0.grid();
  const Position center = mean_position(psi0);
  const Position spread = position_spread(psi0);
  Position drift = Position::Zero(g.dimension());
  if (plan.scheme.mode == TimeMode::RealTime) {
    const auto& c = plan.field.constants();
    const Position velocity =
        (mean_momentum(psi0, c.hbar) - plan.field.reduced_vector_potential(center)) / c.mass;
    drift = velocity * plan.total_time;
  }
  for (const Position& at : {center, Position(center + drift)}) {
    for (int a = 0; a < g.dimension(); ++a) {
      if (at[a] - 4.0 * spread[a] < g.axis(a).lower || at[a] + 4.0 * spread[a] > g.axis(a).upper) {
        std::ostringstream msg;
        msg << "packet excursion " << at[a] << " +- 4*" << spread[a] << " leaves axis " << a
            << " [" << g.axis(a).lower << ", " << g.axis(a).upper << "]";
        raise(ErrorCode::BoundaryClash, msg.str());
      }
    }
  }
}

namespace {

void prepare(const WaveFunction& psi0, const PropagationPlan& plan) {
  plan.validate();
  require_same_grid(psi0.grid(), plan.grid);
  if (plan.check_boundary) check_boundary_margin(psi0, plan);
}

std::vector<std::string> collect_warnings(const WaveFunction& psi0, const PropagationPlan& plan) {
  std::vector<std::string> warnings;
  const auto& c = plan.field.constants();
  const Real eps = std::abs(plan.step());
  if (plan.scheme.mode == TimeMode::RealTime) {
    const Real min_step = real_time_alias_free_step(plan.grid, c);
    if (eps < min_step) {
      std::ostringstream msg;
      msg << "real-time step " << eps << " is below the alias-free bound " << min_step
          << "; the sampled kernel folds copies of the state into the domain";
      warnings.push_back(msg.str());
    }
  }
  const auto& g = psi0.grid();
  const Real peak = psi0.amplitudes().cwiseAbs2().maxCoeff();
  Real vmax = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    if (std::norm(psi0[i]) > 1e-10 * peak) vmax = std::max(vmax, std::abs(plan.field.potential(g.point(i))));
  }
  const Real energy_scale = mean_momentum_squared(psi0, c.hbar) / (2.0 * c.mass) + vmax;
  if (eps * energy_scale / c.hbar > 1.0) {
    std::ostringstream msg;
    msg << "eps * energy / hbar = " << eps * energy_scale / c.hbar << " exceeds 1";
    warnings.push_back(msg.str());
  }
  return warnings;
}

}  // namespace

PropagationTrace propagate(const WaveFunction& psi0, const PropagationPlan& plan) {
  prepare(psi0, plan);
  const auto& c = plan.field.constants();
  const TransferMatrix t =
      build_transfer_matrix(plan.grid, plan.step(), plan.field, plan.scheme, plan.row_cap);
  std::optional<SpectralHamiltonian> h;
  if (plan.track_energy) h.emplace(build_spectral_hamiltonian(plan.grid, plan.field, plan.row_cap));

  PropagationTrace trace;
  trace.warnings = collect_warnings(psi0, plan);
  trace.records.reserve(static_cast<std::size_t>(plan.steps) + 1);
  auto record = [&](int k, const WaveFunction& psi) {
    StepRecord r;
    r.step = k;
    r.time = plan.step() * k;
    r.norm = l2_norm(psi);
    if (plan.track_observables) {
      r.mean_position = mean_position(psi);
      r.mean_momentum = mean_momentum(psi, c.hbar);
    }
    r.energy = h ? h->energy(psi) : std::numeric_limits<Real>::quiet_NaN();
    trace.records.push_back(std::move(r));
  };

  record(0, psi0);
  if (plan.precompose) {
    WaveFunction psi(plan.grid, matrix_power(t.entries, plan.steps) * psi0.amplitudes());
    record(plan.steps, psi);
    trace.final_state = std::move(psi);
    return trace;
  }
  WaveFunction psi = psi0;
  for (int k = 1; k <= plan.steps; ++k) {
    psi = t.apply(psi);
    record(k, psi);
  }
  trace.final_state = std::move(psi);
  return trace;
}

WaveFunction propagate_final(const WaveFunction& psi0, const PropagationPlan& plan) {
  prepare(psi0, plan);
  const TransferMatrix t =
      build_transfer_matrix(plan.grid, plan.step(), plan.field, plan.scheme, plan.row_cap);
  WaveFunction psi = psi0;
  for (int k = 0; k < plan.steps; ++k) psi = t.apply(psi);
  return psi;
}

MatrixXc matrix_power(const MatrixXc& t, int n) {
  if (n < 0) raise(ErrorCode::InvalidArgument, "negative matrix power");
  MatrixXc result = MatrixXc::Identity(t.rows(), t.cols());
  MatrixXc base = t;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

WaveFunction propagate_precomposed(const WaveFunction& psi0, const PropagationPlan& plan) {
  prepare(psi0, plan);
  const TransferMatrix t =
      build_transfer_matrix(plan.grid, plan.step(), plan.field, plan.scheme, plan.row_cap);
  return WaveFunction(plan.grid, matrix_power(t.entries, plan.steps) * psi0.amplitudes());
}

std::vector<Real> observable_trace(const PropagationTrace& trace, Observable which, int axis) {
  std::vector<Real> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    switch (which) {
      case Observable::Norm: out.push_back(r.norm); break;
      case Observable::MeanPosition:
        out.push_back(axis < r.mean_position.size() ? r.mean_position[axis]
                                                    : std::numeric_limits<Real>::quiet_NaN());
        break;
      case Observable::MeanMomentum:
        out.push_back(axis < r.mean_momentum.size() ? r.mean_momentum[axis]
                                                    : std::numeric_limits<Real>::quiet_NaN());
        break;
      case Observable::Energy: out.push_back(r.energy); break;
    }
  }
  return out;
}

}  // namespace magprop
