#pragma once

#include "magprop/core.hpp"
#include "magprop/fields.hpp"
#include "magprop/kernels.hpp"

#include <string>
#include <vector>

namespace magprop {

/// t, N (eps = t/N), field, scheme and grid of one composed propagation.
/// The endpoints are x_0 = initial grid state and x_N = returned state.
struct PropagationPlan {
  Real total_time = 1.0;
  int steps = 1;
  FieldConfiguration field;
  SchemeSpec scheme;
  SpatialGrid grid;
  /// Record <H> with the spectral Hamiltonian at every step.
  bool track_energy = false;
  /// Record norm/position/momentum at every step (otherwise norm only).
  bool track_observables = true;
  /// Refuse packets whose predicted excursion reaches the boundary.
  bool check_boundary = true;
  /// Form T^N by repeated squaring; the trace then holds the endpoints only.
  bool precompose = false;
  Index row_cap = kDefaultRowCap;

  Real step() const { return total_time / static_cast<Real>(steps); }
  void validate() const;
};

struct StepRecord {
  int step = 0;
  Real time = 0.0;
  Real norm = 0.0;
  Position mean_position;
  Position mean_momentum;
  Real energy = 0.0;  // NaN unless tracked
};

struct PropagationTrace {
  std::vector<StepRecord> records;  // N + 1 entries (2 when precomposed), initial state first
  WaveFunction final_state;
  std::vector<std::string> warnings;
};

/// psi_{k+1} = T(eps) psi_k for k = 0..N-1 with the observables recorded.
/// With plan.precompose only steps 0 and N are recorded.
PropagationTrace propagate(const WaveFunction& psi0, const PropagationPlan& plan);

/// T(eps)^N psi0 with T^N formed by repeated squaring.
WaveFunction propagate_precomposed(const WaveFunction& psi0, const PropagationPlan& plan);

/// Final state only, no observables.
WaveFunction propagate_final(const WaveFunction& psi0, const PropagationPlan& plan);

/// Dense matrix power by binary squaring.
MatrixXc matrix_power(const MatrixXc& t, int n);

enum class Observable { Norm, MeanPosition, MeanMomentum, Energy };

std::vector<Real> observable_trace(const PropagationTrace& trace, Observable which, int axis = 0);

/// Checks the packet against the boundary margin at time t, drifting the
/// center with the group velocity <p>/m (real time only).
void check_boundary_margin(const WaveFunction& psi0, const PropagationPlan& plan);

}  // namespace magprop
