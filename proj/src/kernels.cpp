#include "magprop/kernels.hpp"

#include "parallel.hpp"

#include <cmath>
#include <sstream>

namespace magprop {

std::string_view to_string(VectorRule rule) {
  switch (rule) {
    case VectorRule::NaiveLeft: return "naive_left";
    case VectorRule::NaiveRight: return "naive_right";
    case VectorRule::EndpointAverage: return "endpoint_average";
    case VectorRule::Midpoint: return "midpoint";
  }
  return "endpoint_average";
}

std::string_view to_string(PotentialRule rule) {
  switch (rule) {
    case PotentialRule::Left: return "left";
    case PotentialRule::Right: return "right";
    case PotentialRule::SymmetricSplit: return "symmetric_split";
    case PotentialRule::Midpoint: return "midpoint";
  }
  return "symmetric_split";
}

std::string_view to_string(TimeMode mode) {
  return mode == TimeMode::RealTime ? "real" : "imaginary";
}

namespace {

void check_step(Real step, TimeMode mode) {
  if (step == 0.0) raise(ErrorCode::ZeroStep, "time step must be nonzero");
  if (mode == TimeMode::ImaginaryTime && !(step > 0.0)) {
    raise(ErrorCode::InvalidArgument, "imaginary-time step must be positive");
  }
}

Complex free_prefactor(int dimension, Real step, const PhysicalConstants& c, TimeMode mode) {
  if (mode == TimeMode::ImaginaryTime) {
    return std::pow(c.mass / (2.0 * kPi * c.hbar * step), 0.5 * dimension);
  }
  const Complex z = c.mass / (2.0 * kPi * kI * c.hbar * step);
  return std::pow(z, 0.5 * dimension);
}

// Exponent of the free kernel; purely imaginary in real time, real in imaginary time.
Complex free_exponent(Real r2, Real step, const PhysicalConstants& c, TimeMode mode) {
  const Real q = c.mass * r2 / (2.0 * c.hbar * step);
  return mode == TimeMode::RealTime ? Complex(0.0, q) : Complex(-q, 0.0);
}

// Exponent of the scalar factor for an already-placed potential value.
Complex scalar_exponent(Real v, Real step, const PhysicalConstants& c, TimeMode mode) {
  const Real q = step * v / c.hbar;
  return mode == TimeMode::RealTime ? Complex(0.0, -q) : Complex(-q, 0.0);
}

Position averaged_field(const Position& x, const Position& y, const FieldConfiguration& f,
                        VectorRule rule) {
  switch (rule) {
    case VectorRule::NaiveLeft: return f.reduced_vector_potential(y);
    case VectorRule::NaiveRight: return f.reduced_vector_potential(x);
    case VectorRule::EndpointAverage:
      return 0.5 * (f.reduced_vector_potential(x) + f.reduced_vector_potential(y));
    case VectorRule::Midpoint: return f.reduced_vector_potential(0.5 * (x + y));
  }
  return f.reduced_vector_potential(y);
}

Real placed_potential(const Position& x, const Position& y, const FieldConfiguration& f,
                      PotentialRule rule) {
  switch (rule) {
    case PotentialRule::Left: return f.potential(y);
    case PotentialRule::Right: return f.potential(x);
    case PotentialRule::SymmetricSplit: return 0.5 * (f.potential(x) + f.potential(y));
    case PotentialRule::Midpoint: return f.potential(0.5 * (x + y));
  }
  return f.potential(y);
}

void require_dims(const Position& x, const Position& y) {
  if (x.size() != y.size() || x.size() < 1 || x.size() > 3) {
    raise(ErrorCode::DimensionMismatch, "kernel endpoints must share a dimension in 1..3");
  }
}

}  // namespace

Complex free_kernel(const Position& x, const Position& y, Real step,
                    const PhysicalConstants& constants, TimeMode mode) {
  require_dims(x, y);
  check_step(step, mode);
  const Real r2 = (x - y).squaredNorm();
  return free_prefactor(static_cast<int>(x.size()), step, constants, mode) *
         std::exp(free_exponent(r2, step, constants, mode));
}

Complex vector_phase(const Position& x, const Position& y, const FieldConfiguration& field,
                     VectorRule rule) {
  require_dims(x, y);
  const Real phase = (x - y).dot(averaged_field(x, y, field, rule)) / field.constants().hbar;
  return std::polar(1.0, phase);
}

Complex scalar_phase(const Position& x, const Position& y, Real step,
                     const FieldConfiguration& field, PotentialRule rule, TimeMode mode) {
  require_dims(x, y);
  if (rule == PotentialRule::SymmetricSplit) {
    return std::exp(scalar_exponent(0.5 * field.potential(x), step, field.constants(), mode)) *
           std::exp(scalar_exponent(0.5 * field.potential(y), step, field.constants(), mode));
  }
  return std::exp(scalar_exponent(placed_potential(x, y, field, rule), step, field.constants(), mode));
}

Complex short_time_kernel(const Position& x, const Position& y, Real step,
                          const FieldConfiguration& field, const SchemeSpec& scheme) {
  return free_kernel(x, y, step, field.constants(), scheme.mode) *
         vector_phase(x, y, field, scheme.vector_rule) *
         scalar_phase(x, y, step, field, scheme.potential_rule, scheme.mode);
}

WaveFunction TransferMatrix::apply(const WaveFunction& psi) const {
  require_same_grid(grid, psi.grid());
  VectorXc out(psi.size());
  detail::parallel_for(entries.rows(), [&](Index begin, Index end) {
    out.segment(begin, end - begin).noalias() =
        entries.middleRows(begin, end - begin) * psi.amplitudes();
  });
  return WaveFunction(grid, std::move(out));
}

namespace {

// Field values cached on the grid and, when a midpoint rule needs them, on
// the half-grid of pairwise midpoints lower + (i + j) * dx / 2.
struct FieldCache {
  int dim = 0;
  Index n = 0;
  Eigen::MatrixXd coords;  // dim x n
  Eigen::MatrixXd a;       // dim x n, reduced field
  Eigen::VectorXd v;
  std::vector<Index> half_strides;
  Eigen::MatrixXd half_a;
  Eigen::VectorXd half_v;

  Index half_index(const SpatialGrid& g, Index i, Index j) const {
    Index h = 0;
    for (int ax = 0; ax < dim; ++ax) {
      h += (g.axis_index(i, ax) + g.axis_index(j, ax)) * half_strides[static_cast<std::size_t>(ax)];
    }
    return h;
  }
};

FieldCache make_cache(const SpatialGrid& g, const FieldConfiguration& f, const SchemeSpec& s) {
  FieldCache c;
  c.dim = g.dimension();
  c.n = g.size();
  c.coords.resize(c.dim, c.n);
  c.a.resize(c.dim, c.n);
  c.v.resize(c.n);
  for (Index i = 0; i < c.n; ++i) {
    const Position x = g.point(i);
    c.coords.col(i) = x;
    c.a.col(i) = f.reduced_vector_potential(x);
    c.v[i] = f.potential(x);
  }
  const bool need_half =
      s.vector_rule == VectorRule::Midpoint || s.potential_rule == PotentialRule::Midpoint;
  if (need_half) {
    Index total = 1;
    for (int ax = 0; ax < c.dim; ++ax) {
      c.half_strides.push_back(total);
      total *= 2 * g.axis(ax).points - 1;
    }
    c.half_a.resize(c.dim, total);
    c.half_v.resize(total);
    for (Index h = 0; h < total; ++h) {
      Position x(c.dim);
      for (int ax = 0; ax < c.dim; ++ax) {
        const Index hm = 2 * g.axis(ax).points - 1;
        const Index k = (h / c.half_strides[static_cast<std::size_t>(ax)]) % hm;
        x[ax] = g.axis(ax).lower + 0.5 * static_cast<Real>(k) * g.spacing(ax);
      }
      c.half_a.col(h) = f.reduced_vector_potential(x);
      c.half_v[h] = f.potential(x);
    }
  }
  return c;
}

}  // namespace

TransferMatrix build_transfer_matrix(const SpatialGrid& grid, Real step,
                                     const FieldConfiguration& field, const SchemeSpec& scheme,
                                     Index row_cap) {
  check_step(step, scheme.mode);
  if (grid.size() > row_cap) {
    std::ostringstream msg;
    msg << "transfer matrix with " << grid.size() << " rows exceeds cap " << row_cap;
    raise(ErrorCode::MatrixTooLarge, msg.str());
  }
  const auto& constants = field.constants();
  const FieldCache c = make_cache(grid, field, scheme);
  const Complex weight =
      free_prefactor(grid.dimension(), step, constants, scheme.mode) * grid.cell_volume();
  const Real inv_hbar = 1.0 / constants.hbar;

  TransferMatrix t{grid, step, scheme, MatrixXc(c.n, c.n)};
  auto& m = t.entries;
  detail::parallel_for(c.n, [&](Index col_begin, Index col_end) {
    Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1> delta(c.dim), abar(c.dim);
    for (Index j = col_begin; j < col_end; ++j) {
      for (Index i = 0; i < c.n; ++i) {
        delta = c.coords.col(i) - c.coords.col(j);
        Index h = 0;
        if (!c.half_strides.empty()) h = c.half_index(grid, i, j);
        switch (scheme.vector_rule) {
          case VectorRule::NaiveLeft: abar = c.a.col(j); break;
          case VectorRule::NaiveRight: abar = c.a.col(i); break;
          case VectorRule::EndpointAverage: abar = 0.5 * (c.a.col(i) + c.a.col(j)); break;
          case VectorRule::Midpoint: abar = c.half_a.col(h); break;
        }
        Real v = 0.0;
        switch (scheme.potential_rule) {
          case PotentialRule::Left: v = c.v[j]; break;
          case PotentialRule::Right: v = c.v[i]; break;
          case PotentialRule::SymmetricSplit: v = 0.5 * (c.v[i] + c.v[j]); break;
          case PotentialRule::Midpoint: v = c.half_v[h]; break;
        }
        const Complex exponent = free_exponent(delta.squaredNorm(), step, constants, scheme.mode) +
                                 Complex(0.0, delta.dot(abar) * inv_hbar) +
                                 scalar_exponent(v, step, constants, scheme.mode);
        m(i, j) = weight * std::exp(exponent);
      }
    }
  });
  return t;
}

Real real_time_alias_free_step(const SpatialGrid& grid, const PhysicalConstants& constants) {
  Real worst = 0.0;
  for (const auto& ax : grid.axes()) {
    worst = std::max(worst, constants.mass * ax.length() * ax.spacing() / (2.0 * kPi * constants.hbar));
  }
  return worst;
}

}  // namespace magprop
