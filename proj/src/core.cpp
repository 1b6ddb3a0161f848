#include "magprop/core.hpp"

#include "parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace magprop {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::BoundaryClash: return "BoundaryClash";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::ZeroStep: return "ZeroStep";
    case ErrorCode::MatrixTooLarge: return "MatrixTooLarge";
    case ErrorCode::RangeTooSmall: return "RangeTooSmall";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

void PhysicalConstants::validate() const {
  if (!(mass > 0) || !(hbar > 0) || !(charge > 0) || !(light_speed > 0)) {
    raise(ErrorCode::InvalidArgument, "physical constants must be strictly positive");
  }
}

bool operator==(const GridAxis& a, const GridAxis& b) {
  return a.lower == b.lower && a.upper == b.upper && a.points == b.points;
}

SpatialGrid::SpatialGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3) {
    raise(ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
  }
  size_ = 1;
  for (const auto& ax : axes_) {
    if (ax.points < 8) raise(ErrorCode::InvalidArgument, "grid needs at least 8 points per axis");
    if (!(ax.upper > ax.lower)) raise(ErrorCode::InvalidArgument, "grid upper bound must exceed lower");
    strides_.push_back(size_);
    size_ *= ax.points;
  }
}

SpatialGrid SpatialGrid::cube(int dimension, Real lower, Real upper, Index points) {
  return SpatialGrid(std::vector<GridAxis>(static_cast<std::size_t>(dimension),
                                           GridAxis{lower, upper, points}));
}

Real SpatialGrid::cell_volume() const {
  Real v = 1.0;
  for (const auto& ax : axes_) v *= ax.spacing();
  return v;
}

Position SpatialGrid::point(Index flat) const {
  Position x(dimension());
  for (int a = 0; a < dimension(); ++a) x[a] = coordinate(a, axis_index(flat, a));
  return x;
}

bool SpatialGrid::contains(const Position& x) const {
  if (x.size() != dimension()) return false;
  for (int a = 0; a < dimension(); ++a) {
    if (x[a] < axis(a).lower || x[a] > axis(a).upper) return false;
  }
  return true;
}

bool operator==(const SpatialGrid& a, const SpatialGrid& b) { return a.axes_ == b.axes_; }

WaveFunction::WaveFunction(SpatialGrid grid, VectorXc amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid_.size()) {
    raise(ErrorCode::DimensionMismatch, "amplitude count does not match grid size");
  }
  if (!amplitudes_.allFinite()) raise(ErrorCode::InvalidArgument, "non-finite amplitudes");
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b) {
  if (!(a == b)) raise(ErrorCode::GridMismatch, "wave functions live on different grids");
}

Complex inner_product(const WaveFunction& psi, const WaveFunction& phi) {
  require_same_grid(psi.grid(), phi.grid());
  return psi.amplitudes().dot(phi.amplitudes()) * psi.grid().cell_volume();
}

Real l2_norm(const WaveFunction& psi) {
  return std::sqrt(psi.amplitudes().squaredNorm() * psi.grid().cell_volume());
}

Real l2_distance(const WaveFunction& psi, const WaveFunction& phi) {
  require_same_grid(psi.grid(), phi.grid());
  return std::sqrt((psi.amplitudes() - phi.amplitudes()).squaredNorm() *
                   psi.grid().cell_volume());
}

WaveFunction normalized(const WaveFunction& psi) {
  const Real n = l2_norm(psi);
  if (!(n > 0)) raise(ErrorCode::DegenerateData, "cannot normalize a zero state");
  return WaveFunction(psi.grid(), psi.amplitudes() / n);
}

WaveFunction make_gaussian_packet(const SpatialGrid& grid, const Position& center,
                                  Real width, const Position& momentum) {
  const int d = grid.dimension();
  if (center.size() != d || momentum.size() != d) {
    raise(ErrorCode::DimensionMismatch, "packet center/momentum dimension differs from grid");
  }
  for (int a = 0; a < d; ++a) {
    if (!(width > 2.0 * grid.spacing(a))) {
      std::ostringstream msg;
      msg << "packet width " << width << " <= 2*spacing " << 2.0 * grid.spacing(a);
      raise(ErrorCode::GridTooCoarse, msg.str());
    }
    if (center[a] - 4.0 * width < grid.axis(a).lower ||
        center[a] + 4.0 * width > grid.axis(a).upper) {
      raise(ErrorCode::BoundaryClash, "packet support (4 sigma) reaches the grid boundary");
    }
  }
  VectorXc amp(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Position x = grid.point(i);
    Real envelope = 0.0;
    Real phase = 0.0;
    for (int a = 0; a < d; ++a) {
      const Real dx = x[a] - center[a];
      envelope -= dx * dx / (4.0 * width * width);
      phase += momentum[a] * dx;
    }
    amp[i] = std::exp(Complex(envelope, phase));
  }
  return normalized(WaveFunction(grid, std::move(amp)));
}

Eigen::VectorXd wavevectors(const SpatialGrid& grid, int a) {
  const Index m = grid.axis(a).points;
  const Real scale = 2.0 * kPi / grid.axis(a).length();
  Eigen::VectorXd k(m);
  for (Index j = 0; j < m; ++j) {
    const Index q = (j < (m + 1) / 2) ? j : j - m;
    k[j] = scale * static_cast<Real>(q);
  }
  return k;
}

Position mean_position(const WaveFunction& psi) {
  const auto& g = psi.grid();
  Position num = Position::Zero(g.dimension());
  Real den = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const Real w = std::norm(psi[i]);
    num += w * g.point(i);
    den += w;
  }
  return num / den;
}

Position position_spread(const WaveFunction& psi) {
  const auto& g = psi.grid();
  const Position mean = mean_position(psi);
  Position var = Position::Zero(g.dimension());
  Real den = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const Real w = std::norm(psi[i]);
    var += w * (g.point(i) - mean).cwiseAbs2();
    den += w;
  }
  return (var / den).cwiseSqrt();
}

namespace {

// Spectral weights sum_k |psi_hat(k)|^2 * f(k_axis) along every line of axis `a`.
template <typename F>
Real spectral_weighted_sum(const WaveFunction& psi, int a, F&& f, Real* total) {
  const auto& g = psi.grid();
  const Index m = g.axis(a).points;
  const Index stride = g.stride(a);
  const Eigen::VectorXd k = wavevectors(g, a);
  Eigen::FFT<Real> fft;
  std::vector<Complex> line(static_cast<std::size_t>(m)), spec;
  Real num = 0.0;
  Real den = 0.0;
  for (Index base = 0; base < g.size(); ++base) {
    if (g.axis_index(base, a) != 0) continue;
    for (Index j = 0; j < m; ++j) line[static_cast<std::size_t>(j)] = psi[base + j * stride];
    fft.fwd(spec, line);
    for (Index j = 0; j < m; ++j) {
      const Real w = std::norm(spec[static_cast<std::size_t>(j)]);
      num += w * f(k[j]);
      den += w;
    }
  }
  if (total) *total = den;
  return num;
}

}  // namespace

Position mean_momentum(const WaveFunction& psi, Real hbar) {
  const int d = psi.grid().dimension();
  Position p(d);
  for (int a = 0; a < d; ++a) {
    Real den = 0.0;
    const Real num = spectral_weighted_sum(psi, a, [](Real k) { return k; }, &den);
    p[a] = hbar * num / den;
  }
  return p;
}

Real mean_momentum_squared(const WaveFunction& psi, Real hbar) {
  Real sum = 0.0;
  for (int a = 0; a < psi.grid().dimension(); ++a) {
    Real den = 0.0;
    const Real num = spectral_weighted_sum(psi, a, [](Real k) { return k * k; }, &den);
    sum += hbar * hbar * num / den;
  }
  return sum;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over (master, index)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {
std::atomic<unsigned> g_thread_limit{0};
}

void set_thread_limit(unsigned threads) { g_thread_limit.store(threads); }

unsigned thread_limit() {
  const unsigned cap = g_thread_limit.load();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return cap == 0 ? hw : std::min(cap, hw);
}

}  // namespace magprop
