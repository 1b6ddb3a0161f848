#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace magprop {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// A point of configuration space; dimension 1..3 without heap allocation.
using Position = Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr Real kPi = 3.14159265358979323846;

enum class ErrorCode {
  GridTooCoarse,
  BoundaryClash,
  GridMismatch,
  OutOfDomain,
  ZeroStep,
  MatrixTooLarge,
  RangeTooSmall,
  NotHermitian,
  DimensionMismatch,
  DegenerateData,
  ConfigInvalid,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the named codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

struct PhysicalConstants {
  Real mass = 1.0;
  Real hbar = 1.0;
  Real charge = 1.0;
  Real light_speed = 1.0;

  /// e/c, the factor turning A into the reduced field a = eA/c.
  Real coupling() const { return charge / light_speed; }

  void validate() const;
};

enum class TimeMode { RealTime, ImaginaryTime };

struct GridAxis {
  Real lower = 0.0;
  Real upper = 1.0;
  Index points = 8;

  Real spacing() const { return (upper - lower) / static_cast<Real>(points); }
  Real length() const { return upper - lower; }
};

/// Uniform tensor-product grid. Points are x_j = lower + j*spacing for
/// j = 0..M-1 (the upper bound is the periodic image of the lower one).
/// Flat indices run fastest along axis 0.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  explicit SpatialGrid(std::vector<GridAxis> axes);

  /// Same axis on every dimension.
  static SpatialGrid cube(int dimension, Real lower, Real upper, Index points);

  int dimension() const { return static_cast<int>(axes_.size()); }
  Index size() const { return size_; }
  const GridAxis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  const std::vector<GridAxis>& axes() const { return axes_; }
  Real spacing(int a) const { return axis(a).spacing(); }
  Real cell_volume() const;
  Index stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }

  /// Index along axis `a` of flat index `flat`.
  Index axis_index(Index flat, int a) const {
    return (flat / stride(a)) % axis(a).points;
  }
  Real coordinate(int a, Index i) const {
    return axis(a).lower + static_cast<Real>(i) * spacing(a);
  }
  Position point(Index flat) const;

  bool contains(const Position& x) const;

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b);

 private:
  std::vector<GridAxis> axes_;
  std::vector<Index> strides_;
  Index size_ = 0;
};

bool operator==(const GridAxis& a, const GridAxis& b);

/// Complex amplitudes on a grid. The norm convention includes the volume
/// element, so <psi|psi> = sum |psi|^2 * dV.
class WaveFunction {
 public:
  WaveFunction() = default;
  WaveFunction(SpatialGrid grid, VectorXc amplitudes);

  const SpatialGrid& grid() const { return grid_; }
  const VectorXc& amplitudes() const { return amplitudes_; }
  Complex operator[](Index i) const { return amplitudes_[i]; }
  Index size() const { return amplitudes_.size(); }

 private:
  SpatialGrid grid_;
  VectorXc amplitudes_;
};

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b);

Complex inner_product(const WaveFunction& psi, const WaveFunction& phi);

/// sqrt(<psi|psi>).
Real l2_norm(const WaveFunction& psi);

/// L2 grid distance ||psi - phi||.
Real l2_distance(const WaveFunction& psi, const WaveFunction& phi);

WaveFunction normalized(const WaveFunction& psi);

/// Product of per-axis Gaussians exp(-(x-c)^2/(4 sigma^2) + i k0 (x-c)),
/// normalized on the grid. Requires sigma > 2*spacing and the window
/// center +- 4 sigma inside every axis.
WaveFunction make_gaussian_packet(const SpatialGrid& grid, const Position& center,
                                  Real width, const Position& momentum);

/// Wavevectors of the periodic grid along axis `a`, in FFT order
/// (0, 1, ..., M/2-1, -M/2, ..., -1) * 2 pi / L.
Eigen::VectorXd wavevectors(const SpatialGrid& grid, int a);

Position mean_position(const WaveFunction& psi);
Position position_spread(const WaveFunction& psi);

/// <p> per axis from the discrete Fourier representation.
Position mean_momentum(const WaveFunction& psi, Real hbar);

/// <|p|^2> from the discrete Fourier representation.
Real mean_momentum_squared(const WaveFunction& psi, Real hbar);

// RNG contract: explicit 64-bit seeds everywhere.
using Rng = std::mt19937_64;

/// Deterministic sub-seed for batch `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Caps the number of worker threads used by row-parallel loops.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

}  // namespace magprop
