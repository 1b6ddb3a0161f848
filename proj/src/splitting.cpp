#include "magprop/splitting.hpp"

#include <limits>
#include <sstream>

namespace magprop {

std::string_view to_string(SplitVariant v) {
  return v == SplitVariant::Plain ? "plain" : "symmetric";
}

namespace {

void check_pair(const OperatorPair& pair) {
  if (pair.a.rows() != pair.b.rows() || pair.a.cols() != pair.b.cols()) {
    raise(ErrorCode::DimensionMismatch, "operator pair has unequal dimensions");
  }
  if (pair.a.rows() > kMaxPairDimension) {
    raise(ErrorCode::DimensionMismatch, "operator pair dimension exceeds 64");
  }
  require_hermitian(pair.a);
  require_hermitian(pair.b);
  if (!(pair.lambda > 0.0) || pair.lambda > 1.0) {
    raise(ErrorCode::InvalidArgument, "lambda must lie in (0, 1]");
  }
}

}  // namespace

MatrixXc split_product(const OperatorPair& pair, SplitVariant variant) {
  check_pair(pair);
  const MatrixXc ua = hermitian_exponential(pair.a, pair.lambda);
  if (variant == SplitVariant::Plain) {
    return ua * hermitian_exponential(pair.b, pair.lambda);
  }
  const MatrixXc half_b = hermitian_exponential(pair.b, 0.5 * pair.lambda);
  return half_b * ua * half_b;
}

Real product_formula_error(const OperatorPair& pair, SplitVariant variant) {
  const MatrixXc product = split_product(pair, variant);
  const MatrixXc exact = hermitian_exponential(pair.a + pair.b, pair.lambda);
  return spectral_norm(exact - product);
}

namespace {

using Series = std::array<MatrixXc, 4>;

Series exp_series(const MatrixXc& x) {
  const Index n = x.rows();
  Series s;
  s[0] = MatrixXc::Identity(n, n);
  for (int k = 1; k < 4; ++k) s[k] = s[k - 1] * x / static_cast<Real>(k);
  return s;
}

Series multiply(const Series& p, const Series& q) {
  Series r;
  for (int k = 0; k < 4; ++k) {
    r[k] = MatrixXc::Zero(p[0].rows(), p[0].cols());
    for (int i = 0; i <= k; ++i) r[k] += p[i] * q[k - i];
  }
  return r;
}

}  // namespace

std::array<MatrixXc, 4> product_taylor_defect(const MatrixXc& x, const MatrixXc& y,
                                              SplitVariant variant) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols()) {
    raise(ErrorCode::DimensionMismatch, "Taylor defect needs equal square matrices");
  }
  const Series exact = exp_series(x + y);
  const Series product = variant == SplitVariant::Plain
                             ? multiply(exp_series(x), exp_series(y))
                             : multiply(multiply(exp_series(0.5 * y), exp_series(x)),
                                        exp_series(0.5 * y));
  Series defect;
  for (int k = 0; k < 4; ++k) defect[k] = product[k] - exact[k];
  return defect;
}

OrderFit fit_power_law(std::span<const Real> x, std::span<const Real> y) {
  if (x.size() != y.size() || x.size() < 2) {
    raise(ErrorCode::DegenerateData, "power-law fit needs at least two paired points");
  }
  const auto n = static_cast<Index>(x.size());
  Eigen::VectorXd lx(n), ly(n);
  for (Index i = 0; i < n; ++i) {
    if (!(x[static_cast<std::size_t>(i)] > 0.0) || !(y[static_cast<std::size_t>(i)] > 0.0)) {
      raise(ErrorCode::DegenerateData, "power-law fit needs positive data");
    }
    lx[i] = std::log(x[static_cast<std::size_t>(i)]);
    ly[i] = std::log(y[static_cast<std::size_t>(i)]);
  }
  const Real mx = lx.mean();
  const Real my = ly.mean();
  const Real sxx = (lx.array() - mx).square().sum();
  if (!(sxx > 0.0)) raise(ErrorCode::DegenerateData, "abscissae are all equal");
  OrderFit fit;
  fit.order = ((lx.array() - mx) * (ly.array() - my)).sum() / sxx;
  fit.intercept = my - fit.order * mx;
  fit.residual = (ly.array() - (fit.intercept + fit.order * lx.array())).abs().maxCoeff();
  return fit;
}

OrderFit fit_error_order(std::span<const Real> lambdas, std::span<const Real> errors,
                         Real norm_scale) {
  if (lambdas.size() < 4 || lambdas.size() != errors.size()) {
    raise(ErrorCode::DegenerateData, "order fit needs at least four paired points");
  }
  Real lo = lambdas[0], hi = lambdas[0];
  for (Real l : lambdas) {
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  if (!(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12)) {
    raise(ErrorCode::DegenerateData, "lambda values must span at least one decade");
  }
  const Real floor = 10.0 * std::numeric_limits<Real>::epsilon() * norm_scale;
  for (Real e : errors) {
    if (!(e > floor)) {
      std::ostringstream msg;
      msg << "error " << e << " is below the noise floor " << floor;
      raise(ErrorCode::DegenerateData, msg.str());
    }
  }
  return fit_power_law(lambdas, errors);
}

std::vector<Real> log_spaced_descending(Real lo, Real hi, int n) {
  std::vector<Real> out;
  const Real llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    const Real s = n == 1 ? 0.0 : static_cast<Real>(i) / static_cast<Real>(n - 1);
    out.push_back(std::exp(lhi + s * (llo - lhi)));
  }
  return out;
}

std::vector<Real> default_lambda_ladder() { return log_spaced_descending(1e-3, 1e-1, 8); }

MatrixXc random_hermitian(Index n, Rng& rng) {
  std::normal_distribution<Real> normal(0.0, 1.0 / std::sqrt(2.0 * static_cast<Real>(n)));
  MatrixXc g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  }
  MatrixXc h = 0.5 * (g + g.adjoint());
  // Symmetrize exactly so the Hermiticity check sees zero asymmetry.
  for (Index i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) h(j, i) = std::conj(h(i, j));
  }
  return h;
}

OperatorPair random_hermitian_pair(Index n, Real lambda, std::uint64_t seed) {
  Rng rng(seed);
  OperatorPair p;
  p.a = random_hermitian(n, rng);
  p.b = random_hermitian(n, rng);
  p.lambda = lambda;
  return p;
}

OperatorPair pauli_pair(Real lambda) {
  OperatorPair p;
  p.a = MatrixXc(2, 2);
  p.a << 0, 1, 1, 0;
  p.b = MatrixXc(2, 2);
  p.b << 1, 0, 0, -1;
  p.lambda = lambda;
  return p;
}

}  // namespace magprop
