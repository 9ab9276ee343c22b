#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gdss/errors.hpp"

namespace gdss {

/// A reproducible random stream keyed by (seed, stream id).
///
/// Two streams built from the same pair produce bit-identical sequences;
/// distinct stream ids are decorrelated through std::seed_seq.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma with the given shape and unit rate.
  double gamma(double shape);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Inverse gamma with density proportional to x^{-shape-1} exp(-scale / x).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

/// Inverse Gaussian (Wald) law via the Michael-Schucany-Haas transform.
double sample_inverse_gaussian(double mean, double shape, RngStream& rng);

/// Generalised inverse Gaussian with density proportional to
/// x^{order-1} exp(-(chi / x + psi * x) / 2).
///
/// Admissible parameters: chi > 0 and psi > 0; chi > 0, psi = 0 and order < 0;
/// or chi = 0, psi > 0 and order > 0. Uses the ratio-of-uniforms family of
/// Hörmann and Leydold (with and without mode shift) plus their dedicated
/// method for the non-log-concave corner.
double sample_gig(double chi, double psi, double order, RngStream& rng);

/// Draw from N(P^{-1} b, s * P^{-1}) given the precision P, linear term b and
/// noise variance s. Throws NumericalError when P is not numerically SPD.
template <typename DerivedB, typename DerivedP>
Eigen::Matrix<typename DerivedP::Scalar, Eigen::Dynamic, 1> sample_mvn_precision(
    const Eigen::MatrixBase<DerivedB>& linear_term, const Eigen::MatrixBase<DerivedP>& precision,
    typename DerivedP::Scalar noise_var, RngStream& rng) {
  using Scalar = typename DerivedP::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (precision.rows() != precision.cols() || precision.rows() != linear_term.size()) {
    throw UsageError("sample_mvn_precision: dimension mismatch");
  }
  if (!(noise_var > 0)) throw ParameterDomainError("sample_mvn_precision: noise_var must be positive");

  Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("sample_mvn_precision: precision matrix is not positive definite");
  }
  Vector mean = llt.solve(linear_term);
  Vector z(linear_term.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = static_cast<Scalar>(rng.normal());
  // L^T x = z gives x ~ N(0, P^{-1}).
  Vector noise = llt.matrixU().solve(z);
  Vector draw = mean + std::sqrt(noise_var) * noise;
  if (!draw.allFinite()) throw NumericalError("sample_mvn_precision: non-finite draw");
  return draw;
}

}  // namespace gdss
