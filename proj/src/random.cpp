#include "gdss/random.hpp"

#include <cmath>
#include <numbers>

namespace gdss {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53 random bits, shifted by half an ulp so the result is never 0 or 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0) || !(scale > 0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw ParameterDomainError("sample_inverse_gamma: shape and scale must be positive and finite");
  }
  return scale / rng.gamma(shape);
}

double sample_inverse_gaussian(double mean, double shape, RngStream& rng) {
  if (!(mean > 0) || !(shape > 0) || !std::isfinite(mean) || !std::isfinite(shape)) {
    throw ParameterDomainError("sample_inverse_gaussian: mean and shape must be positive and finite");
  }
  const double nu = rng.normal();
  const double w = mean * nu * nu;
  // x = mean + mean/(2 shape) * (w - sqrt(w^2 + 4 shape w)) rewritten without cancellation.
  const double x = mean - 2.0 * mean * w / (w + std::sqrt(w * w + 4.0 * shape * w));
  if (rng.uniform() * (mean + x) <= mean) return x;
  return mean * mean / x;
}

namespace {

// Mode of the standardised density x^{lambda-1} exp(-omega (x + 1/x) / 2).
double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0) return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

double gig_rou_noshift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

double gig_rou_shift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);

  // Roots of the cubic bounding the shifted region (Cardano, trigonometric form).
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = (2.0 * (lambda - 1.0) * xm / omega - 1.0);
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);

  for (;;) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Rejection from a three-piece hat; valid for 0 <= lambda < 1 and 0 < omega <= 1.
double gig_concave_corner(double lambda, double omega, RngStream& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  double area[3];
  double k1 = 0.0;
  double k2 = 0.0;
  area[0] = k0 * x0;
  if (x0 >= 2.0 / omega) {
    area[1] = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    area[1] = (lambda == 0.0) ? k1 * std::log(2.0 / (omega * omega))
                              : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = area[0] + area[1] + area[2];

  for (;;) {
    double v = total * rng.uniform();
    double x = 0.0;
    double hx = 0.0;
    if (v <= area[0]) {
      x = x0 * v / area[0];
      hx = k0;
    } else if ((v -= area[0]) <= area[1]) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + (lambda / k1 * v), 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= area[1];
      const double lo = (x0 > 2.0 / omega) ? x0 : 2.0 / omega;
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * lo) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

}  // namespace

double sample_gig(double chi, double psi, double order, RngStream& rng) {
  if (!std::isfinite(chi) || !std::isfinite(psi) || !std::isfinite(order) || chi < 0 || psi < 0) {
    throw ParameterDomainError("sample_gig: chi and psi must be finite and nonnegative");
  }
  if (chi == 0.0) {
    if (!(psi > 0 && order > 0)) throw ParameterDomainError("sample_gig: chi = 0 requires psi > 0 and order > 0");
    return rng.gamma(order) * 2.0 / psi;
  }
  if (psi == 0.0) {
    if (!(order < 0)) throw ParameterDomainError("sample_gig: psi = 0 requires order < 0");
    return sample_inverse_gamma(-order, chi / 2.0, rng);
  }

  // Standardise to x^{lambda-1} exp(-omega (x + 1/x) / 2), scale by alpha.
  const double alpha = std::sqrt(chi / psi);
  const double omega = std::sqrt(chi * psi);
  const double lambda = std::abs(order);

  double x = 0.0;
  if (lambda > 2.0 || omega > 3.0) {
    x = gig_rou_shift(lambda, omega, rng);
  } else if (lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    x = gig_rou_noshift(lambda, omega, rng);
  } else {
    x = gig_concave_corner(lambda, omega, rng);
  }
  // GIG(-lambda) is the reciprocal of GIG(lambda) in the standardised form.
  return order < 0 ? alpha / x : alpha * x;
}

}  // namespace gdss
