#include "rephsim/su2.hpp"

#include <cmath>
#include <stdexcept>

namespace rephsim {

namespace {
// Below this the complementary amplitude carries no usable phase.
constexpr double gauge_cut = 1e-14;
}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a + pi, 2.0 * pi);
  if (a <= 0.0) a += 2.0 * pi;
  return a - pi;
}

double unitarity_residual(const Gate& u) {
  return (u * u.adjoint() - Gate::Identity()).cwiseAbs().maxCoeff();
}

double su2_residual(const Gate& u) {
  const double d1 = std::abs(u(1, 1) - std::conj(u(0, 0)));
  const double d2 = std::abs(u(1, 0) + std::conj(u(0, 1)));
  return std::max(d1, d2);
}

Gate gate_from_angles(double p, double alpha, double beta, double phi) {
  if (p < -validation_tol || p > 1.0 + validation_tol)
    throw std::domain_error("gate_from_angles: transition probability outside [0,1]");
  p = std::clamp(p, 0.0, 1.0);
  const double sp = std::sqrt(p);
  const double se = std::sqrt(1.0 - p);
  const Complex u11 = se * std::polar(1.0, alpha);
  const Complex u12 = sp * std::polar(1.0, beta + phi);
  Gate u;
  u << u11, u12, -std::conj(u12), std::conj(u11);
  return u;
}

PulseAngles extract_angles(const Gate& u) {
  if (unitarity_residual(u) > validation_tol)
    throw std::invalid_argument("extract_angles: input is not unitary");
  PulseAngles a;
  a.p = std::min(1.0, std::norm(u(0, 1)));
  a.alpha = (1.0 - a.p < gauge_cut) ? 0.0 : std::arg(u(0, 0));
  a.beta = (a.p < gauge_cut) ? 0.0 : std::arg(u(0, 1));
  return a;
}

Gate compose(const Gate& later, const Gate& earlier) { return later * earlier; }

Density apply_gate(const Gate& u, const Density& rho) { return u * rho * u.adjoint(); }

Bloch bloch_vector(const Density& rho) {
  return Bloch(2.0 * rho(0, 1).real(), 2.0 * rho(0, 1).imag(),
               rho(0, 0).real() - rho(1, 1).real());
}

Density density_from_bloch(const Bloch& v) {
  Density rho;
  const Complex r12(0.5 * v.x(), 0.5 * v.y());
  rho << 0.5 * (1.0 + v.z()), r12, std::conj(r12), 0.5 * (1.0 - v.z());
  return rho;
}

Density density_max_coherence(double xi0) {
  Density rho;
  const Complex r12 = 0.5 * std::polar(1.0, xi0);
  rho << 0.5, r12, std::conj(r12), 0.5;
  return rho;
}

Density density_pure_ground_coherence(Complex rho12) {
  const double r = std::abs(rho12);
  if (r > 0.5 + validation_tol)
    throw std::domain_error("density_pure_ground_coherence: |rho12| > 1/2");
  const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * r * r));
  Density rho;
  rho << 0.5 * (1.0 + disc), rho12, std::conj(rho12), 0.5 * (1.0 - disc);
  return rho;
}

void check_density(const Density& rho) {
  const double p1 = rho(0, 0).real();
  const double p2 = rho(1, 1).real();
  if (std::abs(rho(0, 0).imag()) > algebra_tol || std::abs(rho(1, 1).imag()) > algebra_tol)
    throw std::invalid_argument("check_density: complex populations");
  if (std::abs(p1 + p2 - 1.0) > algebra_tol)
    throw std::invalid_argument("check_density: trace != 1");
  if (p1 < -algebra_tol || p2 < -algebra_tol)
    throw std::invalid_argument("check_density: negative population");
  if (std::abs(rho(1, 0) - std::conj(rho(0, 1))) > algebra_tol)
    throw std::invalid_argument("check_density: not hermitian");
  if (std::norm(rho(0, 1)) > p1 * p2 + algebra_tol)
    throw std::invalid_argument("check_density: positivity violated");
}

}  // namespace rephsim
