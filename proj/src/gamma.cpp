#include "rephsim/gamma.hpp"

#include <cmath>
#include <stdexcept>

namespace rephsim {

namespace {

constexpr double lanczos_g = 607.0 / 128.0;

constexpr double lanczos_coeff[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

// Valid for Re z >= 1/2.
Complex lanczos_gamma(Complex z) {
  Complex sum(lanczos_coeff[0], 0.0);
  for (int k = 1; k < 15; ++k) sum += lanczos_coeff[k] / (z - 1.0 + static_cast<double>(k));
  const Complex t = z + (lanczos_g - 0.5);
  return std::sqrt(2.0 * pi) * std::exp((z - 0.5) * std::log(t) - t) * sum;
}

}  // namespace

Complex complex_gamma(Complex z) {
  if (z.real() < 0.5) {
    const double nearest = std::round(z.real());
    if (nearest <= 0.0 && std::abs(z - Complex(nearest, 0.0)) < 1e-12)
      throw std::domain_error("complex_gamma: argument at a nonpositive-integer pole");
    // reflection: Gamma(z) = pi / (sin(pi z) Gamma(1-z))
    return pi / (std::sin(pi * z) * lanczos_gamma(1.0 - z));
  }
  return lanczos_gamma(z);
}

Complex reciprocal_gamma(Complex z) {
  if (z.real() < 0.5) return std::sin(pi * z) * lanczos_gamma(1.0 - z) / pi;
  return 1.0 / lanczos_gamma(z);
}

}  // namespace rephsim
