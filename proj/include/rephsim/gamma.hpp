#ifndef REPHSIM_GAMMA_HPP
#define REPHSIM_GAMMA_HPP

#include "rephsim/su2.hpp"

namespace rephsim {

// Gamma function of a complex argument, Lanczos approximation with the
// standard 15-coefficient g = 607/128 set plus reflection for Re z < 1/2.
// Relative accuracy better than 1e-10 on Re z in [-20, 20], |Im z| <= 50.
// Throws std::domain_error within 1e-12 of a nonpositive-integer pole.
Complex complex_gamma(Complex z);

// 1/Gamma(z). Entire: evaluates to ~0 at the poles of Gamma instead of
// failing, which is what the chirped-pulse propagator needs at its exact
// full-inversion points.
Complex reciprocal_gamma(Complex z);

}  // namespace rephsim

#endif
