#ifndef REPHSIM_SU2_HPP
#define REPHSIM_SU2_HPP

#include <complex>

#include <Eigen/Dense>

namespace rephsim {

using Complex = std::complex<double>;
using Gate = Eigen::Matrix2cd;     // propagator on the |1>,|2> subspace
using Density = Eigen::Matrix2cd;  // hermitian, unit trace
using Bloch = Eigen::Vector3d;     // (2 Re rho12, 2 Im rho12, rho11 - rho22)

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Tolerances used across the library: algebraic identities are held to
// algebra_tol, numeric inputs are validated at validation_tol.
inline constexpr double algebra_tol = 1e-12;
inline constexpr double validation_tol = 1e-9;

// Three-real-parameter description of an SU(2) gate:
//   u11 = sqrt(1-p) e^{i alpha},  u12 = sqrt(p) e^{i beta}.
// alpha is a gauge choice when p = 1, beta when p = 0 (both set to 0 then).
struct PulseAngles {
  double p;
  double alpha;
  double beta;
};

// Reduce an angle to (-pi, pi].
double wrap_angle(double a);

double unitarity_residual(const Gate& u);  // max |(U U^dag - I)_ij|
double su2_residual(const Gate& u);        // deviation from the SU(2) form

// [[sqrt(1-p) e^{i a}, sqrt(p) e^{i(b+phi)}], [-sqrt(p) e^{-i(b+phi)}, sqrt(1-p) e^{-i a}]]
// The pulse phase phi enters only through the off-diagonal phase b+phi;
// equivalently U(phi) = Z(phi) U(0) Z(-phi) with Z(phi) = diag(e^{i phi/2}, e^{-i phi/2}).
Gate gate_from_angles(double p, double alpha, double beta, double phi = 0.0);

// Inverse of gate_from_angles at phi = 0; input must be unitary within
// validation_tol.
PulseAngles extract_angles(const Gate& u);

// Sequence-ordered product: compose(later, earlier) = later * earlier.
Gate compose(const Gate& later, const Gate& earlier);

// rho -> U rho U^dag
Density apply_gate(const Gate& u, const Density& rho);

Bloch bloch_vector(const Density& rho);
Density density_from_bloch(const Bloch& v);

// rho12 = e^{i xi0}/2 with equal populations (state after an ideal pi/2 write).
Density density_max_coherence(double xi0);

// Pure state with the given coherence and the larger population in |1>
// (weak-probe branch); |rho12| <= 1/2 required.
Density density_pure_ground_coherence(Complex rho12);

// Throws std::invalid_argument on trace/positivity violations.
void check_density(const Density& rho);

}  // namespace rephsim

#endif
