#ifndef REPHSIM_PULSES_HPP
#define REPHSIM_PULSES_HPP

#include <variant>

#include "rephsim/su2.hpp"

namespace rephsim {

// Idealised area pulse: detuning-immune, zero duration. p = sin^2(A/2).
struct ResonantPulse {
  double area;  // rad
};

// Constant Rabi frequency and detuning over [0, duration].
struct RectangularPulse {
  double rabi;      // rad/s
  double detuning;  // rad/s
  double duration;  // s
};

// Sech envelope with tanh chirp:
//   Omega(t) = peak_rabi * sech(t/width)
//   Delta(t) = static_detuning + chirp * tanh(t/width),  t in [-t_final, t_final].
struct DemkovKunikePulse {
  double peak_rabi;        // rad/s
  double chirp;            // rad/s
  double static_detuning;  // rad/s
  double width;            // s
  double t_final;          // s, must be >= 5*width
};

// Piecewise-constant samples on a uniform time grid.
struct SampledPulse {
  Eigen::VectorXd rabi;      // rad/s per sample
  Eigen::VectorXd detuning;  // rad/s per sample
  double dt;                 // s
};

using PulseSpec = std::variant<ResonantPulse, RectangularPulse, DemkovKunikePulse, SampledPulse>;

Gate propagator_resonant(double area, double phi);
Gate propagator_rectangular(double rabi, double detuning, double duration, double phi);
Gate propagator_demkov_kunike(const DemkovKunikePulse& pulse, double phi);

// Exact product of per-sample propagators (piecewise-constant Hamiltonian);
// doubles as an oracle path independent of the RK4 integrator.
Gate propagator_sampled(const SampledPulse& pulse, double phi, double extra_detuning = 0.0);

// Closed-form propagator for the pulse family, with the atom's detuning
// added where the family supports it (ResonantPulse ignores it: the pulse
// is defined as detuning-immune).
Gate propagator_analytic(const PulseSpec& pulse, double phi, double extra_detuning = 0.0);

// Fixed-step RK4 on i dU/dt = H(t) U with
//   H = 0.5 [[-(Delta(t)+extra), Omega(t) e^{i phi}], [Omega(t) e^{-i phi}, Delta(t)+extra]].
// Integrates at dt and dt/2 and fails if the two disagree beyond 1e-8
// (unitarity is not re-projected; drift is the error signal). dt = 0 picks
// the default step, width/4096 of the relevant time scale. SampledPulse is
// delegated to the exact piecewise product.
Gate propagator_numeric(const PulseSpec& pulse, double phi, double extra_detuning = 0.0,
                        double dt = 0.0);

// Multiply the Rabi frequency (field amplitude) by a positive factor.
PulseSpec scale_rabi(PulseSpec pulse, double factor);

// Time the pulse occupies in a sequence (0 for the idealised resonant pulse).
double pulse_duration(const PulseSpec& pulse);

}  // namespace rephsim

#endif
