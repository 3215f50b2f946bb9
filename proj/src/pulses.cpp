#include "rephsim/pulses.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rephsim/gamma.hpp"

namespace rephsim {

namespace {

constexpr int default_substeps = 4096;
constexpr double rk4_convergence_tol = 1e-8;

Gate su2_from_entries(Complex u11, Complex u12) {
  Gate u;
  u << u11, u12, -std::conj(u12), std::conj(u11);
  return u;
}

// One RK4 pass of i dU/dt = H(t) U over [t0, t1].
template <typename HamFn>
Gate rk4_pass(const HamFn& ham, double t0, double t1, long steps) {
  const Complex mi(0.0, -1.0);
  const double h = (t1 - t0) / static_cast<double>(steps);
  Gate u = Gate::Identity();
  double t = t0;
  for (long i = 0; i < steps; ++i) {
    const Gate k1 = mi * (ham(t) * u);
    const Gate k2 = mi * (ham(t + 0.5 * h) * (u + 0.5 * h * k1));
    const Gate k3 = mi * (ham(t + 0.5 * h) * (u + 0.5 * h * k2));
    const Gate k4 = mi * (ham(t + h) * (u + h * k3));
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + (i + 1) * h;
  }
  return u;
}

template <typename HamFn>
Gate rk4_converged(const HamFn& ham, double t0, double t1, long steps, const char* what) {
  const Gate coarse = rk4_pass(ham, t0, t1, steps);
  const Gate fine = rk4_pass(ham, t0, t1, 2 * steps);
  const double diff = (coarse - fine).cwiseAbs().maxCoeff();
  if (!(diff < rk4_convergence_tol)) {
    std::ostringstream msg;
    msg << "propagator_numeric: step halving changed the " << what << " propagator by " << diff
        << " (tolerance " << rk4_convergence_tol << ", " << steps << " steps); reduce dt";
    throw std::runtime_error(msg.str());
  }
  return fine;
}

}  // namespace

Gate propagator_resonant(double area, double phi) {
  if (area < -validation_tol) throw std::domain_error("propagator_resonant: negative area");
  const double c = std::cos(0.5 * area);
  const double s = std::sin(0.5 * area);
  return su2_from_entries(Complex(c, 0.0), Complex(0.0, -s) * std::polar(1.0, phi));
}

Gate propagator_rectangular(double rabi, double detuning, double duration, double phi) {
  if (duration < 0.0) throw std::domain_error("propagator_rectangular: negative duration");
  const double w = std::hypot(rabi, detuning);
  if (w * duration == 0.0) return Gate::Identity();
  const double a_eff = w * duration;
  const double c = std::cos(0.5 * a_eff);
  const double s = std::sin(0.5 * a_eff);
  // u11 = cos(A/2) + i sin(A/2) Delta/W,  u12 = -i sin(A/2) (Omega/W) e^{i phi}
  const Complex u11(c, s * detuning / w);
  const Complex u12 = Complex(0.0, -s * rabi / w) * std::polar(1.0, phi);
  return su2_from_entries(u11, u12);
}

Gate propagator_demkov_kunike(const DemkovKunikePulse& pulse, double phi) {
  if (pulse.width <= 0.0) throw std::domain_error("propagator_demkov_kunike: width <= 0");
  if (pulse.t_final < 5.0 * pulse.width)
    throw std::domain_error("propagator_demkov_kunike: t_final < 5*width (envelope not saturated)");
  const double at = 0.5 * pulse.peak_rabi * pulse.width;
  const double bt = 0.5 * pulse.chirp * pulse.width;
  const double dt = 0.5 * pulse.static_detuning * pulse.width;
  const Complex i(0.0, 1.0);
  const Complex root = std::sqrt(Complex(at * at - bt * bt, 0.0));
  const Complex lambda = root - i * bt;
  const Complex mu = -root - i * bt;
  const Complex nu = 0.5 + i * (dt - bt);
  const Complex g_top = complex_gamma(nu - lambda - mu);
  // Poles of the denominators are exactly the full-inversion / full-return
  // points; the reciprocal form evaluates them cleanly.
  const Complex u11 = std::polar(1.0, pulse.static_detuning * pulse.t_final) *
                      complex_gamma(nu) * g_top * reciprocal_gamma(nu - lambda) *
                      reciprocal_gamma(nu - mu);
  const Complex u12 = (-i * at / (1.0 - nu)) * std::polar(1.0, pulse.chirp * pulse.t_final) *
                      complex_gamma(2.0 - nu) * g_top * reciprocal_gamma(1.0 - lambda) *
                      reciprocal_gamma(1.0 - mu);
  Gate u = su2_from_entries(u11, u12 * std::polar(1.0, phi));
  if (unitarity_residual(u) > validation_tol)
    throw std::runtime_error("propagator_demkov_kunike: propagator not unitary (pole-adjacent parameters?)");
  return u;
}

Gate propagator_sampled(const SampledPulse& pulse, double phi, double extra_detuning) {
  if (pulse.dt <= 0.0) throw std::domain_error("propagator_sampled: dt <= 0");
  if (pulse.rabi.size() != pulse.detuning.size() || pulse.rabi.size() == 0)
    throw std::invalid_argument("propagator_sampled: sample arrays empty or mismatched");
  Gate u = Gate::Identity();
  for (Eigen::Index k = 0; k < pulse.rabi.size(); ++k)
    u = propagator_rectangular(pulse.rabi[k], pulse.detuning[k] + extra_detuning, pulse.dt, phi) * u;
  return u;
}

Gate propagator_analytic(const PulseSpec& pulse, double phi, double extra_detuning) {
  return std::visit(
      [&](const auto& p) -> Gate {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ResonantPulse>) {
          return propagator_resonant(p.area, phi);
        } else if constexpr (std::is_same_v<T, RectangularPulse>) {
          return propagator_rectangular(p.rabi, p.detuning + extra_detuning, p.duration, phi);
        } else if constexpr (std::is_same_v<T, DemkovKunikePulse>) {
          DemkovKunikePulse shifted = p;
          shifted.static_detuning += extra_detuning;
          return propagator_demkov_kunike(shifted, phi);
        } else {
          return propagator_sampled(p, phi, extra_detuning);
        }
      },
      pulse);
}

Gate propagator_numeric(const PulseSpec& pulse, double phi, double extra_detuning, double dt) {
  return std::visit(
      [&](const auto& p) -> Gate {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ResonantPulse>) {
          // Unit-duration rectangular realisation of the area pulse.
          const double rabi = p.area;
          const Complex drive = 0.5 * rabi * std::polar(1.0, phi);
          const long steps = dt > 0.0 ? std::max<long>(8, std::lround(1.0 / dt)) : default_substeps;
          auto ham = [&, drive](double) {
            Gate h;
            h << Complex(-0.5 * extra_detuning, 0.0), drive, std::conj(drive),
                Complex(0.5 * extra_detuning, 0.0);
            return h;
          };
          return rk4_converged(ham, 0.0, 1.0, steps, "resonant");
        } else if constexpr (std::is_same_v<T, RectangularPulse>) {
          const double det = p.detuning + extra_detuning;
          const Complex drive = 0.5 * p.rabi * std::polar(1.0, phi);
          const long steps =
              dt > 0.0 ? std::max<long>(8, std::lround(p.duration / dt)) : default_substeps;
          auto ham = [&, drive](double) {
            Gate h;
            h << Complex(-0.5 * det, 0.0), drive, std::conj(drive), Complex(0.5 * det, 0.0);
            return h;
          };
          return rk4_converged(ham, 0.0, p.duration, steps, "rectangular");
        } else if constexpr (std::is_same_v<T, DemkovKunikePulse>) {
          if (p.width <= 0.0 || p.t_final < 5.0 * p.width)
            throw std::domain_error("propagator_numeric: invalid chirped-pulse time scales");
          const double step = dt > 0.0 ? dt : p.width / default_substeps;
          const long steps = std::max<long>(8, std::lround(2.0 * p.t_final / step));
          const Complex unit_drive = std::polar(1.0, phi);
          auto ham = [&, unit_drive](double t) {
            const double rabi = p.peak_rabi / std::cosh(t / p.width);
            const double det = p.static_detuning + p.chirp * std::tanh(t / p.width) + extra_detuning;
            const Complex drive = 0.5 * rabi * unit_drive;
            Gate h;
            h << Complex(-0.5 * det, 0.0), drive, std::conj(drive), Complex(0.5 * det, 0.0);
            return h;
          };
          return rk4_converged(ham, -p.t_final, p.t_final, steps, "chirped");
        } else {
          return propagator_sampled(p, phi, extra_detuning);
        }
      },
      pulse);
}

PulseSpec scale_rabi(PulseSpec pulse, double factor) {
  if (!(factor > 0.0)) throw std::domain_error("scale_rabi: factor must be positive");
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ResonantPulse>) {
          p.area *= factor;
        } else if constexpr (std::is_same_v<T, RectangularPulse>) {
          p.rabi *= factor;
        } else if constexpr (std::is_same_v<T, DemkovKunikePulse>) {
          p.peak_rabi *= factor;
        } else {
          p.rabi *= factor;
        }
      },
      pulse);
  return pulse;
}

double pulse_duration(const PulseSpec& pulse) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ResonantPulse>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, RectangularPulse>) {
          return p.duration;
        } else if constexpr (std::is_same_v<T, DemkovKunikePulse>) {
          return 2.0 * p.t_final;
        } else {
          return p.dt * static_cast<double>(p.rabi.size());
        }
      },
      pulse);
}

}  // namespace rephsim
