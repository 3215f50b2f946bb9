#ifndef REPHSIM_EFFICIENCY_HPP
#define REPHSIM_EFFICIENCY_HPP

#include <string>
#include <variant>

#include "rephsim/ensemble.hpp"
#include "rephsim/sequences.hpp"

namespace rephsim {

// Sampled spin-wave coherence on [0, length]; the stored phase profile right
// after the write step is xi(z,0) = -delta_k * z.
struct CoherenceField {
  Eigen::VectorXd z;        // ascending, spanning [0, length]
  Eigen::VectorXcd rho12;   // per node, |rho12| <= 1/2
  double delta_k = 0.0;     // rad/m
  double length = 0.0;      // m
};

enum class Method { Analytic, BruteForce, DephasedOracle };

struct EfficiencyResult {
  double value = 0.0;
  Method method = Method::Analytic;
  std::string label;
};

// Synthetic pulse with prescribed transition error; beta = -pi/2 matches
// resonant/rectangular pulses, alpha is irrelevant once gaps dephase.
struct FixedError {
  double epsilon = 0.1;
  double beta = -0.5 * pi;
  double alpha = 0.0;
};

// Evaluate each element's own pulse model per ensemble node (detuning and
// Rabi factor).
struct PulseError {};

using ErrorModel = std::variant<FixedError, PulseError>;

// How the per-cycle accumulated phase delta = alpha + Delta*tau/2 is treated.
// dephased_gaps=true realises the long-gap regime exactly: delta is averaged
// over a uniform grid on [0, 2pi), which cancels every e^{i m delta} cross
// term up to harmonic delta_points-1 (so delta_points must exceed twice the
// pulse count). dephased_gaps=false propagates the physical gaps of the
// sequence over the detuning grid.
struct BruteForceConfig {
  ErrorModel error = FixedError{};
  EnsembleGrid grid = EnsembleGrid::single();
  bool dephased_gaps = true;
  int delta_points = 256;
};

// Per-node transition errors (and u12 phases) with ensemble weights.
struct AngleSamples {
  Eigen::VectorXd eps;
  Eigen::VectorXd beta;
  Eigen::VectorXd w;

  static AngleSamples fixed(double eps, double beta = -0.5 * pi);
  static AngleSamples from_pulse(const PulseSpec& pulse, const EnsembleGrid& grid);
  double mean_eps() const;
  // <P(eps)> for polynomial coefficients c[0..n], exact sample average.
  double average_polynomial(const Eigen::VectorXd& coeffs) const;
};

// Action of the grid-and-gap-averaged rephasing map on the entries of the
// initial density matrix: <rho12(T)> = a*rho12 + b*rho21 + c*rho11 + d*rho22.
// This is the ensemble-averaged propagation itself, factored once over the
// grid because the map is linear in rho.
struct CoherenceChannel {
  Complex on_rho12{0.0, 0.0};
  Complex on_rho21{0.0, 0.0};
  Complex on_rho11{0.0, 0.0};
  Complex on_rho22{0.0, 0.0};
};

CoherenceChannel accumulate_channel(const SequenceSpec& seq, const BruteForceConfig& config);
Complex apply_channel(const CoherenceChannel& ch, const Density& rho0);

// ---- spin echo (coherence phase fixed relative to the pulse phases) ----

// |<rho12(T_st)>| / |rho12(0)| from an initial maximal coherence at phase xi0.
EfficiencyResult spin_echo_bruteforce(const SequenceSpec& seq, const BruteForceConfig& config,
                                      double xi0);

// |<(1-eps) e^{2 i beta}>|
EfficiencyResult spin_echo_hahn_analytic(const AngleSamples& samples);

// |<(1-eps)[1 + eps - 2 eps (1 + e^{-i(2 phi0 + phi2)})]>| for the two-pulse
// block with phi1 = 0.
EfficiencyResult spin_echo_cpmg_analytic(const AngleSamples& samples, double phi0, double phi2);
EfficiencyResult spin_echo_cpmg_analytic_first_moment(const AngleSamples& samples, double phi0,
                                                      double phi2);

// Large-N limits of the repeated two-pulse block: 0 on the xi0 = pi/2 + k pi
// branch, 1 - <eps>/sqrt(2) on xi0 = k pi. Other xi0 -> std::domain_error
// (use the brute force).
EfficiencyResult spin_echo_cpmg_repeated_asymptotic(const AngleSamples& samples, double xi0);

// ---- light storage (coherence phase spatially retarded) ----

// Real nonnegative envelope mapped onto rho12(z,0) = env(z) e^{-i delta_k z}
// on a uniform z grid over [0, length]. Requires >= 32 nodes per 2pi of
// phase winding.
CoherenceField eit_write(const Eigen::VectorXd& envelope, double delta_k, double length);
Eigen::VectorXd uniform_envelope(int n, double amplitude = 0.25);
Eigen::VectorXd gaussian_envelope(int n, double amplitude = 0.25, double width_fraction = 0.25);

// |int <rho12(z,T)> e^{i dk z} dz|^2 / |int rho12(z,0) e^{i dk z} dz|^2
// (trapezoidal in z).
EfficiencyResult eit_efficiency_general(const CoherenceField& out, const CoherenceField& in);

// |mean of r(xi0)|^2 for ratios r = <rho12(T)>/rho12(0) on a uniform xi0 grid.
EfficiencyResult eit_efficiency_phase_averaged(const Eigen::VectorXcd& ratios);

// <1-eps>^2 |(e^{2 i dkL} - 1)/(2 dkL)|^2; dkL = 0 returns the <1-eps>^2 limit.
EfficiencyResult eit_hahn_analytic(double mean_one_minus_eps, double delta_k_length);

// ---- closed-form catalogue (equal pulse separation, dephased gaps) ----

struct ThreePulsePattern {
  double phi2;  // [pi(0) - pi(phi2) - pi(0)]
};
struct DoubleCpmgPattern {
  double phi2;  // [pi(0) - pi(phi2)]^2
};
struct RepeatedCpmgPattern {};  // [pi(0) - pi(0)]^N, N -> infinity

using EitPattern = std::variant<NamedSequence, ThreePulsePattern, DoubleCpmgPattern, RepeatedCpmgPattern>;

// eta = <P(eps)>^2 (or the catalogued complex form squared). The exact-moment
// path averages the full polynomial over the samples; the first-moment path
// substitutes <eps> into it (a documented approximation).
EfficiencyResult eit_closed_form(const EitPattern& pattern, const AngleSamples& samples,
                                 bool first_moment = false);

// Polynomial P(eps) with eta = <P>^2 for the catalogued sequences. The
// 10-pulse u5a2/kdd2 entries carry exact coefficients through eps^10; the
// _truncated variants keep only terms through eps^5.
double sequence_efficiency_polynomial(NamedSequence s, double eps);
double sequence_efficiency_polynomial_truncated(NamedSequence s, double eps);
Eigen::VectorXd sequence_efficiency_coefficients(NamedSequence s);

// ---- brute-force light storage ----

// Propagates every z node through the grid/gap-averaged map and integrates
// per the general efficiency ratio.
EfficiencyResult eit_bruteforce(const SequenceSpec& seq, const BruteForceConfig& config,
                                const CoherenceField& in);

// Phase-distribution route: ratios on a uniform xi0 grid, then the squared
// mean. amplitude sets |rho12(0)|.
EfficiencyResult eit_bruteforce_phase_averaged(const SequenceSpec& seq,
                                               const BruteForceConfig& config, int xi_points,
                                               double amplitude = 0.25);

// Spatial profile <rho12(z, T_st)> before integration.
CoherenceField field_profile_after(const SequenceSpec& seq, const BruteForceConfig& config,
                                   const CoherenceField& in);

}  // namespace rephsim

#endif
