#ifndef REPHSIM_SEQUENCES_HPP
#define REPHSIM_SEQUENCES_HPP

#include <string>
#include <string_view>
#include <vector>

#include "rephsim/pulses.hpp"

namespace rephsim {

struct SequenceElement {
  PulseSpec pulse;
  double phase;  // rad
};

// Each element is embedded in a [gap/2 - pulse - gap/2] cycle; the element
// list is applied repetitions times in order.
struct SequenceSpec {
  std::vector<SequenceElement> elements;
  double gap = 0.0;  // s, equal pulse separation
  int repetitions = 1;

  int pulse_count() const { return static_cast<int>(elements.size()) * repetitions; }
};

enum class NamedSequence { Hahn, Cpmg, Cpmg2, Xy4, Ur4, Ur6, Xy8, Ur8, U5a2, Kdd2, Ur10 };

const char* sequence_name(NamedSequence s);
NamedSequence sequence_from_name(std::string_view name);  // throws std::invalid_argument

// Catalogued phase lists; phi2 applies to Cpmg only (Cpmg2 pins phi2 = pi).
std::vector<double> sequence_phases(NamedSequence s, double phi2 = 0.0);

SequenceSpec make_sequence(NamedSequence s, const PulseSpec& pulse, double gap, int repetitions,
                           double phi2 = 0.0);

// diag(e^{+i Delta t / 2}, e^{-i Delta t / 2}): coherence rotates as e^{i Delta t}.
Gate free_evolution(double detuning, double time);

// [gap/2 - pulse - gap/2] for one atom: same p and off-diagonal phase as the
// pulse gate, alpha replaced by the accumulated phase alpha + Delta*tau/2.
Gate cycle_propagator(const PulseAngles& angles, double phi, double detuning, double tau);
Gate cycle_propagator(const Gate& pulse_gate, double detuning, double tau);

// Ordered product of cycle propagators over the whole sequence.
Gate sequence_propagator(const SequenceSpec& seq, double detuning, double rabi_factor = 1.0);

// Time-resolved propagation through the sequence timeline for one atom
// (pulses realised as piecewise-constant segments, so sampling is exact).
struct TrajectoryPoint {
  double t;
  Density rho;
};
std::vector<TrajectoryPoint> propagate_timeline(const SequenceSpec& seq, double detuning,
                                                const Density& rho0, double sample_dt,
                                                double rabi_factor = 1.0);

}  // namespace rephsim

#endif
