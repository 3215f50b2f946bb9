#include "rephsim/sequences.hpp"

#include <cmath>
#include <stdexcept>

namespace rephsim {

namespace {

struct ConstantSegment {
  double duration;
  double rabi;
  double detuning_offset;  // pulse's own detuning (atom detuning added later)
  double phase;
};

// Flatten one cycle of the sequence into piecewise-constant segments plus
// possible instantaneous gates (idealised resonant pulses).
struct TimelineStep {
  bool instantaneous = false;
  Gate kick = Gate::Identity();  // applied when instantaneous
  ConstantSegment segment{};     // otherwise
};

void append_pulse_steps(std::vector<TimelineStep>& steps, const PulseSpec& pulse, double phase,
                        double rabi_factor) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ResonantPulse>) {
          TimelineStep s;
          s.instantaneous = true;
          s.kick = propagator_resonant(p.area * rabi_factor, phase);
          steps.push_back(s);
        } else if constexpr (std::is_same_v<T, RectangularPulse>) {
          steps.push_back({false, Gate::Identity(), {p.duration, p.rabi * rabi_factor, p.detuning, phase}});
        } else if constexpr (std::is_same_v<T, SampledPulse>) {
          for (Eigen::Index k = 0; k < p.rabi.size(); ++k)
            steps.push_back(
                {false, Gate::Identity(), {p.dt, p.rabi[k] * rabi_factor, p.detuning[k], phase}});
        } else {
          // Chirped pulse rendered onto a fine sample grid.
          const int n = 2048;
          const double dt = 2.0 * p.t_final / n;
          for (int k = 0; k < n; ++k) {
            const double t = -p.t_final + (k + 0.5) * dt;
            steps.push_back({false,
                             Gate::Identity(),
                             {dt, rabi_factor * p.peak_rabi / std::cosh(t / p.width),
                              p.static_detuning + p.chirp * std::tanh(t / p.width), phase}});
          }
        }
      },
      pulse);
}

}  // namespace

const char* sequence_name(NamedSequence s) {
  switch (s) {
    case NamedSequence::Hahn: return "hahn";
    case NamedSequence::Cpmg: return "cpmg";
    case NamedSequence::Cpmg2: return "cpmg2";
    case NamedSequence::Xy4: return "xy4";
    case NamedSequence::Ur4: return "ur4";
    case NamedSequence::Ur6: return "ur6";
    case NamedSequence::Xy8: return "xy8";
    case NamedSequence::Ur8: return "ur8";
    case NamedSequence::U5a2: return "u5a2";
    case NamedSequence::Kdd2: return "kdd2";
    case NamedSequence::Ur10: return "ur10";
  }
  return "?";
}

NamedSequence sequence_from_name(std::string_view name) {
  for (NamedSequence s :
       {NamedSequence::Hahn, NamedSequence::Cpmg, NamedSequence::Cpmg2, NamedSequence::Xy4,
        NamedSequence::Ur4, NamedSequence::Ur6, NamedSequence::Xy8, NamedSequence::Ur8,
        NamedSequence::U5a2, NamedSequence::Kdd2, NamedSequence::Ur10})
    if (name == sequence_name(s)) return s;
  throw std::invalid_argument("unknown sequence name: " + std::string(name));
}

std::vector<double> sequence_phases(NamedSequence s, double phi2) {
  auto scaled = [](std::initializer_list<int> ks, double unit) {
    std::vector<double> out;
    for (int k : ks) out.push_back(k * unit);
    return out;
  };
  switch (s) {
    case NamedSequence::Hahn: return {0.0};
    case NamedSequence::Cpmg: return {0.0, phi2};
    case NamedSequence::Cpmg2: return {0.0, pi};
    case NamedSequence::Xy4: return scaled({0, 1, 0, 1}, pi / 2);
    case NamedSequence::Ur4: return scaled({0, 1, 1, 0}, pi);
    case NamedSequence::Ur6: return scaled({0, 2, 0, 0, 2, 0}, pi / 3);
    case NamedSequence::Xy8: return scaled({0, 1, 0, 1, 1, 0, 1, 0}, pi / 2);
    case NamedSequence::Ur8: return scaled({0, 1, 3, 2, 2, 3, 1, 0}, pi / 2);
    case NamedSequence::U5a2: return scaled({0, 5, 2, 5, 0, 0, 5, 2, 5, 0}, pi / 6);
    case NamedSequence::Kdd2: return scaled({1, 0, 3, 0, 1, 1, 0, 3, 0, 1}, pi / 6);
    case NamedSequence::Ur10: return scaled({0, 4, 2, 4, 0, 0, 4, 2, 4, 0}, pi / 5);
  }
  throw std::invalid_argument("sequence_phases: bad sequence");
}

SequenceSpec make_sequence(NamedSequence s, const PulseSpec& pulse, double gap, int repetitions,
                           double phi2) {
  if (repetitions < 1) throw std::invalid_argument("make_sequence: repetitions < 1");
  if (gap < 0.0) throw std::invalid_argument("make_sequence: negative gap");
  SequenceSpec seq;
  seq.gap = gap;
  seq.repetitions = repetitions;
  for (double phase : sequence_phases(s, phi2)) seq.elements.push_back({pulse, phase});
  return seq;
}

Gate free_evolution(double detuning, double time) {
  Gate f;
  f << std::polar(1.0, 0.5 * detuning * time), 0.0, 0.0, std::polar(1.0, -0.5 * detuning * time);
  return f;
}

Gate cycle_propagator(const PulseAngles& angles, double phi, double detuning, double tau) {
  return gate_from_angles(angles.p, angles.alpha + 0.5 * detuning * tau, angles.beta, phi);
}

Gate cycle_propagator(const Gate& pulse_gate, double detuning, double tau) {
  const Gate f = free_evolution(detuning, 0.5 * tau);
  return f * pulse_gate * f;
}

Gate sequence_propagator(const SequenceSpec& seq, double detuning, double rabi_factor) {
  if (seq.elements.empty()) throw std::invalid_argument("sequence_propagator: empty sequence");
  Gate block = Gate::Identity();
  for (const SequenceElement& el : seq.elements) {
    const PulseSpec pulse = rabi_factor == 1.0 ? el.pulse : scale_rabi(el.pulse, rabi_factor);
    const Gate g = propagator_analytic(pulse, el.phase, detuning);
    block = cycle_propagator(g, detuning, seq.gap) * block;
  }
  Gate total = Gate::Identity();
  for (int r = 0; r < seq.repetitions; ++r) total = block * total;
  return total;
}

std::vector<TrajectoryPoint> propagate_timeline(const SequenceSpec& seq, double detuning,
                                                const Density& rho0, double sample_dt,
                                                double rabi_factor) {
  if (!(sample_dt > 0.0)) throw std::invalid_argument("propagate_timeline: sample_dt <= 0");
  std::vector<TimelineStep> steps;
  for (int r = 0; r < seq.repetitions; ++r) {
    for (const SequenceElement& el : seq.elements) {
      steps.push_back({false, Gate::Identity(), {0.5 * seq.gap, 0.0, 0.0, 0.0}});
      append_pulse_steps(steps, el.pulse, el.phase, rabi_factor);
      steps.push_back({false, Gate::Identity(), {0.5 * seq.gap, 0.0, 0.0, 0.0}});
    }
  }
  std::vector<TrajectoryPoint> out;
  Gate u = Gate::Identity();
  double t = 0.0;
  out.push_back({0.0, apply_gate(u, rho0)});
  double next_sample = sample_dt;
  for (const TimelineStep& s : steps) {
    if (s.instantaneous) {
      u = s.kick * u;
      continue;
    }
    double remaining = s.segment.duration;
    while (remaining > 0.0 && next_sample <= t + remaining + 1e-18) {
      const double slice = next_sample - t;
      u = propagator_rectangular(s.segment.rabi, s.segment.detuning_offset + detuning, slice,
                                 s.segment.phase) *
          u;
      t = next_sample;
      remaining -= slice;
      out.push_back({t, apply_gate(u, rho0)});
      next_sample += sample_dt;
    }
    if (remaining > 0.0) {
      u = propagator_rectangular(s.segment.rabi, s.segment.detuning_offset + detuning, remaining,
                                 s.segment.phase) *
          u;
      t += remaining;
    }
  }
  // the endpoint always reflects the full sequence, including trailing kicks
  if (!out.empty() && out.back().t >= t - 1e-18)
    out.back() = {t, apply_gate(u, rho0)};
  else
    out.push_back({t, apply_gate(u, rho0)});
  return out;
}

}  // namespace rephsim
