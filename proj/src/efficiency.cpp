#include "rephsim/efficiency.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rephsim {

namespace {

constexpr double sqrt3 = 1.7320508075688772935274463415058724;
constexpr double sqrt5 = 2.2360679774997896964091736687747634;

Eigen::VectorXd coeffs(std::initializer_list<double> c) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double x : c) v[i++] = x;
  return v;
}

double horner(const Eigen::VectorXd& c, double x) {
  double acc = 0.0;
  for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * x + c[k];
  return acc;
}

// Per-(node, rabi-factor) pulse angles for each sequence element.
struct NodeAngles {
  std::vector<PulseAngles> per_element;
};

std::vector<NodeAngles> element_angles(const SequenceSpec& seq, const BruteForceConfig& config) {
  const Eigen::Index n_det = config.grid.nodes.size();
  const Eigen::Index n_rabi = config.grid.rabi_factors.size();
  std::vector<NodeAngles> out(static_cast<size_t>(n_det * n_rabi));
  for (Eigen::Index i = 0; i < n_det; ++i) {
    for (Eigen::Index j = 0; j < n_rabi; ++j) {
      NodeAngles& node = out[static_cast<size_t>(i * n_rabi + j)];
      node.per_element.reserve(seq.elements.size());
      for (const SequenceElement& el : seq.elements) {
        if (const FixedError* fe = std::get_if<FixedError>(&config.error)) {
          node.per_element.push_back({1.0 - fe->epsilon, fe->alpha, fe->beta});
        } else {
          const PulseSpec scaled = config.grid.rabi_factors[j] == 1.0
                                       ? el.pulse
                                       : scale_rabi(el.pulse, config.grid.rabi_factors[j]);
          // phase 0 here: the element phase enters the cycle gate, not the angles
          node.per_element.push_back(
              extract_angles(propagator_analytic(scaled, 0.0, config.grid.nodes[i])));
        }
      }
    }
  }
  return out;
}

}  // namespace

AngleSamples AngleSamples::fixed(double eps, double beta) {
  AngleSamples s;
  s.eps = Eigen::VectorXd::Constant(1, eps);
  s.beta = Eigen::VectorXd::Constant(1, beta);
  s.w = Eigen::VectorXd::Ones(1);
  return s;
}

AngleSamples AngleSamples::from_pulse(const PulseSpec& pulse, const EnsembleGrid& grid) {
  const Eigen::Index n = grid.point_count();
  AngleSamples s;
  s.eps.resize(n);
  s.beta.resize(n);
  s.w.resize(n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < grid.nodes.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.rabi_factors.size(); ++j, ++idx) {
      const PulseSpec scaled =
          grid.rabi_factors[j] == 1.0 ? pulse : scale_rabi(pulse, grid.rabi_factors[j]);
      const PulseAngles a = extract_angles(propagator_analytic(scaled, 0.0, grid.nodes[i]));
      s.eps[idx] = 1.0 - a.p;
      s.beta[idx] = a.beta;
      s.w[idx] = grid.weights[i] * grid.rabi_weights[j];
    }
  }
  return s;
}

double AngleSamples::mean_eps() const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eps.size(); ++i) acc += w[i] * eps[i];
  return acc;
}

double AngleSamples::average_polynomial(const Eigen::VectorXd& coeffs_in) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eps.size(); ++i) acc += w[i] * horner(coeffs_in, eps[i]);
  return acc;
}

CoherenceChannel accumulate_channel(const SequenceSpec& seq, const BruteForceConfig& config) {
  if (seq.elements.empty()) throw std::invalid_argument("accumulate_channel: empty sequence");
  if (config.dephased_gaps) {
    const int max_harmonic = 2 * seq.pulse_count();
    if (config.delta_points <= max_harmonic) {
      std::ostringstream msg;
      msg << "accumulate_channel: delta_points (" << config.delta_points
          << ") must exceed twice the pulse count (" << max_harmonic << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  const std::vector<NodeAngles> angles = element_angles(seq, config);
  const Eigen::Index n_rabi = config.grid.rabi_factors.size();
  const int n_delta = config.dephased_gaps ? config.delta_points : 1;
  CoherenceChannel ch;
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < config.grid.nodes.size(); ++i) {
    for (Eigen::Index j = 0; j < n_rabi; ++j, ++idx) {
      const NodeAngles& node = angles[static_cast<size_t>(idx)];
      const double w = config.grid.weights[i] * config.grid.rabi_weights[j] / n_delta;
      for (int k = 0; k < n_delta; ++k) {
        Gate block = Gate::Identity();
        for (size_t e = 0; e < seq.elements.size(); ++e) {
          const PulseAngles& a = node.per_element[e];
          const double acc_phase = config.dephased_gaps
                                       ? 2.0 * pi * k / n_delta
                                       : a.alpha + 0.5 * config.grid.nodes[i] * seq.gap;
          block = gate_from_angles(a.p, acc_phase, a.beta, seq.elements[e].phase) * block;
        }
        Gate u = block;
        for (int r = 1; r < seq.repetitions; ++r) u = block * u;
        ch.on_rho12 += w * (u(0, 0) * std::conj(u(1, 1)));
        ch.on_rho21 += w * (u(0, 1) * std::conj(u(1, 0)));
        ch.on_rho11 += w * (u(0, 0) * std::conj(u(1, 0)));
        ch.on_rho22 += w * (u(0, 1) * std::conj(u(1, 1)));
      }
    }
  }
  return ch;
}

Complex apply_channel(const CoherenceChannel& ch, const Density& rho0) {
  return ch.on_rho12 * rho0(0, 1) + ch.on_rho21 * rho0(1, 0) + ch.on_rho11 * rho0(0, 0) +
         ch.on_rho22 * rho0(1, 1);
}

EfficiencyResult spin_echo_bruteforce(const SequenceSpec& seq, const BruteForceConfig& config,
                                      double xi0) {
  const CoherenceChannel ch = accumulate_channel(seq, config);
  const Complex out = apply_channel(ch, density_max_coherence(xi0));
  return {2.0 * std::abs(out), config.dephased_gaps ? Method::DephasedOracle : Method::BruteForce,
          "spin-echo brute force"};
}

EfficiencyResult spin_echo_hahn_analytic(const AngleSamples& samples) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < samples.eps.size(); ++i)
    acc += samples.w[i] * (1.0 - samples.eps[i]) * std::polar(1.0, 2.0 * samples.beta[i]);
  return {std::abs(acc), Method::Analytic, "hahn spin echo"};
}

EfficiencyResult spin_echo_cpmg_analytic(const AngleSamples& samples, double phi0, double phi2) {
  const Complex phase = std::polar(1.0, -(2.0 * phi0 + phi2));
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < samples.eps.size(); ++i) {
    const double e = samples.eps[i];
    acc += samples.w[i] * (1.0 - e) * (1.0 + e - 2.0 * e * (1.0 + phase));
  }
  return {std::abs(acc), Method::Analytic, "cpmg spin echo"};
}

EfficiencyResult spin_echo_cpmg_analytic_first_moment(const AngleSamples& samples, double phi0,
                                                      double phi2) {
  const double e = samples.mean_eps();
  const Complex phase = std::polar(1.0, -(2.0 * phi0 + phi2));
  const Complex val = (1.0 - e) * (1.0 + e - 2.0 * e * (1.0 + phase));
  return {std::abs(val), Method::Analytic, "cpmg spin echo (first-moment)"};
}

EfficiencyResult spin_echo_cpmg_repeated_asymptotic(const AngleSamples& samples, double xi0) {
  if (std::abs(std::sin(2.0 * xi0)) > 1e-9)
    throw std::domain_error(
        "spin_echo_cpmg_repeated_asymptotic: xi0 not a multiple of pi/2; use the brute force");
  const bool good_branch = std::abs(std::sin(xi0)) < 1e-9;  // xi0 = k pi
  const double value = good_branch ? 1.0 - samples.mean_eps() / std::sqrt(2.0) : 0.0;
  return {value, Method::Analytic, "repeated cpmg spin echo (large-N)"};
}

CoherenceField eit_write(const Eigen::VectorXd& envelope, double delta_k, double length) {
  const Eigen::Index n = envelope.size();
  if (n < 2) throw std::invalid_argument("eit_write: need at least 2 nodes");
  if (!(length > 0.0)) throw std::invalid_argument("eit_write: length <= 0");
  const double windings = std::abs(delta_k) * length / (2.0 * pi);
  if (static_cast<double>(n) < 32.0 * windings)
    throw std::invalid_argument("eit_write: fewer than 32 z nodes per phase winding");
  CoherenceField f;
  f.delta_k = delta_k;
  f.length = length;
  f.z.resize(n);
  f.rho12.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (envelope[k] < -1e-15 || envelope[k] > 0.5 + 1e-12)
      throw std::invalid_argument("eit_write: envelope outside [0, 1/2]");
    f.z[k] = length * static_cast<double>(k) / static_cast<double>(n - 1);
    f.rho12[k] = envelope[k] * std::polar(1.0, -delta_k * f.z[k]);
  }
  return f;
}

Eigen::VectorXd uniform_envelope(int n, double amplitude) {
  return Eigen::VectorXd::Constant(n, amplitude);
}

Eigen::VectorXd gaussian_envelope(int n, double amplitude, double width_fraction) {
  Eigen::VectorXd env(n);
  for (int k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / (n - 1) - 0.5;
    env[k] = amplitude * std::exp(-0.5 * u * u / (width_fraction * width_fraction));
  }
  return env;
}

namespace {

Complex phase_matched_integral(const CoherenceField& f) {
  // trapezoid of rho12(z) e^{i dk z}
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = 0; k + 1 < f.z.size(); ++k) {
    const Complex f0 = f.rho12[k] * std::polar(1.0, f.delta_k * f.z[k]);
    const Complex f1 = f.rho12[k + 1] * std::polar(1.0, f.delta_k * f.z[k + 1]);
    acc += 0.5 * (f0 + f1) * (f.z[k + 1] - f.z[k]);
  }
  return acc;
}

}  // namespace

EfficiencyResult eit_efficiency_general(const CoherenceField& out, const CoherenceField& in) {
  if (out.z.size() != in.z.size() || std::abs(out.delta_k - in.delta_k) > 0.0)
    throw std::invalid_argument("eit_efficiency_general: mismatched fields");
  const Complex num = phase_matched_integral(out);
  const Complex den = phase_matched_integral(in);
  if (std::abs(den) < 1e-300)
    throw std::domain_error("eit_efficiency_general: degenerate input field");
  return {std::norm(num / den), Method::BruteForce, "light-storage efficiency"};
}

EfficiencyResult eit_efficiency_phase_averaged(const Eigen::VectorXcd& ratios) {
  if (ratios.size() == 0) throw std::invalid_argument("eit_efficiency_phase_averaged: empty");
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = 0; k < ratios.size(); ++k) acc += ratios[k];
  acc /= static_cast<double>(ratios.size());
  return {std::norm(acc), Method::BruteForce, "phase-averaged light-storage efficiency"};
}

EfficiencyResult eit_hahn_analytic(double mean_one_minus_eps, double delta_k_length) {
  const double base = mean_one_minus_eps * mean_one_minus_eps;
  if (delta_k_length == 0.0) return {base, Method::Analytic, "hahn light storage (dkL -> 0)"};
  const Complex num = std::polar(1.0, 2.0 * delta_k_length) - 1.0;
  const double filt = std::norm(num / (2.0 * delta_k_length));
  return {base * filt, Method::Analytic, "hahn light storage"};
}

Eigen::VectorXd sequence_efficiency_coefficients(NamedSequence s) {
  switch (s) {
    case NamedSequence::Hahn:
      return coeffs({0.0});
    case NamedSequence::Cpmg:
    case NamedSequence::Cpmg2:
      return coeffs({1.0, -2.0, 1.0});
    case NamedSequence::Xy4:
    case NamedSequence::Ur4:
      return coeffs({1.0, 0.0, -4.0, 4.0, -1.0});
    case NamedSequence::Ur6:
      return coeffs({1.0, 0.0, 0.0, -2.0, -4.0, 8.0, -3.0});
    case NamedSequence::Xy8:
      return coeffs({1.0, 0.0, 0.0, -8.0, 4.0, 0.0, 48.0, -80.0, 35.0});
    case NamedSequence::Ur8:
      return coeffs({1.0, 0.0, 0.0, 0.0, -4.0, 8.0, -16.0, 16.0, -5.0});
    case NamedSequence::U5a2:
      return coeffs({1.0, 0.0, 0.0, -22.0 + 12.0 * sqrt3, 44.0 - 24.0 * sqrt3,
                     -24.0 + 12.0 * sqrt3, 629.0 - 370.0 * sqrt3, -2688.0 + 1594.0 * sqrt3,
                     4334.0 - 2598.0 * sqrt3, -3120.0 + 1894.0 * sqrt3, 846.0 - 520.0 * sqrt3});
    case NamedSequence::Kdd2:
      return coeffs({1.0, 0.0, 0.0, -22.0 - 12.0 * sqrt3, 44.0 + 24.0 * sqrt3,
                     -24.0 - 12.0 * sqrt3, 629.0 + 370.0 * sqrt3, -2688.0 - 1594.0 * sqrt3,
                     4334.0 + 2598.0 * sqrt3, -3120.0 - 1894.0 * sqrt3, 846.0 + 520.0 * sqrt3});
    case NamedSequence::Ur10:
      return coeffs({1.0, 0.0, 0.0, 0.0, 0.0, -2.0, -2.0 * (3.0 - sqrt5), 8.0 * (2.0 - sqrt5),
                     -2.0 * (11.0 - 5.0 * sqrt5), 4.0 * (5.0 - sqrt5), -7.0});
  }
  throw std::invalid_argument("sequence_efficiency_coefficients: bad sequence");
}

double sequence_efficiency_polynomial(NamedSequence s, double eps) {
  return horner(sequence_efficiency_coefficients(s), eps);
}

double sequence_efficiency_polynomial_truncated(NamedSequence s, double eps) {
  Eigen::VectorXd c = sequence_efficiency_coefficients(s);
  if (s == NamedSequence::U5a2 || s == NamedSequence::Kdd2)
    c.conservativeResize(6);  // keep terms through eps^5, as catalogued
  return horner(c, eps);
}

EfficiencyResult eit_closed_form(const EitPattern& pattern, const AngleSamples& samples,
                                 bool first_moment) {
  return std::visit(
      [&](const auto& p) -> EfficiencyResult {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NamedSequence>) {
          const Eigen::VectorXd c = sequence_efficiency_coefficients(p);
          const double bracket = first_moment ? horner(c, samples.mean_eps())
                                              : samples.average_polynomial(c);
          return {bracket * bracket, Method::Analytic,
                  std::string("light storage closed form: ") + sequence_name(p)};
        } else if constexpr (std::is_same_v<T, ThreePulsePattern>) {
          // <4 eps (1-eps)^2>^2 cos^2(phi2)
          const Eigen::VectorXd c = coeffs({0.0, 4.0, -8.0, 4.0});
          const double bracket = first_moment ? horner(c, samples.mean_eps())
                                              : samples.average_polynomial(c);
          const double v = bracket * std::cos(p.phi2);
          return {v * v, Method::Analytic, "light storage closed form: three-pulse"};
        } else if constexpr (std::is_same_v<T, DoubleCpmgPattern>) {
          // |<(1-eps)^2 (e^{4 i phi2} (1-eps)^2 + 6 eps^2 + 4 e^{2 i phi2} eps (2 eps - 1))>|^2
          const Complex e4 = std::polar(1.0, 4.0 * p.phi2);
          const Complex e2 = std::polar(1.0, 2.0 * p.phi2);
          auto term = [&](double e) {
            const double om = 1.0 - e;
            return om * om * (e4 * om * om + 6.0 * e * e + 4.0 * e2 * e * (2.0 * e - 1.0));
          };
          Complex acc(0.0, 0.0);
          if (first_moment) {
            acc = term(samples.mean_eps());
          } else {
            for (Eigen::Index i = 0; i < samples.eps.size(); ++i)
              acc += samples.w[i] * term(samples.eps[i]);
          }
          return {std::norm(acc), Method::Analytic, "light storage closed form: double cpmg"};
        } else {
          // <(1 - eps/sqrt(2))/2>^2
          const Eigen::VectorXd c = coeffs({0.5, -0.5 / std::sqrt(2.0)});
          const double bracket = first_moment ? horner(c, samples.mean_eps())
                                              : samples.average_polynomial(c);
          return {bracket * bracket, Method::Analytic,
                  "light storage closed form: repeated cpmg (large-N)"};
        }
      },
      pattern);
}

EfficiencyResult eit_bruteforce(const SequenceSpec& seq, const BruteForceConfig& config,
                                const CoherenceField& in) {
  const CoherenceChannel ch = accumulate_channel(seq, config);
  CoherenceField out = in;
  for (Eigen::Index k = 0; k < in.z.size(); ++k)
    out.rho12[k] = apply_channel(ch, density_pure_ground_coherence(in.rho12[k]));
  EfficiencyResult r = eit_efficiency_general(out, in);
  r.method = config.dephased_gaps ? Method::DephasedOracle : Method::BruteForce;
  r.label = "light-storage brute force";
  return r;
}

EfficiencyResult eit_bruteforce_phase_averaged(const SequenceSpec& seq,
                                               const BruteForceConfig& config, int xi_points,
                                               double amplitude) {
  if (xi_points < 2) throw std::invalid_argument("eit_bruteforce_phase_averaged: xi_points < 2");
  const CoherenceChannel ch = accumulate_channel(seq, config);
  Eigen::VectorXcd ratios(xi_points);
  for (int k = 0; k < xi_points; ++k) {
    const double xi0 = 2.0 * pi * k / xi_points;
    const Complex r12 = amplitude * std::polar(1.0, xi0);
    ratios[k] = apply_channel(ch, density_pure_ground_coherence(r12)) / r12;
  }
  EfficiencyResult r = eit_efficiency_phase_averaged(ratios);
  r.method = config.dephased_gaps ? Method::DephasedOracle : Method::BruteForce;
  r.label = "light-storage brute force (phase-averaged)";
  return r;
}

CoherenceField field_profile_after(const SequenceSpec& seq, const BruteForceConfig& config,
                                   const CoherenceField& in) {
  const CoherenceChannel ch = accumulate_channel(seq, config);
  CoherenceField out = in;
  for (Eigen::Index k = 0; k < in.z.size(); ++k)
    out.rho12[k] = apply_channel(ch, density_pure_ground_coherence(in.rho12[k]));
  return out;
}

}  // namespace rephsim
