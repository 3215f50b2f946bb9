// Command-line front end: configuration-driven sweeps and tables over the
// rephasing-efficiency library, with CSV/JSON output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rephsim/efficiency.hpp"
#include "rephsim/parallel.hpp"

using json = nlohmann::json;
using namespace rephsim;

namespace {

constexpr double khz = 2.0 * pi * 1e3;  // cycles/ms -> rad/s
constexpr double us = 1e-6;
constexpr double deg = pi / 180.0;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json default_config() {
  return json{
      {"schema", "rephsim.config.v1"},
      {"regime", "spin-echo"},
      {"sequence", {{"name", "cpmg"}, {"phi2_deg", 0.0}, {"repetitions", 1}}},
      {"error",
       {{"model", "fixed"},
        {"epsilon", 0.1},
        {"rabi_khz", 156.0},
        {"detuning_khz", 0.0},
        {"duration_us", 3.2},
        {"peak_rabi_khz", 156.0},
        {"chirp_khz", 60.0},
        {"static_detuning_khz", 0.0},
        {"width_us", 1.0},
        {"t_final_us", 10.0}}},
      {"ensemble",
       {{"distribution", "gaussian"},
        {"t_deph_us", 10.0},
        {"sigma_khz", 0.0},
        {"halfwidth_khz", 40.0},
        {"gamma_khz", 10.0},
        {"cutoff_khz", 0.0},
        {"points", 64},
        {"rabi_spread", {{"enabled", false}, {"halfwidth", 0.1}, {"points", 8}}}}},
      {"oracle", {{"dephased_gaps", true}, {"delta_points", 256}, {"xi0_points", 256}}},
      {"eit",
       {{"delta_k_l_over_pi", 10.0}, {"z_points", 4096}, {"envelope", "uniform"}, {"amplitude", 0.25}}},
      {"storage", {{"t_st_us", 600.0}}},
      {"write", {{"phi0_deg", 0.0}}},
      {"sweep", {{"points", 73}, {"start_deg", 0.0}, {"stop_deg", 360.0}}},
      {"count", {{"max_pulses", 20}}},
      {"table", {{"epsilons", {0.05, 0.1, 0.2, 0.3}}}},
      {"bloch",
       {{"pulses", 10},
        {"cycle_us", 30.0},
        {"sample_dt_us", 0.5},
        {"detuning_khz", 5.0},
        {"xi0_deg", 90.0},
        {"ensemble_average", false}}},
      {"normalize", false},
      {"output", {{"path", "-"}, {"format", "csv"}}},
      {"threads", 0},
  };
}

void merge_into(json& base, const json& overlay, const std::string& path) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string sub = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key: " + sub);
    if (base[it.key()].is_object() && it.value().is_object())
      merge_into(base[it.key()], it.value(), sub);
    else
      base[it.key()] = it.value();
  }
}

void apply_override(json& config, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like section.key=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // bare strings need no quotes
  }
  json* node = &config;
  std::istringstream keys(path);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) parts.push_back(key);
  if (parts.empty()) throw ConfigError("empty override path");
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) throw ConfigError("unknown config key: " + path);
    node = &(*node)[parts[i]];
  }
  if (!node->contains(parts.back())) throw ConfigError("unknown config key: " + path);
  (*node)[parts.back()] = value;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct OutputTable {
  std::string schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_output(const OutputTable& table, const json& config) {
  const std::string path = config["output"]["path"].get<std::string>();
  const std::string format = config["output"]["format"].get<std::string>();
  std::ostringstream body;
  if (format == "csv") {
    for (size_t i = 0; i < table.header.size(); ++i)
      body << table.header[i] << (i + 1 < table.header.size() ? "," : "");
    body << "\n";
    for (const auto& row : table.rows) {
      for (size_t i = 0; i < row.size(); ++i) body << row[i] << (i + 1 < row.size() ? "," : "");
      body << "\n";
    }
  } else if (format == "json") {
    json out{{"schema", table.schema},
             {"columns", table.header},
             {"rows", json::array()},
             {"config", config}};
    for (const auto& row : table.rows) out["rows"].push_back(row);
    body << out.dump(2) << "\n";
  } else {
    throw ConfigError("output.format must be csv or json");
  }
  if (path == "-") {
    std::cout << body.str();
  } else {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output path: " + path);
    file << body.str();
  }
}

// ---- config -> library objects ----

PulseSpec pulse_from_config(const json& config) {
  const json& e = config["error"];
  const std::string model = e["model"].get<std::string>();
  if (model == "rectangular")
    return RectangularPulse{e["rabi_khz"].get<double>() * khz,
                            e["detuning_khz"].get<double>() * khz,
                            e["duration_us"].get<double>() * us};
  if (model == "demkov-kunike")
    return DemkovKunikePulse{e["peak_rabi_khz"].get<double>() * khz,
                             e["chirp_khz"].get<double>() * khz,
                             e["static_detuning_khz"].get<double>() * khz,
                             e["width_us"].get<double>() * us, e["t_final_us"].get<double>() * us};
  if (model == "fixed") return ResonantPulse{pi};  // angles supplied by the fixed-error model
  throw ConfigError("error.model must be fixed, rectangular or demkov-kunike");
}

double pulse_time_in_sequence(const json& config) {
  const std::string model = config["error"]["model"].get<std::string>();
  if (model == "fixed") return config["error"]["duration_us"].get<double>() * us;
  return pulse_duration(pulse_from_config(config));
}

DetuningDistribution distribution_from_config(const json& config) {
  const json& e = config["ensemble"];
  const std::string kind = e["distribution"].get<std::string>();
  if (kind == "gaussian") {
    double sigma = e["sigma_khz"].get<double>() * khz;
    if (!(sigma > 0.0)) sigma = std::sqrt(2.0) / (e["t_deph_us"].get<double>() * us);
    return GaussianDetuning{sigma};
  }
  if (kind == "uniform") return UniformDetuning{e["halfwidth_khz"].get<double>() * khz};
  if (kind == "lorentzian")
    return LorentzianDetuning{e["gamma_khz"].get<double>() * khz, e["cutoff_khz"].get<double>() * khz};
  throw ConfigError("ensemble.distribution must be gaussian, uniform or lorentzian");
}

EnsembleGrid grid_from_config(const json& config) {
  EnsembleGrid grid = build_grid(distribution_from_config(config),
                                 config["ensemble"]["points"].get<int>());
  const json& rs = config["ensemble"]["rabi_spread"];
  if (rs["enabled"].get<bool>())
    grid = with_rabi_spread(std::move(grid), UniformDetuning{rs["halfwidth"].get<double>()},
                            rs["points"].get<int>());
  return grid;
}

BruteForceConfig brute_config(const json& config) {
  BruteForceConfig cfg;
  cfg.dephased_gaps = config["oracle"]["dephased_gaps"].get<bool>();
  cfg.delta_points = config["oracle"]["delta_points"].get<int>();
  if (config["error"]["model"].get<std::string>() == "fixed") {
    cfg.error = FixedError{config["error"]["epsilon"].get<double>()};
    // physical gaps still need the detuning ensemble even with fixed pulse errors
    cfg.grid = cfg.dephased_gaps ? EnsembleGrid::single() : grid_from_config(config);
  } else {
    cfg.error = PulseError{};
    cfg.grid = grid_from_config(config);
  }
  return cfg;
}

AngleSamples samples_from_config(const json& config) {
  if (config["error"]["model"].get<std::string>() == "fixed")
    return AngleSamples::fixed(config["error"]["epsilon"].get<double>());
  return AngleSamples::from_pulse(pulse_from_config(config), grid_from_config(config));
}

// Equal pulse separation inside the fixed storage time; fails if the pulses
// do not fit, naming the largest feasible count.
double gap_from_storage(const json& config, int pulses_per_rep, int repetitions) {
  const double t_st = config["storage"]["t_st_us"].get<double>() * us;
  const double t_pulse = pulse_time_in_sequence(config);
  const int total = pulses_per_rep * repetitions;
  const double gap = t_st / total - t_pulse;
  if (gap < 0.0) {
    const int max_n = static_cast<int>(t_st / (t_pulse * repetitions));
    std::ostringstream msg;
    msg << "sequence does not fit the storage time: " << total << " pulses of "
        << t_pulse / us << " us in " << t_st / us << " us (max feasible pulses per repetition: "
        << max_n << ")";
    throw ConfigError(msg.str());
  }
  return gap;
}

SequenceSpec cpmg_pair_sequence(const json& config, double phi2) {
  const int reps = config["sequence"]["repetitions"].get<int>();
  SequenceSpec seq = make_sequence(NamedSequence::Cpmg, pulse_from_config(config),
                                   gap_from_storage(config, 2, reps), reps, phi2);
  return seq;
}

CoherenceField field_from_config(const json& config) {
  const json& e = config["eit"];
  const int n = e["z_points"].get<int>();
  const double amp = e["amplitude"].get<double>();
  const Eigen::VectorXd env = e["envelope"].get<std::string>() == "gaussian"
                                  ? gaussian_envelope(n, amp)
                                  : uniform_envelope(n, amp);
  const double dkl = e["delta_k_l_over_pi"].get<double>() * pi;
  return eit_write(env, dkl, 1.0);
}

int threads_from(const json& config) { return config["threads"].get<int>(); }

// ---- experiments ----

OutputTable run_sweep_phase(const json& config) {
  const int points = config["sweep"]["points"].get<int>();
  const double start = config["sweep"]["start_deg"].get<double>();
  const double stop = config["sweep"]["stop_deg"].get<double>();
  const std::string regime = config["regime"].get<std::string>();
  const int reps = config["sequence"]["repetitions"].get<int>();
  const double phi0 = config["write"]["phi0_deg"].get<double>() * deg;
  const int xi_points = config["oracle"]["xi0_points"].get<int>();
  const AngleSamples samples = samples_from_config(config);
  const BruteForceConfig cfg = brute_config(config);

  struct Row {
    double phi_deg;
    std::optional<double> analytic;
    double brute;
  };
  const auto rows = parallel_map<Row>(points, threads_from(config), [&](int i) {
    const double phi_deg = start + (stop - start) * i / std::max(1, points - 1);
    const double phi = phi_deg * deg;
    const SequenceSpec seq = cpmg_pair_sequence(config, phi);
    Row row{phi_deg, std::nullopt, 0.0};
    if (regime == "spin-echo") {
      row.brute = spin_echo_bruteforce(seq, cfg, phi0 + pi / 2).value;
      if (reps == 1) row.analytic = spin_echo_cpmg_analytic(samples, phi0, phi).value;
    } else {
      row.brute = eit_bruteforce_phase_averaged(seq, cfg, xi_points).value;
      if (reps == 1)
        row.analytic = eit_closed_form(NamedSequence::Cpmg, samples).value;
      else if (reps == 2)
        row.analytic = eit_closed_form(DoubleCpmgPattern{phi}, samples).value;
    }
    return row;
  });

  OutputTable out{"rephsim.sweep-phase.v1", {"phi_deg", "eta_analytic", "eta_bruteforce"}, {}};
  for (const Row& r : rows)
    out.rows.push_back({fmt(r.phi_deg), r.analytic ? fmt(*r.analytic) : "", fmt(r.brute)});
  return out;
}

OutputTable run_sweep_write_phase(const json& config) {
  if (config["regime"].get<std::string>() != "spin-echo")
    throw ConfigError("sweep-write-phase runs in the spin-echo regime");
  const int points = config["sweep"]["points"].get<int>();
  const double start = config["sweep"]["start_deg"].get<double>();
  const double stop = config["sweep"]["stop_deg"].get<double>();
  const double phi2 = config["sequence"]["phi2_deg"].get<double>() * deg;
  const AngleSamples samples = samples_from_config(config);

  std::vector<double> eta(points);
  std::vector<double> phis(points);
  for (int i = 0; i < points; ++i) {
    phis[i] = start + (stop - start) * i / std::max(1, points - 1);
    eta[i] = spin_echo_cpmg_analytic(samples, phis[i] * deg, phi2).value;
  }
  const bool normalize = config["normalize"].get<bool>();
  OutputTable out{"rephsim.sweep-write-phase.v1", {"phi0_deg", "eta"}, {}};
  if (normalize) out.header.push_back("eta_normalized");
  double lo = eta[0], hi = eta[0];
  for (double v : eta) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (int i = 0; i < points; ++i) {
    std::vector<std::string> row{fmt(phis[i]), fmt(eta[i])};
    if (normalize) row.push_back(fmt(hi > lo ? (eta[i] - lo) / (hi - lo) : 0.0));
    out.rows.push_back(row);
  }
  return out;
}

OutputTable run_sweep_count(const json& config) {
  if (config["regime"].get<std::string>() != "eit")
    throw ConfigError("sweep-count runs in the eit regime");
  const int max_n = config["count"]["max_pulses"].get<int>();
  const int xi_points = config["oracle"]["xi0_points"].get<int>();
  const AngleSamples samples = samples_from_config(config);
  const BruteForceConfig cfg = brute_config(config);
  const PulseSpec pulse = pulse_from_config(config);

  struct Row {
    int n;
    double brute;
    std::optional<double> closed;
  };
  const auto rows = parallel_map<Row>(max_n, threads_from(config), [&](int idx) {
    const int n = idx + 1;
    SequenceSpec seq;
    seq.repetitions = 1;
    seq.gap = gap_from_storage(config, n, 1);
    for (int k = 0; k < n; ++k) seq.elements.push_back({pulse, 0.0});
    Row row{n, eit_bruteforce_phase_averaged(seq, cfg, xi_points).value, std::nullopt};
    if (n == 1) row.closed = eit_closed_form(NamedSequence::Hahn, samples).value;
    if (n == 2) row.closed = eit_closed_form(NamedSequence::Cpmg, samples).value;
    if (n == 3) row.closed = eit_closed_form(ThreePulsePattern{0.0}, samples).value;
    if (n == 4) row.closed = eit_closed_form(DoubleCpmgPattern{0.0}, samples).value;
    return row;
  });

  OutputTable out{"rephsim.sweep-count.v1", {"n_pulses", "eta_bruteforce", "eta_closed_form"}, {}};
  for (const Row& r : rows)
    out.rows.push_back({std::to_string(r.n), fmt(r.brute), r.closed ? fmt(*r.closed) : ""});
  return out;
}

OutputTable run_field_profile(const json& config) {
  if (config["regime"].get<std::string>() != "eit")
    throw ConfigError("field-profile runs in the eit regime");
  const CoherenceField in = field_from_config(config);
  const BruteForceConfig cfg = brute_config(config);
  const PulseSpec pulse = pulse_from_config(config);

  OutputTable out{"rephsim.field-profile.v1",
                  {"stage", "z", "delta_k_z", "magnitude_ratio", "phase"},
                  {}};
  auto emit = [&](const std::string& stage, const CoherenceField& f) {
    for (Eigen::Index k = 0; k < f.z.size(); ++k) {
      const double mag_in = std::abs(in.rho12[k]);
      out.rows.push_back({stage, fmt(f.z[k]), fmt(f.delta_k * f.z[k]),
                          fmt(std::abs(f.rho12[k]) / mag_in), fmt(std::arg(f.rho12[k]))});
    }
  };

  emit("write", in);
  SequenceSpec hahn;
  hahn.gap = gap_from_storage(config, 1, 1);
  hahn.elements = {{pulse, 0.0}};
  emit("hahn", field_profile_after(hahn, cfg, in));
  SequenceSpec cpmg;
  cpmg.gap = gap_from_storage(config, 2, 1);
  cpmg.elements = {{pulse, 0.0}, {pulse, 0.0}};
  emit("cpmg", field_profile_after(cpmg, cfg, in));
  return out;
}

OutputTable run_bloch_traj(const json& config) {
  if (config["error"]["model"].get<std::string>() == "demkov-kunike")
    throw ConfigError("bloch-traj supports the fixed and rectangular error models");
  const json& b = config["bloch"];
  const int pulses = b["pulses"].get<int>();
  const double cycle = b["cycle_us"].get<double>() * us;
  const double sample_dt = b["sample_dt_us"].get<double>() * us;
  const double xi0 = b["xi0_deg"].get<double>() * deg;

  // the trajectory needs a real time profile: fixed-error configs fall back
  // to the configured rectangular pulse parameters
  const json& e = config["error"];
  const RectangularPulse pulse{e["rabi_khz"].get<double>() * khz,
                               e["detuning_khz"].get<double>() * khz,
                               e["duration_us"].get<double>() * us};
  if (cycle < pulse.duration) throw ConfigError("bloch.cycle_us shorter than the pulse");
  SequenceSpec seq;
  seq.gap = cycle - pulse.duration;
  seq.repetitions = 1;
  for (int k = 0; k < pulses; ++k) seq.elements.push_back({PulseSpec{pulse}, 0.0});

  const Density rho0 = density_max_coherence(xi0);
  OutputTable out{"rephsim.bloch-traj.v1", {"t_us", "x", "y", "z"}, {}};
  if (b["ensemble_average"].get<bool>()) {
    const EnsembleGrid grid = grid_from_config(config);
    std::vector<std::vector<TrajectoryPoint>> per_node(static_cast<size_t>(grid.nodes.size()));
    for (Eigen::Index i = 0; i < grid.nodes.size(); ++i)
      per_node[static_cast<size_t>(i)] = propagate_timeline(seq, grid.nodes[i], rho0, sample_dt);
    const size_t samples = per_node.front().size();
    for (size_t k = 0; k < samples; ++k) {
      Density avg = Density::Zero();
      for (Eigen::Index i = 0; i < grid.nodes.size(); ++i)
        avg += grid.weights[i] * per_node[static_cast<size_t>(i)][k].rho;
      const Bloch v = bloch_vector(avg);
      out.rows.push_back(
          {fmt(per_node.front()[k].t / us), fmt(v.x()), fmt(v.y()), fmt(v.z())});
    }
  } else {
    const double detuning = b["detuning_khz"].get<double>() * khz;
    for (const TrajectoryPoint& pt : propagate_timeline(seq, detuning, rho0, sample_dt)) {
      const Bloch v = bloch_vector(pt.rho);
      out.rows.push_back({fmt(pt.t / us), fmt(v.x()), fmt(v.y()), fmt(v.z())});
    }
  }
  return out;
}

OutputTable run_table(const json& config) {
  const std::vector<double> epsilons = config["table"]["epsilons"].get<std::vector<double>>();
  const int xi_points = config["oracle"]["xi0_points"].get<int>();
  const NamedSequence sequences[] = {NamedSequence::Cpmg, NamedSequence::Xy4, NamedSequence::Ur4,
                                     NamedSequence::Ur6,  NamedSequence::Xy8, NamedSequence::Ur8,
                                     NamedSequence::U5a2, NamedSequence::Kdd2, NamedSequence::Ur10};
  struct Job {
    NamedSequence seq;
    double eps;
  };
  std::vector<Job> jobs;
  for (NamedSequence s : sequences)
    for (double eps : epsilons) jobs.push_back({s, eps});

  struct Row {
    std::string name;
    double eps, closed, brute;
  };
  const auto rows = parallel_map<Row>(static_cast<int>(jobs.size()), threads_from(config), [&](int i) {
    const Job& job = jobs[static_cast<size_t>(i)];
    BruteForceConfig cfg;
    cfg.error = FixedError{job.eps};
    cfg.dephased_gaps = config["oracle"]["dephased_gaps"].get<bool>();
    cfg.delta_points = config["oracle"]["delta_points"].get<int>();
    const SequenceSpec seq = make_sequence(job.seq, ResonantPulse{pi}, 0.0, 1, 0.0);
    const double closed = eit_closed_form(job.seq, AngleSamples::fixed(job.eps)).value;
    const double brute = eit_bruteforce_phase_averaged(seq, cfg, xi_points).value;
    return Row{sequence_name(job.seq), job.eps, closed, brute};
  });

  OutputTable out{"rephsim.table.v1",
                  {"sequence", "epsilon", "eta_closed_form", "eta_bruteforce", "abs_diff"},
                  {}};
  for (const Row& r : rows)
    out.rows.push_back(
        {r.name, fmt(r.eps), fmt(r.closed), fmt(r.brute), fmt(std::abs(r.closed - r.brute))});
  return out;
}

OutputTable run_check(const json& config) {
  OutputTable out{"rephsim.check.v1", {"check", "expected", "got", "diff", "tol", "status"}, {}};
  auto record = [&](const std::string& name, double expected, double got, double tol) {
    const double diff = std::abs(expected - got);
    out.rows.push_back(
        {name, fmt(expected), fmt(got), fmt(diff), fmt(tol), diff < tol ? "pass" : "FAIL"});
  };

  const int delta_points = config["oracle"]["delta_points"].get<int>();
  const int xi_points = config["oracle"]["xi0_points"].get<int>();

  // closed forms vs the dephased oracle across the catalogue
  const NamedSequence sequences[] = {NamedSequence::Cpmg, NamedSequence::Xy4, NamedSequence::Ur4,
                                     NamedSequence::Ur6,  NamedSequence::Xy8, NamedSequence::Ur8,
                                     NamedSequence::U5a2, NamedSequence::Kdd2, NamedSequence::Ur10};
  for (NamedSequence s : sequences) {
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
      BruteForceConfig cfg;
      cfg.error = FixedError{eps};
      cfg.delta_points = delta_points;
      const double closed = eit_closed_form(s, AngleSamples::fixed(eps)).value;
      const double brute = eit_bruteforce_phase_averaged(
                               make_sequence(s, ResonantPulse{pi}, 0.0, 1, 0.0), cfg, xi_points)
                               .value;
      record(std::string("table:") + sequence_name(s) + "@" + fmt(eps), closed, brute, 1e-3);
    }
  }

  // spin-echo write-phase law
  {
    BruteForceConfig cfg;
    cfg.error = FixedError{0.1};
    cfg.delta_points = delta_points;
    const SequenceSpec cpmg = make_sequence(NamedSequence::Cpmg, ResonantPulse{pi}, 0.0, 1, 0.0);
    double worst = 0.0;
    for (int k = 0; k < 72; ++k) {
      const double phi0 = 2.0 * pi * k / 72.0;
      const double ana = spin_echo_cpmg_analytic(AngleSamples::fixed(0.1), phi0, 0.0).value;
      const double brute = spin_echo_bruteforce(cpmg, cfg, phi0 + pi / 2).value;
      worst = std::max(worst, std::abs(ana - brute));
    }
    record("spin-echo:write-phase-law", 0.0, worst, 1e-3);
  }

  // double-pair phase dependence
  for (double phi_deg : {0.0, 45.0, 90.0, 180.0}) {
    BruteForceConfig cfg;
    cfg.error = FixedError{0.1};
    cfg.delta_points = delta_points;
    SequenceSpec seq = make_sequence(NamedSequence::Cpmg, ResonantPulse{pi}, 0.0, 2, phi_deg * deg);
    const double brute = eit_bruteforce_phase_averaged(seq, cfg, xi_points).value;
    const double closed =
        eit_closed_form(DoubleCpmgPattern{phi_deg * deg}, AngleSamples::fixed(0.1)).value;
    record("double-pair@" + fmt(phi_deg), closed, brute, 1e-3);
  }

  // single-pulse storage dies at 10 pi phase winding
  {
    BruteForceConfig cfg;
    cfg.error = FixedError{0.2};
    cfg.delta_points = delta_points;
    SequenceSpec hahn;
    hahn.elements = {{ResonantPulse{pi}, 0.0}};
    const CoherenceField in = eit_write(uniform_envelope(4096), 10.0 * pi, 1.0);
    record("hahn:phase-mismatch", 0.0, eit_bruteforce(hahn, cfg, in).value, 1e-3);
  }

  return out;
}

bool table_has_failures(const OutputTable& table) {
  for (const auto& row : table.rows)
    if (!row.empty() && row.back() == "FAIL") return true;
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rephasing-efficiency simulator for phased pulse sequences"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  int threads = -1;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_path, "output path ('-' for stdout)");
  app.add_option("--format", format, "csv or json");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.allow_extras();

  const char* names[] = {"sweep-phase", "sweep-write-phase", "sweep-count",
                         "field-profile", "bloch-traj", "table", "check"};
  for (const char* name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->allow_extras();
    sub->fallthrough();  // --config/--out/--format/--threads may follow the subcommand
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    json config = default_config();
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) throw ConfigError("cannot read config file: " + config_path);
      json overlay = json::parse(file, nullptr, true, true);
      merge_into(config, overlay, "");
    }
    // dotted overrides: --section.key=value anywhere on the command line
    std::vector<std::string> extras = app.remaining(true);
    for (const std::string& extra : extras) {
      if (extra.rfind("--", 0) != 0)
        throw ConfigError("unrecognised argument: " + extra);
      apply_override(config, extra.substr(2));
    }
    if (!out_path.empty()) config["output"]["path"] = out_path;
    if (!format.empty()) config["output"]["format"] = format;
    if (threads >= 0) config["threads"] = threads;

    OutputTable table;
    if (experiment == "sweep-phase")
      table = run_sweep_phase(config);
    else if (experiment == "sweep-write-phase")
      table = run_sweep_write_phase(config);
    else if (experiment == "sweep-count")
      table = run_sweep_count(config);
    else if (experiment == "field-profile")
      table = run_field_profile(config);
    else if (experiment == "bloch-traj")
      table = run_bloch_traj(config);
    else if (experiment == "table")
      table = run_table(config);
    else if (experiment == "check")
      table = run_check(config);
    write_output(table, config);
    if (experiment == "check" && table_has_failures(table)) {
      std::cerr << "check failed: at least one analytic/brute-force pair out of tolerance\n";
      return 3;
    }
    return 0;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const json::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
