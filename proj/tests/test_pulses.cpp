#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rephsim/pulses.hpp"

using namespace rephsim;

namespace {

double angle_diff(double a, double b) { return std::abs(wrap_angle(a - b)); }

// Gauge degeneracy makes alpha (p -> 1) or beta (p -> 0) meaningless.
bool away_from_gauge(double p) { return p > 1e-4 && p < 1.0 - 1e-4; }

}  // namespace

TEST_CASE("resonant pulse transition probabilities") {
  CHECK(extract_angles(propagator_resonant(pi, 0.0)).p == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(extract_angles(propagator_resonant(pi / 2, 0.0)).p == doctest::Approx(0.5).epsilon(1e-14));
  const Gate full = propagator_resonant(2.0 * pi, 0.0);
  CHECK(extract_angles(full).p < 1e-28);
  // identity up to a global phase
  CHECK((full + Gate::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rectangular pulse matches the closed form") {
  // on resonance it reduces to the resonant row bitwise
  const Gate rect0 = propagator_rectangular(1.3, 0.0, pi / 1.3, 0.7);
  const Gate res = propagator_resonant(1.3 * (pi / 1.3), 0.7);
  CHECK((rect0 - res).cwiseAbs().maxCoeff() == 0.0);

  // detuned case: p = Omega^2/(Omega^2+Delta^2) sin^2(A_eff/2)
  const double omega = 1.0, delta = 1.0, duration = pi;
  const PulseAngles a = extract_angles(propagator_rectangular(omega, delta, duration, 0.0));
  const double a_eff = duration * std::sqrt(omega * omega + delta * delta);
  const double p_want = 0.5 * std::pow(std::sin(0.5 * a_eff), 2);
  CHECK(a.p == doctest::Approx(p_want).epsilon(1e-14));
  CHECK(a.p == doctest::Approx(0.316563836).epsilon(1e-8));

  // far-detuned limit: transfer dies off
  CHECK(extract_angles(propagator_rectangular(1.0, 300.0, pi, 0.0)).p < 2e-5);

  // degenerate zero-field case is the identity, not an error
  CHECK((propagator_rectangular(0.0, 0.0, 1.0, 0.0) - Gate::Identity()).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("rectangular alpha agrees with the arctan form on the principal branch") {
  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> uo(0.1, 3.0), ud(-3.0, 3.0), ut(0.1, 4.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const double omega = uo(rng), delta = ud(rng), duration = ut(rng);
    const double w = std::hypot(omega, delta);
    const double a_eff = w * duration;
    const PulseAngles a = extract_angles(propagator_rectangular(omega, delta, duration, 0.0));
    if (std::abs(a.alpha) < pi / 2 - 1e-6 && away_from_gauge(a.p)) {
      const double want = std::atan(delta / w * std::tan(0.5 * a_eff));
      CHECK(angle_diff(a.alpha, want) < 1e-10);
      ++checked;
    }
    // the off-diagonal phase is -pi/2 mod pi for every rectangular pulse
    if (a.p > 1e-8) CHECK(std::abs(std::cos(2.0 * a.beta) + 1.0) < 1e-9);
    if (a.p > 1e-8 && std::sin(0.5 * a_eff) > 1e-8 && a_eff < 2.0 * pi)
      CHECK(angle_diff(a.beta, -pi / 2) < 1e-12);
  }
  CHECK(checked > 200);
}

TEST_CASE("chirped pulse: analytic limits") {
  // full return of the sech pulse at unit scaled area
  const DemkovKunikePulse rz_full{2.0, 0.0, 0.0, 1.0, 10.0};
  CHECK(extract_angles(propagator_demkov_kunike(rz_full, 0.0)).p < 1e-12);

  // complete inversion at half-unit scaled area
  const DemkovKunikePulse rz_half{1.0, 0.0, 0.0, 1.0, 10.0};
  CHECK(extract_angles(propagator_demkov_kunike(rz_half, 0.0)).p ==
        doctest::Approx(1.0).epsilon(1e-12));

  // resonant sech pulse reproduces sin^2(area/2) with area = pi*Omega0*T
  const DemkovKunikePulse rz{0.8, 0.0, 0.0, 1.0, 10.0};
  CHECK(extract_angles(propagator_demkov_kunike(rz, 0.0)).p ==
        doctest::Approx(std::pow(std::sin(pi * 0.4), 2)).epsilon(1e-12));

  // adiabatic regime: near-perfect inversion
  const DemkovKunikePulse adiabatic{10.0, 8.0, 0.0, 1.0, 10.0};
  CHECK(extract_angles(propagator_demkov_kunike(adiabatic, 0.0)).p > 0.999);

  // beta varies with parameters (unlike the resonant/rectangular rows)
  double beta_min = 10.0, beta_max = -10.0;
  for (double b0 : {0.2, 0.6, 1.0, 1.7, 2.5}) {
    const PulseAngles a =
        extract_angles(propagator_demkov_kunike({3.0, b0, 0.4, 1.0, 10.0}, 0.0));
    beta_min = std::min(beta_min, a.beta);
    beta_max = std::max(beta_max, a.beta);
  }
  CHECK(beta_max - beta_min > 0.1);

  CHECK_THROWS_AS(propagator_demkov_kunike({1.0, 0.0, 0.0, 1.0, 3.0}, 0.0), std::domain_error);
}

TEST_CASE("chirped pulse: transition probability is truncation-independent") {
  const DemkovKunikePulse a{3.0, 1.0, 0.8, 1.0, 10.0};
  DemkovKunikePulse b = a;
  b.t_final = 20.0;
  const double pa = extract_angles(propagator_demkov_kunike(a, 0.0)).p;
  const double pb = extract_angles(propagator_demkov_kunike(b, 0.0)).p;
  CHECK(std::abs(pa - pb) < 1e-12);
}

TEST_CASE("numeric oracle agrees with the closed forms") {
  // rectangular spot value
  const PulseSpec rect = RectangularPulse{1.0, 1.0, pi};
  const PulseAngles num = extract_angles(propagator_numeric(rect, 0.0));
  CHECK(num.p == doctest::Approx(0.316563836).epsilon(1e-6));

  // resonant pi pulse
  const PulseSpec res = ResonantPulse{pi};
  CHECK(extract_angles(propagator_numeric(res, 0.0)).p == doctest::Approx(1.0).epsilon(1e-8));

  // chirped pulse at several parameter sets, truncation pushed far out
  for (const DemkovKunikePulse p : {DemkovKunikePulse{3.0, 1.0, 0.8, 1.0, 20.0},
                                    DemkovKunikePulse{1.0, 2.0, -0.5, 1.0, 20.0},
                                    DemkovKunikePulse{4.2, 1.3, 0.6, 0.7, 14.0}}) {
    const PulseAngles ana = extract_angles(propagator_demkov_kunike(p, 0.0));
    const PulseAngles oracle = extract_angles(propagator_numeric(PulseSpec{p}, 0.0));
    CHECK(std::abs(ana.p - oracle.p) < 1e-6);
    if (away_from_gauge(ana.p)) {
      CHECK(angle_diff(ana.alpha, oracle.alpha) < 1e-5);
      CHECK(angle_diff(ana.beta, oracle.beta) < 1e-5);
    }
  }
}

TEST_CASE("random-draw oracle sweep per family") {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> uo(0.2, 2.5), ud(-2.0, 2.0), ut(0.3, 3.5);
  double worst_p = 0.0, worst_ang = 0.0;
  for (int i = 0; i < 150; ++i) {
    PulseSpec spec;
    if (i % 2 == 0)
      spec = RectangularPulse{uo(rng), ud(rng), ut(rng)};
    else
      spec = RectangularPulse{uo(rng), 0.0, ut(rng)};  // resonant row via any-shape reduction
    const PulseAngles ana = extract_angles(propagator_analytic(spec, 0.4));
    const PulseAngles num = extract_angles(propagator_numeric(spec, 0.4));
    worst_p = std::max(worst_p, std::abs(ana.p - num.p));
    if (away_from_gauge(ana.p)) {
      worst_ang = std::max(worst_ang, angle_diff(ana.alpha, num.alpha));
      worst_ang = std::max(worst_ang, angle_diff(ana.beta, num.beta));
    }
  }
  std::uniform_real_distribution<double> ua(0.3, 2.2), ub(0.0, 1.8), udd(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const DemkovKunikePulse p{2.0 * ua(rng), 2.0 * ub(rng), udd(rng), 1.0, 20.0};
    const PulseAngles ana = extract_angles(propagator_demkov_kunike(p, 0.0));
    const PulseAngles num = extract_angles(propagator_numeric(PulseSpec{p}, 0.0));
    worst_p = std::max(worst_p, std::abs(ana.p - num.p));
    if (away_from_gauge(ana.p)) {
      worst_ang = std::max(worst_ang, angle_diff(ana.alpha, num.alpha));
      worst_ang = std::max(worst_ang, angle_diff(ana.beta, num.beta));
    }
  }
  CHECK(worst_p < 1e-6);
  CHECK(worst_ang < 1e-5);
}

TEST_CASE("sampled pulses are exact piecewise products") {
  SampledPulse s;
  s.rabi = Eigen::VectorXd::Constant(1, 1.1);
  s.detuning = Eigen::VectorXd::Constant(1, 0.4);
  s.dt = 2.2;
  CHECK((propagator_sampled(s, 0.3) - propagator_rectangular(1.1, 0.4, 2.2, 0.3))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // sech/tanh profile rendered to samples approaches the closed form
  // (t_final pushed far out: the closed form is the untruncated limit)
  const DemkovKunikePulse dk{2.4, 0.9, 0.3, 1.0, 20.0};
  const int n = 100000;
  SampledPulse render;
  render.dt = 2.0 * dk.t_final / n;
  render.rabi.resize(n);
  render.detuning.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = -dk.t_final + (k + 0.5) * render.dt;
    render.rabi[k] = dk.peak_rabi / std::cosh(t / dk.width);
    render.detuning[k] = dk.static_detuning + dk.chirp * std::tanh(t / dk.width);
  }
  const PulseAngles got = extract_angles(propagator_sampled(render, 0.0));
  const PulseAngles want = extract_angles(propagator_demkov_kunike(dk, 0.0));
  CHECK(std::abs(got.p - want.p) < 1e-5);
  CHECK(angle_diff(got.beta, want.beta) < 1e-5);
}

TEST_CASE("field scaling paths agree bitwise") {
  const RectangularPulse base{1.7, 0.3, 2.0};
  const PulseSpec scaled = scale_rabi(PulseSpec{base}, 1.25);
  const Gate a = propagator_analytic(scaled, 0.2);
  const Gate b = propagator_rectangular(1.7 * 1.25, 0.3, 2.0, 0.2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(scale_rabi(PulseSpec{base}, 0.0), std::domain_error);
}

TEST_CASE("numeric oracle reports nonconvergence") {
  // absurdly coarse steps on a fast pulse must fail the halving check
  CHECK_THROWS_AS(propagator_numeric(PulseSpec{RectangularPulse{200.0, 0.0, 1.0}}, 0.0, 0.0, 0.25),
                  std::runtime_error);
}

TEST_CASE("pulse durations") {
  CHECK(pulse_duration(PulseSpec{ResonantPulse{pi}}) == 0.0);
  CHECK(pulse_duration(PulseSpec{RectangularPulse{1.0, 0.0, 3.2e-6}}) == 3.2e-6);
  CHECK(pulse_duration(PulseSpec{DemkovKunikePulse{1, 0, 0, 1e-6, 1e-5}}) == 2e-5);
}
