#ifndef REPHSIM_ENSEMBLE_HPP
#define REPHSIM_ENSEMBLE_HPP

#include <variant>

#include "rephsim/su2.hpp"

namespace rephsim {

struct GaussianDetuning {
  double sigma;  // rad/s
};

// Heavy tails require an explicit cutoff; pass cutoff <= 0 for the 20*gamma
// default (weights renormalised over the truncated support).
struct LorentzianDetuning {
  double gamma;   // rad/s (HWHM)
  double cutoff;  // rad/s
};

struct UniformDetuning {
  double halfwidth;  // rad/s, support [-halfwidth, halfwidth]
};

struct DiscreteDetuning {
  Eigen::VectorXd nodes;    // rad/s
  Eigen::VectorXd weights;  // nonnegative, renormalised on build
};

using DetuningDistribution =
    std::variant<GaussianDetuning, LorentzianDetuning, UniformDetuning, DiscreteDetuning>;

// Quadrature nodes/weights realising the detuning average, with an optional
// Rabi-factor axis (outer product grid). Values laid out detuning-major:
// index = i_detuning * rabi_factors.size() + j_rabi.
struct EnsembleGrid {
  Eigen::VectorXd nodes;    // ascending detunings
  Eigen::VectorXd weights;  // sum to 1
  Eigen::VectorXd rabi_factors = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd rabi_weights = Eigen::VectorXd::Ones(1);

  Eigen::Index point_count() const { return nodes.size() * rabi_factors.size(); }
  static EnsembleGrid single();  // one node at zero detuning
};

// Gaussian -> Gauss-Hermite, Uniform/Lorentzian -> midpoint rule,
// Discrete -> passthrough (sorted, renormalised).
EnsembleGrid build_grid(const DetuningDistribution& dist, int n_points);

// Attach a multiplicative Rabi-inhomogeneity axis; factors are 1 + node of
// the given distribution (Uniform{0.1} -> +-10% spread).
EnsembleGrid with_rabi_spread(EnsembleGrid grid, const DetuningDistribution& offset_dist,
                              int n_points);

// Weighted sum with fixed left-to-right order; one value per grid point.
Complex average(const Eigen::VectorXcd& values, const EnsembleGrid& grid);

// <e^{i Delta t}>
Complex free_dephasing(const EnsembleGrid& grid, double t);

// First t with |<e^{i Delta t}>| <= 1/e, by bracketing + bisection.
// Throws std::domain_error for a degenerate (zero-spread) grid.
double dephasing_time(const EnsembleGrid& grid);

// Probabilists' Gauss-Hermite rule: sum w_i f(x_i) with x ~ N(0,1).
void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace rephsim

#endif
