#include "rephsim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rephsim {

namespace {

EnsembleGrid midpoint_grid(double halfwidth, int n, const std::function<double(double)>& density) {
  EnsembleGrid g;
  g.nodes.resize(n);
  g.weights.resize(n);
  const double h = 2.0 * halfwidth / n;
  for (int k = 0; k < n; ++k) {
    g.nodes[k] = -halfwidth + (k + 0.5) * h;
    g.weights[k] = density(g.nodes[k]) * h;
  }
  g.weights /= g.weights.sum();
  return g;
}

}  // namespace

EnsembleGrid EnsembleGrid::single() {
  EnsembleGrid g;
  g.nodes = Eigen::VectorXd::Zero(1);
  g.weights = Eigen::VectorXd::Ones(1);
  return g;
}

void gauss_hermite(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  if (n == 1) {
    nodes = Eigen::VectorXd::Zero(1);
    weights = Eigen::VectorXd::Ones(1);
    return;
  }
  // Golub-Welsch on the Jacobi matrix of the (probabilists') Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes = solver.eigenvalues();
  weights.resize(n);
  for (int k = 0; k < n; ++k) weights[k] = solver.eigenvectors()(0, k) * solver.eigenvectors()(0, k);
  weights /= weights.sum();
}

EnsembleGrid build_grid(const DetuningDistribution& dist, int n_points) {
  if (n_points < 1) throw std::invalid_argument("build_grid: n_points < 1");
  return std::visit(
      [&](const auto& d) -> EnsembleGrid {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianDetuning>) {
          EnsembleGrid g;
          gauss_hermite(n_points, g.nodes, g.weights);
          g.nodes *= d.sigma;
          return g;
        } else if constexpr (std::is_same_v<T, UniformDetuning>) {
          if (!(d.halfwidth > 0.0)) throw std::invalid_argument("build_grid: uniform halfwidth <= 0");
          return midpoint_grid(d.halfwidth, n_points, [](double) { return 1.0; });
        } else if constexpr (std::is_same_v<T, LorentzianDetuning>) {
          if (!(d.gamma > 0.0)) throw std::invalid_argument("build_grid: lorentzian gamma <= 0");
          const double cutoff = d.cutoff > 0.0 ? d.cutoff : 20.0 * d.gamma;
          const double gamma = d.gamma;
          return midpoint_grid(cutoff, n_points,
                               [gamma](double x) { return 1.0 / (x * x + gamma * gamma); });
        } else {
          if (d.nodes.size() == 0 || d.nodes.size() != d.weights.size())
            throw std::invalid_argument("build_grid: bad discrete distribution");
          if (d.weights.minCoeff() < 0.0)
            throw std::invalid_argument("build_grid: negative discrete weight");
          std::vector<int> order(d.nodes.size());
          std::iota(order.begin(), order.end(), 0);
          std::sort(order.begin(), order.end(),
                    [&](int a, int b) { return d.nodes[a] < d.nodes[b]; });
          EnsembleGrid g;
          g.nodes.resize(d.nodes.size());
          g.weights.resize(d.nodes.size());
          for (Eigen::Index k = 0; k < d.nodes.size(); ++k) {
            g.nodes[k] = d.nodes[order[k]];
            g.weights[k] = d.weights[order[k]];
          }
          g.weights /= g.weights.sum();
          return g;
        }
      },
      dist);
}

EnsembleGrid with_rabi_spread(EnsembleGrid grid, const DetuningDistribution& offset_dist,
                              int n_points) {
  const EnsembleGrid offsets = build_grid(offset_dist, n_points);
  grid.rabi_factors = offsets.nodes.array() + 1.0;
  grid.rabi_weights = offsets.weights;
  if (grid.rabi_factors.minCoeff() <= 0.0)
    throw std::invalid_argument("with_rabi_spread: nonpositive Rabi factor");
  return grid;
}

Complex average(const Eigen::VectorXcd& values, const EnsembleGrid& grid) {
  if (values.size() != grid.point_count())
    throw std::invalid_argument("average: one value per grid point required");
  Complex acc(0.0, 0.0);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < grid.nodes.size(); ++i)
    for (Eigen::Index j = 0; j < grid.rabi_factors.size(); ++j, ++idx)
      acc += grid.weights[i] * grid.rabi_weights[j] * values[idx];
  return acc;
}

Complex free_dephasing(const EnsembleGrid& grid, double t) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < grid.nodes.size(); ++i)
    acc += grid.weights[i] * std::polar(1.0, grid.nodes[i] * t);
  return acc;
}

double dephasing_time(const EnsembleGrid& grid) {
  const double target = std::exp(-1.0);
  double mean = 0.0, second = 0.0;
  for (Eigen::Index i = 0; i < grid.nodes.size(); ++i) {
    mean += grid.weights[i] * grid.nodes[i];
    second += grid.weights[i] * grid.nodes[i] * grid.nodes[i];
  }
  const double spread = std::sqrt(std::max(0.0, second - mean * mean));
  if (!(spread > 0.0))
    throw std::domain_error("dephasing_time: degenerate grid never dephases");
  // Walk forward in steps small against 1/spread to find the first crossing,
  // then bisect inside the bracketing step.
  const double step = 1.0 / (32.0 * spread);
  double lo = 0.0, hi = step;
  bool found = false;
  for (int k = 0; k < 4096; ++k) {
    if (std::abs(free_dephasing(grid, hi)) <= target) {
      found = true;
      break;
    }
    lo = hi;
    hi += step;
  }
  if (!found) throw std::domain_error("dephasing_time: no crossing found (grid too coarse?)");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(free_dephasing(grid, mid)) <= target)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rephsim
