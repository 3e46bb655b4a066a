#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fgp/profiles.hpp"

namespace fgp {

struct SimulationGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int m = 256;  // uniform steps; m+1 grid points

  double mesh() const { return (t_end - t_start) / m; }
  double time(int j) const { return t_start + mesh() * j; }
  void validate() const;
};

enum class SimMethod { volterra, cholesky, kl_truncated };

// n_paths sample paths of a d-dimensional process on a grid.
// values laid out path-major: values[p][(m+1)*c + j] is component c at t_j.
struct PathEnsemble {
  SimulationGrid grid;
  int d = 1;
  int n_paths = 1;
  std::uint64_t seed = 0;
  SimMethod method = SimMethod::volterra;
  std::vector<std::vector<double>> values;

  double at(int path, int j, int comp) const {
    return values[path][(grid.m + 1) * comp + j];
  }
};

// Volterra discretization with exact per-cell kernel mass:
// B(t_j) = sum_{i<j} w_{j-i} Z_i,  w_k^2 = gamma^2(k h) - gamma^2((k-1) h),
// so Var B(t_j) = gamma^2(t_j) identically at grid points.
PathEnsemble volterra_simulate(const VarianceProfile& profile,
                               const SimulationGrid& grid, int d, int n_paths,
                               std::uint64_t seed);

// Exact Gaussian sampling from an explicit covariance on the grid points.
// Eigenvalues in [-1e-8 trace, 0) are clamped to zero; anything lower throws.
PathEnsemble cholesky_simulate(const Eigen::MatrixXd& cov,
                               const SimulationGrid& grid, int d, int n_paths,
                               std::uint64_t seed);

// Covariance of the discretized Volterra process at the grid points.
Eigen::MatrixXd volterra_covariance(const VarianceProfile& profile,
                                    const SimulationGrid& grid);
// Same model on an arbitrary increasing time set (cells are the gaps between
// consecutive times, prepended with 0).
Eigen::MatrixXd volterra_covariance_at(const VarianceProfile& profile,
                                       const std::vector<double>& times);
// Volterra covariance when times are given by gaps from t0; gap sums are taken
// directly so that structure far below absolute double resolution survives.
Eigen::MatrixXd volterra_covariance_gaps(const VarianceProfile& profile,
                                         double t0,
                                         const std::vector<double>& gaps);

// Factor for exact sampling: PSD-repaired L with L L^T = cov.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov);

// Empirical canonical metric: delta_hat(i,j) = rms of X0(t_i)-X0(t_j) pooled
// across paths and components.
Eigen::MatrixXd empirical_delta(const PathEnsemble& ensemble);

struct CommensurabilityReport {
  double l_hat = 1.0;
  bool holds = false;
  double tol = 0.15;
};
CommensurabilityReport verify_commensurability(const PathEnsemble& ensemble,
                                               const VarianceProfile& profile,
                                               double tol = 0.15);

// Var(X0(t_i) | X0(t_j)) from an explicit covariance.
double conditional_variance(const Eigen::MatrixXd& cov, int i, int j);

// FGP1 binary container and CSV round-trip.
void write_fgp1(const PathEnsemble& ensemble, const std::string& path);
PathEnsemble read_fgp1(const std::string& path);
void write_ensemble_csv(const PathEnsemble& ensemble, const std::string& path);

}  // namespace fgp
