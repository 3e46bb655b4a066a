#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "fgp/simulate.hpp"

namespace fgp {

// Nystrom discretization of the covariance operator: top-k eigenpairs with
// eigenfunctions orthonormal under the trapezoid quadrature weights.
struct KLBasis {
  SimulationGrid grid;
  Eigen::VectorXd eigenvalues;   // non-increasing, >= 0
  Eigen::MatrixXd eigenvectors;  // (m+1) x k, psi_i in column i
  Eigen::VectorXd quad_weights;
  int k = 0;
};

KLBasis kl_decompose(const Eigen::MatrixXd& cov, const SimulationGrid& grid,
                     int k);

// Canonical-metric reconstruction delta(s,t) = sqrt(sum lam_i (psi_i(t)-psi_i(s))^2).
Eigen::MatrixXd kl_delta(const KLBasis& basis);

// Truncated expansion over eigenpairs [i_lo, i_hi).
PathEnsemble kl_simulate_range(const KLBasis& basis, int i_lo, int i_hi, int d,
                               int n_paths, std::uint64_t seed);
PathEnsemble kl_simulate(const KLBasis& basis, int d, int n_paths,
                         std::uint64_t seed);

// Head uses eigenpairs [0, n_split), tail [n_split, k), sharing the same
// coefficient stream so head + tail equals the full truncated simulation.
std::pair<PathEnsemble, PathEnsemble> kl_split_simulate(const KLBasis& basis,
                                                        int n_split, int d,
                                                        int n_paths,
                                                        std::uint64_t seed);

}  // namespace fgp
