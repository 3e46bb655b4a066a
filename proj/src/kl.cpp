#include "fgp/kl.hpp"

#include <cmath>
#include <stdexcept>

#include "fgp/parallel.hpp"
#include "fgp/rng.hpp"

namespace fgp {

KLBasis kl_decompose(const Eigen::MatrixXd& cov, const SimulationGrid& grid,
                     int k) {
  grid.validate();
  const int n = grid.m + 1;
  if (grid.m > 4096)
    throw std::invalid_argument("kl_decompose: grids capped at m <= 4096");
  if (cov.rows() != n || cov.cols() != n)
    throw std::invalid_argument("kl_decompose: cov size != grid points");
  if (k < 1 || k > n) throw std::invalid_argument("kl_decompose: bad k");

  Eigen::VectorXd w(n);
  const double h = grid.mesh();
  for (int i = 0; i < n; ++i) w[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
  const Eigen::VectorXd ws = w.cwiseSqrt();

  const Eigen::MatrixXd a = ws.asDiagonal() * cov * ws.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("kl_decompose: eigensolver failed");

  KLBasis basis;
  basis.grid = grid;
  basis.k = k;
  basis.quad_weights = w;
  basis.eigenvalues.resize(k);
  basis.eigenvectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    const int src = n - 1 - i;  // eigenvalues come sorted ascending
    basis.eigenvalues[i] = std::max(0.0, es.eigenvalues()[src]);
    basis.eigenvectors.col(i) =
        es.eigenvectors().col(src).cwiseQuotient(ws);
  }
  return basis;
}

Eigen::MatrixXd kl_delta(const KLBasis& basis) {
  const int n = basis.grid.m + 1;
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < basis.k; ++i) {
    const auto psi = basis.eigenvectors.col(i);
    const double lam = basis.eigenvalues[i];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < a; ++b) {
        const double dpsi = psi[a] - psi[b];
        d2(a, b) += lam * dpsi * dpsi;
      }
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b) d(a, b) = d(b, a) = std::sqrt(d2(a, b));
  return d;
}

PathEnsemble kl_simulate_range(const KLBasis& basis, int i_lo, int i_hi, int d,
                               int n_paths, std::uint64_t seed) {
  if (i_lo < 0 || i_hi < i_lo || i_hi > basis.k)
    throw std::invalid_argument("kl_simulate_range: bad eigenpair range");
  const int n = basis.grid.m + 1;
  PathEnsemble ens;
  ens.grid = basis.grid;
  ens.d = d;
  ens.n_paths = n_paths;
  ens.seed = seed;
  ens.method = SimMethod::kl_truncated;
  ens.values.assign(n_paths, std::vector<double>(std::size_t(n) * d, 0.0));
  parallel_for(n_paths, [&](int p) {
    for (int c = 0; c < d; ++c) {
      Eigen::Map<Eigen::VectorXd> out(ens.values[p].data() + std::size_t(n) * c,
                                      n);
      for (int i = i_lo; i < i_hi; ++i) {
        const double xi =
            gauss_draw(seed, std::uint64_t(p), std::uint32_t(c), std::uint64_t(i));
        out += std::sqrt(basis.eigenvalues[i]) * xi * basis.eigenvectors.col(i);
      }
    }
  });
  return ens;
}

PathEnsemble kl_simulate(const KLBasis& basis, int d, int n_paths,
                         std::uint64_t seed) {
  return kl_simulate_range(basis, 0, basis.k, d, n_paths, seed);
}

std::pair<PathEnsemble, PathEnsemble> kl_split_simulate(const KLBasis& basis,
                                                        int n_split, int d,
                                                        int n_paths,
                                                        std::uint64_t seed) {
  if (n_split < 0 || n_split >= basis.k)
    throw std::invalid_argument("kl_split_simulate: need 0 <= n_split < k");
  return {kl_simulate_range(basis, 0, n_split, d, n_paths, seed),
          kl_simulate_range(basis, n_split, basis.k, d, n_paths, seed)};
}

}  // namespace fgp
