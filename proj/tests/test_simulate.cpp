#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fgp/kl.hpp"
#include "fgp/rng.hpp"
#include "fgp/simulate.hpp"

using namespace fgp;

namespace {

double ensemble_var(const PathEnsemble& e, int j, int c = 0) {
  double s = 0.0;
  for (int p = 0; p < e.n_paths; ++p) s += e.at(p, j, c) * e.at(p, j, c);
  return s / e.n_paths;
}

double ensemble_mean(const PathEnsemble& e, int j, int c = 0) {
  double s = 0.0;
  for (int p = 0; p < e.n_paths; ++p) s += e.at(p, j, c);
  return s / e.n_paths;
}

}  // namespace

TEST_CASE("volterra: Brownian case has unit variance at t=1") {
  SimulationGrid grid{0.0, 1.0, 128};
  const auto e = volterra_simulate(VarianceProfile::power(0.5), grid, 1, 10000, 7);
  // paths start at zero
  for (int p = 0; p < 5; ++p) CHECK(e.at(p, 0, 0) == 0.0);
  const double v = ensemble_var(e, grid.m);
  const double se = std::sqrt(2.0 / e.n_paths);  // Var of a chi^2 mean, unit var
  CHECK(std::abs(v - 1.0) <= 3.0 * se);
}

TEST_CASE("volterra: ensemble variance tracks gamma^2 at grid points") {
  SimulationGrid grid{0.0, 0.25, 64};
  for (const auto& p : {VarianceProfile::power(0.3), VarianceProfile::logbm(1.0),
                        VarianceProfile::stretched_exp(0.5)}) {
    const auto e = volterra_simulate(p, grid, 1, 4000, 11);
    for (int j = 1; j <= grid.m; j += 7) {
      const double g2 = gamma_sq(p, grid.time(j));
      const double se = g2 * std::sqrt(2.0 / e.n_paths);
      CHECK(std::abs(ensemble_var(e, j) - g2) <= 4.0 * se);
    }
  }
}

TEST_CASE("volterra: mean zero and iid components") {
  SimulationGrid grid{0.0, 1.0, 32};
  const auto e = volterra_simulate(VarianceProfile::power(0.5), grid, 2, 6000, 3);
  for (int j : {8, 16, 32}) {
    const double sd = std::sqrt(grid.time(j));
    CHECK(std::abs(ensemble_mean(e, j, 0)) <= 4.0 * sd / std::sqrt(e.n_paths));
    CHECK(std::abs(ensemble_mean(e, j, 1)) <= 4.0 * sd / std::sqrt(e.n_paths));
    double cross = 0.0;
    for (int p = 0; p < e.n_paths; ++p) cross += e.at(p, j, 0) * e.at(p, j, 1);
    cross /= e.n_paths;
    CHECK(std::abs(cross) <= 4.0 * grid.time(j) / std::sqrt(double(e.n_paths)));
  }
}

TEST_CASE("determinism: identical output regardless of worker count") {
  SimulationGrid grid{0.0, 0.5, 32};
  setenv("FGP_THREADS", "1", 1);
  const auto a = volterra_simulate(VarianceProfile::power(0.4), grid, 2, 64, 99);
  setenv("FGP_THREADS", "2", 1);
  const auto b = volterra_simulate(VarianceProfile::power(0.4), grid, 2, 64, 99);
  unsetenv("FGP_THREADS");
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t p = 0; p < a.values.size(); ++p)
    CHECK(a.values[p] == b.values[p]);
}

TEST_CASE("cholesky: Brownian covariance min(s,t)") {
  SimulationGrid grid{0.0, 1.0, 16};
  const int n = grid.m + 1;
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cov(i, j) = std::min(grid.time(i), grid.time(j));
  const auto e = cholesky_simulate(cov, grid, 1, 10000, 5);
  for (int i : {4, 8, 16})
    for (int j : {4, 12}) {
      double acc = 0.0;
      for (int p = 0; p < e.n_paths; ++p) acc += e.at(p, i, 0) * e.at(p, j, 0);
      acc /= e.n_paths;
      const double se =
          std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / e.n_paths);
      CHECK(std::abs(acc - cov(i, j)) <= 5.0 * se);
    }
}

TEST_CASE("cholesky: not-PSD error and PSD repair") {
  SimulationGrid grid{0.0, 1.0, 8};
  const int n = grid.m + 1;
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(n, n);
  bad(0, 0) = -0.5;
  CHECK_THROWS_AS(covariance_factor(bad), std::invalid_argument);
  // tiny negative eigenvalue is repaired
  Eigen::MatrixXd ok = Eigen::MatrixXd::Identity(n, n);
  ok(0, 0) = -1e-12;
  const auto L = covariance_factor(ok);
  CHECK(((L * L.transpose()) - ok).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("volterra and cholesky ensembles agree on the model covariance") {
  SimulationGrid grid{0.0, 0.2, 24};
  const auto p = VarianceProfile::logbm(0.75, 0.25);
  const Eigen::MatrixXd q = volterra_covariance(p, grid);
  // diagonal is exactly gamma^2
  for (int j = 1; j <= grid.m; ++j)
    CHECK(q(j, j) == doctest::Approx(gamma_sq(p, grid.time(j))).epsilon(1e-12));

  const auto ev = volterra_simulate(p, grid, 1, 6000, 21);
  const auto ec = cholesky_simulate(q, grid, 1, 6000, 22);
  for (int i : {6, 12, 24})
    for (int j : {3, 18}) {
      double a = 0.0, b = 0.0;
      for (int pt = 0; pt < ev.n_paths; ++pt) {
        a += ev.at(pt, i, 0) * ev.at(pt, j, 0);
        b += ec.at(pt, i, 0) * ec.at(pt, j, 0);
      }
      a /= ev.n_paths;
      b /= ec.n_paths;
      const double se = std::sqrt(
          2.0 * (q(i, i) * q(j, j) + q(i, j) * q(i, j)) / ev.n_paths);
      CHECK(std::abs(a - b) <= 5.0 * se);
    }
}

TEST_CASE("volterra covariance on an arbitrary time set matches the grid") {
  const auto p = VarianceProfile::power(0.3);
  SimulationGrid grid{0.0, 1.0, 16};
  const Eigen::MatrixXd qg = volterra_covariance(p, grid);
  std::vector<double> times;
  for (int j = 1; j <= grid.m; ++j) times.push_back(grid.time(j));
  const Eigen::MatrixXd qt = volterra_covariance_at(p, times);
  for (int i = 0; i < qt.rows(); ++i)
    for (int j = 0; j < qt.cols(); ++j)
      CHECK(qt(i, j) == doctest::Approx(qg(i + 1, j + 1)).epsilon(1e-12));
}

TEST_CASE("gap-based covariance keeps structure below absolute resolution") {
  const auto p = VarianceProfile::logbm(1.0, 0.9);
  // two leaves e^-40 apart around t ~ 0.5: their absolute doubles coincide
  const std::vector<double> gaps = {std::exp(-40.0), 0.1, std::exp(-40.0)};
  const Eigen::MatrixXd q = volterra_covariance_gaps(p, 0.5, gaps);
  const double d01 = q(0, 0) + q(1, 1) - 2.0 * q(0, 1);
  // Var of the increment across an e^-40 gap is of order gamma^2(e^-40) = 1/1600
  CHECK(d01 > 0.0);
  CHECK(d01 < 3.0 * gamma_sq(p, std::exp(-40.0)));
  CHECK(d01 > gamma_sq(p, std::exp(-40.0)) / 3.0);
}

TEST_CASE("empirical delta: Brownian and degenerate columns") {
  SimulationGrid grid{0.0, 1.0, 16};
  const auto e = volterra_simulate(VarianceProfile::power(0.5), grid, 1, 8000, 17);
  const Eigen::MatrixXd d = empirical_delta(e);
  for (int i = 0; i <= grid.m; ++i) CHECK(d(i, i) == 0.0);
  for (int i : {4, 10, 16})
    for (int j : {1, 8}) {
      if (i == j) continue;
      const double truth = std::sqrt(std::abs(grid.time(i) - grid.time(j)));
      CHECK(d(i, j) == doctest::Approx(truth).epsilon(0.05));
    }
  CHECK_THROWS_AS(
      empirical_delta(volterra_simulate(VarianceProfile::power(0.5), grid, 1, 50, 1)),
      std::invalid_argument);
}

TEST_CASE("commensurability: Brownian passes with l ~ 1, mismatch fails") {
  SimulationGrid grid{0.0, 1.0, 24};
  const auto e = volterra_simulate(VarianceProfile::power(0.5), grid, 1, 10000, 23);
  const auto rep = verify_commensurability(e, VarianceProfile::power(0.5));
  CHECK(rep.l_hat <= 1.1);
  CHECK(rep.holds);
  // Brownian paths against gamma = r^0.8 cannot be commensurate
  const auto bad = verify_commensurability(e, VarianceProfile::power(0.8));
  CHECK_FALSE(bad.holds);
}

TEST_CASE("RL-fBm on a window is commensurate with some finite l") {
  SimulationGrid grid{0.0, 1.0, 32};
  const auto p = VarianceProfile::power(0.3);
  const auto e = volterra_simulate(p, grid, 1, 8000, 29);
  // restricted to [0.1,1]: drop the ramp near 0 by probing the tail pairs
  const Eigen::MatrixXd d = empirical_delta(e);
  double lhat = 1.0;
  for (int i = 4; i <= grid.m; ++i)
    for (int j = 4; j < i; ++j) {
      const double g = gamma_eval(p, (i - j) * grid.mesh());
      const double r = d(i, j) / g;
      lhat = std::max(lhat, std::max(r, 1.0 / r) * std::max(r, 1.0 / r));
    }
  CHECK(lhat < 10.0);
}

TEST_CASE("conditional variance: independent increments and degenerate cases") {
  SimulationGrid grid{0.0, 1.0, 16};
  const int n = grid.m + 1;
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cov(i, j) = std::min(grid.time(i), grid.time(j));
  // BM: Var(W(t)|W(s)) = t - s for s < t
  CHECK(conditional_variance(cov, 12, 4) ==
        doctest::Approx(grid.time(12) - grid.time(4)));
  CHECK(conditional_variance(cov, 7, 7) == 0.0);
  CHECK_THROWS_AS(conditional_variance(cov, 4, 0), std::invalid_argument);
}

TEST_CASE("two-point LND ratio for RL-fBm away from the origin") {
  const auto p = VarianceProfile::power(0.3);
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(0.5 + 0.5 * i / 40.0);
  const Eigen::MatrixXd q = volterra_covariance_at(p, times);
  double min_ratio = 1e300;
  for (int i = 0; i + 1 < int(times.size()); ++i) {
    const int j = i + 1;
    const double d2 = q(i, i) + q(j, j) - 2.0 * q(i, j);
    min_ratio = std::min(min_ratio, conditional_variance(q, j, i) / d2);
  }
  CHECK(min_ratio > 1e-3);
}

TEST_CASE("FGP1 container round-trips") {
  SimulationGrid grid{0.0, 0.5, 16};
  const auto e = volterra_simulate(VarianceProfile::power(0.6), grid, 2, 9, 31);
  const std::string path = "/tmp/fgp_test_ensemble.fgp1";
  write_fgp1(e, path);
  const auto r = read_fgp1(path);
  CHECK(r.d == e.d);
  CHECK(r.n_paths == e.n_paths);
  CHECK(r.seed == e.seed);
  CHECK(r.grid.m == e.grid.m);
  for (int p = 0; p < e.n_paths; ++p) CHECK(r.values[p] == e.values[p]);
  std::remove(path.c_str());
}

TEST_CASE("KL: Brownian eigenpairs match the classical closed form") {
  SimulationGrid grid{0.0, 1.0, 256};
  const int n = grid.m + 1;
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cov(i, j) = std::min(grid.time(i), grid.time(j));
  const auto basis = kl_decompose(cov, grid, 8);
  for (int i = 0; i < 5; ++i) {
    const double lam_true = 1.0 / std::pow((i + 0.5) * M_PI, 2);
    CHECK(basis.eigenvalues[i] == doctest::Approx(lam_true).epsilon(1e-3));
    // eigenfunction sqrt(2) sin((i+1/2) pi t) up to sign
    const double t = 0.375;
    const int j = int(t / grid.mesh());
    const double psi_true = std::sqrt(2.0) * std::sin((i + 0.5) * M_PI * t);
    CHECK(std::abs(basis.eigenvectors(j, i)) ==
          doctest::Approx(std::abs(psi_true)).epsilon(5e-3));
  }
  // spectral ordering and weighted orthonormality
  for (int i = 1; i < basis.k; ++i)
    CHECK(basis.eigenvalues[i] <= basis.eigenvalues[i - 1]);
  for (int i = 0; i < basis.k; ++i)
    for (int j = 0; j <= i; ++j) {
      const double dot = (basis.eigenvectors.col(i).array() *
                          basis.eigenvectors.col(j).array() *
                          basis.quad_weights.array())
                             .sum();
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-6);
    }
}

TEST_CASE("KL: delta reconstruction and eigenfunction modulus") {
  SimulationGrid grid{0.0, 0.2, 96};
  const auto p = VarianceProfile::logbm(0.75, 0.25);
  const Eigen::MatrixXd q = volterra_covariance(p, grid);
  const int k = 96;
  const auto basis = kl_decompose(q, grid, k);
  const Eigen::MatrixXd drec = kl_delta(basis);
  const double tail = std::max(0.0, q.trace() * grid.mesh() -
                                        basis.eigenvalues.sum());
  for (int i : {10, 40, 90})
    for (int j : {5, 60}) {
      const double direct = std::sqrt(q(i, i) + q(j, j) - 2.0 * q(i, j));
      CHECK(std::abs(drec(i, j) - direct) <=
            2.0 * std::sqrt(std::max(tail, 0.0) / grid.mesh()) + 1e-6);
    }
  // |psi_i(t)-psi_i(s)| <= lambda_i^{-1/2} delta(s,t)
  for (int i : {0, 3, 10}) {
    const double lam = basis.eigenvalues[i];
    if (lam <= 1e-14) continue;
    for (int a : {20, 70})
      for (int b : {1, 50}) {
        const double direct = std::sqrt(q(a, a) + q(b, b) - 2.0 * q(a, b));
        CHECK(std::abs(basis.eigenvectors(a, i) - basis.eigenvectors(b, i)) <=
              direct / std::sqrt(lam) * (1.0 + 1e-8));
      }
  }
}

TEST_CASE("KL split: head+tail identity, Lipschitz head, zero split") {
  SimulationGrid grid{0.0, 1.0, 64};
  const int n = grid.m + 1;
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cov(i, j) = std::min(grid.time(i), grid.time(j));
  const auto basis = kl_decompose(cov, grid, 32);

  const auto [head, tail] = kl_split_simulate(basis, 6, 1, 16, 77);
  const auto full = kl_simulate(basis, 1, 16, 77);
  for (int p = 0; p < 16; ++p)
    for (int j = 0; j <= grid.m; ++j)
      CHECK(head.at(p, j, 0) + tail.at(p, j, 0) ==
            doctest::Approx(full.at(p, j, 0)).epsilon(1e-12));

  // n_split = 0: head vanishes
  const auto [h0, t0] = kl_split_simulate(basis, 0, 1, 4, 78);
  for (int p = 0; p < 4; ++p)
    for (int j = 0; j <= grid.m; ++j) CHECK(h0.at(p, j, 0) == 0.0);

  // per-path head Lipschitz bound in the reconstructed metric
  const Eigen::MatrixXd dk = kl_delta(basis);
  for (int p = 0; p < 8; ++p) {
    double xi_sum = 0.0;
    for (int i = 0; i < 6; ++i)
      xi_sum += std::abs(gauss_draw(77, p, 0, i));
    for (int a : {10, 40})
      for (int b : {3, 60}) {
        const double lhs = std::abs(head.at(p, a, 0) - head.at(p, b, 0));
        CHECK(lhs <= xi_sum * dk(a, b) * (1.0 + 1e-9) + 1e-12);
      }
  }
}
