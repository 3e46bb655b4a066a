#include "fgp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fgp/parallel.hpp"
#include "fgp/rng.hpp"

namespace fgp {

void SimulationGrid::validate() const {
  if (!(t_start >= 0.0 && t_start < t_end))
    throw std::invalid_argument("grid: need 0 <= t_start < t_end");
  if (m < 8) throw std::invalid_argument("grid: need m >= 8");
}

namespace {

std::vector<double> volterra_weights(const VarianceProfile& profile,
                                     const SimulationGrid& grid) {
  const double h = grid.mesh();
  std::vector<double> w(grid.m + 1, 0.0);
  double prev = 0.0;
  for (int k = 1; k <= grid.m; ++k) {
    const double cur = gamma_sq(profile, k * h);
    w[k] = std::sqrt(std::max(0.0, cur - prev));
    prev = cur;
  }
  return w;
}

bool all_equal(const std::vector<double>& w) {
  for (std::size_t k = 2; k < w.size(); ++k)
    if (std::abs(w[k] - w[1]) > 1e-10 * w[1]) return false;
  return true;
}

}  // namespace

PathEnsemble volterra_simulate(const VarianceProfile& profile,
                               const SimulationGrid& grid, int d, int n_paths,
                               std::uint64_t seed) {
  grid.validate();
  if (grid.t_start != 0.0)
    throw std::invalid_argument("volterra_simulate: grid must start at 0");
  if (grid.t_end > profile.domain_max * (1.0 + 1e-12))
    throw std::domain_error("volterra_simulate: profile domain shorter than t_end");
  if (d < 1 || n_paths < 1)
    throw std::invalid_argument("volterra_simulate: d and n_paths must be >= 1");

  const int n = grid.m + 1;
  const std::vector<double> w = volterra_weights(profile, grid);
  const bool brownian = all_equal(w);

  PathEnsemble ens;
  ens.grid = grid;
  ens.d = d;
  ens.n_paths = n_paths;
  ens.seed = seed;
  ens.method = SimMethod::volterra;
  ens.values.assign(n_paths, std::vector<double>(std::size_t(n) * d, 0.0));

  parallel_for(n_paths, [&](int p) {
    std::vector<double> z(grid.m);
    for (int c = 0; c < d; ++c) {
      for (int i = 0; i < grid.m; ++i)
        z[i] = gauss_draw(seed, std::uint64_t(p), std::uint32_t(c),
                          std::uint64_t(i));
      double* b = ens.values[p].data() + std::size_t(n) * c;
      if (brownian) {
        double acc = 0.0;
        for (int j = 1; j <= grid.m; ++j) {
          acc += w[1] * z[j - 1];
          b[j] = acc;
        }
      } else {
        for (int i = 0; i < grid.m; ++i) {
          const double zi = z[i];
          const double* wp = w.data() + 1;
          double* bp = b + i + 1;
          const int len = grid.m - i;
          for (int k = 0; k < len; ++k) bp[k] += wp[k] * zi;
        }
      }
    }
  });
  return ens;
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols())
    throw std::invalid_argument("covariance_factor: matrix not square");
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * (1.0 + cov.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("covariance_factor: matrix not symmetric");

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("covariance_factor: eigensolver failed");
  const double trace = std::max(cov.trace(), 0.0);
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-8 * std::max(trace, 1e-300))
      throw std::invalid_argument("covariance_factor: matrix is not PSD");
    if (lam[i] < 0.0) lam[i] = 0.0;  // repair within tolerance
  }
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

PathEnsemble cholesky_simulate(const Eigen::MatrixXd& cov,
                               const SimulationGrid& grid, int d, int n_paths,
                               std::uint64_t seed) {
  grid.validate();
  const int n = grid.m + 1;
  if (cov.rows() != n)
    throw std::invalid_argument("cholesky_simulate: cov size != grid points");
  const Eigen::MatrixXd L = covariance_factor(cov);

  PathEnsemble ens;
  ens.grid = grid;
  ens.d = d;
  ens.n_paths = n_paths;
  ens.seed = seed;
  ens.method = SimMethod::cholesky;
  ens.values.assign(n_paths, std::vector<double>(std::size_t(n) * d, 0.0));

  parallel_for(n_paths, [&](int p) {
    Eigen::VectorXd z(n);
    for (int c = 0; c < d; ++c) {
      for (int i = 0; i < n; ++i)
        z[i] = gauss_draw(seed, std::uint64_t(p), std::uint32_t(c),
                          std::uint64_t(i));
      Eigen::Map<Eigen::VectorXd>(ens.values[p].data() + std::size_t(n) * c, n) =
          L * z;
    }
  });
  return ens;
}

Eigen::MatrixXd volterra_covariance(const VarianceProfile& profile,
                                    const SimulationGrid& grid) {
  grid.validate();
  if (grid.t_start != 0.0)
    throw std::invalid_argument("volterra_covariance: grid must start at 0");
  const int n = grid.m + 1;
  const std::vector<double> w = volterra_weights(profile, grid);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  // Q(i, i+delta) = sum_{k=1..i} w_k w_{k+delta}, accumulated per diagonal
  for (int delta = 0; delta < n; ++delta) {
    double acc = 0.0;
    for (int i = 1; i + delta <= grid.m; ++i) {
      acc += w[i] * w[i + delta];
      q(i, i + delta) = acc;
      q(i + delta, i) = acc;
    }
  }
  return q;
}

Eigen::MatrixXd volterra_covariance_at(const VarianceProfile& profile,
                                       const std::vector<double>& times) {
  const std::size_t n = times.size();
  if (n == 0) throw std::invalid_argument("volterra_covariance_at: empty times");
  std::vector<double> gaps(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    gaps[i - 1] = times[i] - times[i - 1];
    if (!(gaps[i - 1] > 0.0))
      throw std::invalid_argument("volterra_covariance_at: times must increase");
  }
  if (!(times[0] > 0.0))
    throw std::invalid_argument("volterra_covariance_at: times must be > 0");
  return volterra_covariance_gaps(profile, times[0], gaps);
}

Eigen::MatrixXd volterra_covariance_gaps(const VarianceProfile& profile,
                                         double t0,
                                         const std::vector<double>& gaps) {
  const int n = int(gaps.size()) + 1;
  for (double g : gaps)
    if (!(g > 0.0))
      throw std::invalid_argument("volterra_covariance_gaps: gaps must be > 0");

  // diff(c, i) = t_i - t_{c-1} as a direct gap sum; c = 0 means t_i - 0.
  auto diff = [&](int c, int i) -> double {
    double s = (c == 0) ? t0 : 0.0;
    for (int k = std::max(c, 1); k <= i; ++k) s += gaps[k - 1];
    return s;
  };

  // w(i, c): mass of cell c in B(t_i); cell 0 is [0, t_0].
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c <= i; ++c) {
      const double right = diff(c, i);
      const double left = (c == i) ? 0.0 : diff(c + 1, i);
      const double g2r = gamma_sq(profile, right);
      const double g2l = left > 0.0 ? gamma_sq(profile, left) : 0.0;
      w(i, c) = std::sqrt(std::max(0.0, g2r - g2l));
    }
  }
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (int c = 0; c <= j; ++c) acc += w(i, c) * w(j, c);
      q(i, j) = acc;
      q(j, i) = acc;
    }
  return q;
}

Eigen::MatrixXd empirical_delta(const PathEnsemble& ensemble) {
  if (ensemble.n_paths < 100)
    throw std::invalid_argument("empirical_delta: need n_paths >= 100");
  const int n = ensemble.grid.m + 1;
  const int cols = ensemble.n_paths * ensemble.d;
  Eigen::MatrixXd x(n, cols);
  for (int p = 0; p < ensemble.n_paths; ++p)
    for (int c = 0; c < ensemble.d; ++c)
      x.col(p * ensemble.d + c) = Eigen::Map<const Eigen::VectorXd>(
          ensemble.values[p].data() + std::size_t(n) * c, n);
  const Eigen::MatrixXd gram = (x * x.transpose()) / double(cols);
  Eigen::MatrixXd delta(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        delta(i, j) = 0.0;
        continue;
      }
      delta(i, j) = std::sqrt(
          std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j)));
    }
  return delta;
}

CommensurabilityReport verify_commensurability(const PathEnsemble& ensemble,
                                               const VarianceProfile& profile,
                                               double tol) {
  const Eigen::MatrixXd delta = empirical_delta(ensemble);
  const int n = ensemble.grid.m + 1;
  const double h = ensemble.grid.mesh();
  if (ensemble.grid.t_end - ensemble.grid.t_start >
      profile.domain_max * (1.0 + 1e-12))
    throw std::domain_error("verify_commensurability: grid span beyond profile");
  double lhat = 1.0;
  for (int i = 0; i < n; ++i) {
    if (ensemble.grid.time(i) == 0.0 && i == 0) continue;
    for (int j = 0; j < i; ++j) {
      if (ensemble.grid.time(j) == 0.0 && j == 0) continue;
      const double g = gamma_eval(profile, (i - j) * h);
      const double r = delta(i, j) / g;
      const double m = std::max(r, 1.0 / r);
      lhat = std::max(lhat, m * m);
    }
  }
  CommensurabilityReport rep;
  rep.l_hat = lhat;
  rep.tol = tol;
  rep.holds = lhat <= profile.l_factor * (1.0 + tol);
  return rep;
}

double conditional_variance(const Eigen::MatrixXd& cov, int i, int j) {
  if (i < 0 || j < 0 || i >= cov.rows() || j >= cov.cols())
    throw std::invalid_argument("conditional_variance: index out of range");
  if (i == j) return 0.0;
  const double vj = cov(j, j);
  if (!(vj > 0.0))
    throw std::invalid_argument(
        "conditional_variance: zero variance at conditioning point");
  return cov(i, i) - cov(i, j) * cov(i, j) / vj;
}

namespace {
template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void write_fgp1(const PathEnsemble& e, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_fgp1: cannot open " + path);
  os.write("FGP1", 4);
  put<std::uint32_t>(os, 1u);
  put<std::uint32_t>(os, std::uint32_t(e.d));
  put<std::uint64_t>(os, std::uint64_t(e.grid.m));
  put<std::uint64_t>(os, std::uint64_t(e.n_paths));
  put<std::uint64_t>(os, e.seed);
  put<std::uint32_t>(os, std::uint32_t(e.method));
  put<double>(os, e.grid.t_start);
  put<double>(os, e.grid.t_end);
  for (const auto& row : e.values)
    os.write(reinterpret_cast<const char*>(row.data()),
             std::streamsize(row.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_fgp1: write failed");
}

PathEnsemble read_fgp1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_fgp1: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "FGP1", 4) != 0)
    throw std::runtime_error("read_fgp1: bad magic");
  if (get<std::uint32_t>(is) != 1u)
    throw std::runtime_error("read_fgp1: unsupported version");
  PathEnsemble e;
  e.d = int(get<std::uint32_t>(is));
  e.grid.m = int(get<std::uint64_t>(is));
  e.n_paths = int(get<std::uint64_t>(is));
  e.seed = get<std::uint64_t>(is);
  e.method = SimMethod(get<std::uint32_t>(is));
  e.grid.t_start = get<double>(is);
  e.grid.t_end = get<double>(is);
  const std::size_t row = std::size_t(e.grid.m + 1) * e.d;
  e.values.assign(e.n_paths, std::vector<double>(row));
  for (auto& r : e.values)
    is.read(reinterpret_cast<char*>(r.data()),
            std::streamsize(row * sizeof(double)));
  if (!is) throw std::runtime_error("read_fgp1: truncated payload");
  return e;
}

void write_ensemble_csv(const PathEnsemble& e, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_ensemble_csv: cannot open " + path);
  os << "path,t";
  for (int c = 1; c <= e.d; ++c) os << ",x" << c;
  os << "\n";
  char buf[40];
  const int n = e.grid.m + 1;
  for (int p = 0; p < e.n_paths; ++p)
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.grid.time(j));
      os << p << ',' << buf;
      for (int c = 0; c < e.d; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.at(p, j, c));
        os << ',' << buf;
      }
      os << "\n";
    }
}

}  // namespace fgp
