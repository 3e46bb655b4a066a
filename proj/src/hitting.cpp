#include "fgp/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fgp/parallel.hpp"
#include "fgp/rng.hpp"

namespace fgp {

BinomialCI wilson_ci(long long hits, long long trials) {
  BinomialCI ci;
  ci.hits = hits;
  ci.trials = trials;
  if (trials <= 0) return ci;
  const double z = 1.959963984540054;
  const double p = double(hits) / double(trials);
  const double n = double(trials);
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  ci.freq = p;
  ci.lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  ci.hi = hits == trials ? 1.0 : std::min(1.0, center + half);
  return ci;
}

namespace {

std::vector<double> weights_for(const VarianceProfile& profile,
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

bool weights_constant(const std::vector<double>& w) {
  for (std::size_t k = 2; k < w.size(); ++k)
    if (std::abs(w[k] - w[1]) > 1e-10 * w[1]) return false;
  return true;
}

// uniform cell hash over target atoms, cell size = proximity radius;
// near() is allocation-free and bounding-box prefiltered (it runs once per
// window time per trial)
class AtomHash {
 public:
  static constexpr int kMaxDim = 6;

  AtomHash(const std::vector<Point>& atoms, double r) : r_(r) {
    if (atoms.empty()) throw std::invalid_argument("AtomHash: empty target");
    dim_ = int(atoms[0].size());
    if (dim_ > kMaxDim) throw std::invalid_argument("AtomHash: dim too large");
    lo_.assign(dim_, 1e300);
    hi_.assign(dim_, -1e300);
    flat_.reserve(atoms.size() * dim_);
    for (const auto& a : atoms) {
      for (int i = 0; i < dim_; ++i) {
        flat_.push_back(a[i]);
        lo_[i] = std::min(lo_[i], a[i] - r);
        hi_[i] = std::max(hi_[i], a[i] + r);
      }
    }
    for (std::size_t idx = 0; idx < atoms.size(); ++idx)
      cells_[key_of(atoms[idx].data())].push_back(idx);
  }

  bool near(const double* x, int d) const {
    for (int i = 0; i < d; ++i)
      if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    long long base[kMaxDim];
    for (int i = 0; i < d; ++i)
      base[i] = (long long)(std::floor(x[i] / r_));
    int off[kMaxDim];
    for (int i = 0; i < d; ++i) off[i] = -1;
    while (true) {
      std::uint64_t h = 1469598103934665603ull;
      for (int i = 0; i < d; ++i) {
        h ^= std::uint64_t(base[i] + off[i]);
        h *= 1099511628211ull;
      }
      if (auto it = cells_.find(h); it != cells_.end()) {
        for (std::size_t idx : it->second) {
          const double* a = flat_.data() + idx * dim_;
          double s = 0.0;
          for (int i = 0; i < d; ++i) {
            const double dd = x[i] - a[i];
            s += dd * dd;
          }
          if (s <= r_ * r_) return true;
        }
      }
      int axis = 0;
      while (axis < d && off[axis] == 1) off[axis++] = -1;
      if (axis == d) return false;
      ++off[axis];
    }
  }

 private:
  std::uint64_t key_of(const double* x) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < dim_; ++i) {
      h ^= std::uint64_t((long long)(std::floor(x[i] / r_)));
      h *= 1099511628211ull;
    }
    return h;
  }
  int dim_ = 0;
  double r_;
  std::vector<double> flat_;
  std::vector<double> lo_, hi_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

struct Target {
  const Point* center = nullptr;
  double radius = 0.0;
  const AtomHash* hash = nullptr;
  int d = 1;

  bool hit(const double* x) const {
    if (center) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const double dd = x[i] - (*center)[i];
        s += dd * dd;
      }
      return s <= radius * radius;
    }
    return hash->near(x, d);
  }
};

// Streaming Monte Carlo over Volterra paths on a uniform grid; counts trials
// whose path enters the target at some window time.
long long count_hits_grid(const VarianceProfile& profile,
                          const SimulationGrid& grid, int d,
                          const std::vector<int>& window, const Target& target,
                          long long n_trials, std::uint64_t seed) {
  const std::vector<double> w = weights_for(profile, grid);
  const bool brownian = weights_constant(w);
  const int n = grid.m + 1;

  const int n_blocks = std::max(1, std::min<int>(64, int(n_trials / 64 + 1)));
  std::vector<long long> counts(n_blocks, 0);
  parallel_for(n_blocks, [&](int blk) {
    const long long lo = n_trials * blk / n_blocks;
    const long long hi = n_trials * (blk + 1) / n_blocks;
    std::vector<double> vals;
    std::vector<double> x(d);
    std::vector<char> in_window;
    if (brownian) {
      in_window.assign(n, 0);
      for (int j : window) in_window[j] = 1;
    } else {
      vals.assign(std::size_t(n) * d, 0.0);
    }
    long long local = 0;
    for (long long trial = lo; trial < hi; ++trial) {
      bool hit = false;
      if (brownian) {
        std::vector<double> cur(d, 0.0);
        for (int j = 1; j <= grid.m && !hit; ++j) {
          for (int c = 0; c < d; ++c)
            cur[c] += w[1] * gauss_draw(seed, std::uint64_t(trial),
                                        std::uint32_t(c), std::uint64_t(j - 1));
          if (in_window[j]) hit = target.hit(cur.data());
        }
      } else {
        std::fill(vals.begin(), vals.end(), 0.0);
        for (int c = 0; c < d; ++c) {
          double* b = vals.data() + std::size_t(n) * c;
          for (int i = 0; i < grid.m; ++i) {
            const double zi = gauss_draw(seed, std::uint64_t(trial),
                                         std::uint32_t(c), std::uint64_t(i));
            const double* wp = w.data() + 1;
            double* bp = b + i + 1;
            const int len = grid.m - i;
            for (int k = 0; k < len; ++k) bp[k] += wp[k] * zi;
          }
        }
        for (int j : window) {
          for (int c = 0; c < d; ++c) x[c] = vals[std::size_t(n) * c + j];
          if (target.hit(x.data())) {
            hit = true;
            break;
          }
        }
      }
      if (hit) ++local;
    }
    counts[blk] = local;
  });
  long long total = 0;
  for (long long c : counts) total += c;
  return total;
}

std::vector<int> window_indices(const SimulationGrid& grid, double a, double b) {
  std::vector<int> idx;
  for (int j = 0; j <= grid.m; ++j) {
    const double t = grid.time(j);
    if (t >= a - 1e-12 && t <= b + 1e-12) idx.push_back(j);
  }
  return idx;
}

struct LineFit {
  double slope = 0.0, se = 0.0;
};

LineFit fit_loglog(const std::vector<std::pair<double, double>>& pts) {
  std::vector<double> x, y;
  for (auto [r, f] : pts)
    if (f > 0.0) {
      x.push_back(std::log(r));
      y.push_back(std::log(f));
    }
  LineFit out;
  if (x.size() < 2) return out;
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  out.slope = sxy / sxx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double resid = y[i] - my - out.slope * (x[i] - mx);
      ssr += resid * resid;
    }
    out.se = std::sqrt(ssr / double(n - 2) / sxx);
  }
  return out;
}

}  // namespace

SmallBallReport small_ball_probability(const VarianceProfile& profile, int d,
                                       double t, const Point& z,
                                       std::vector<double> radii,
                                       long long n_trials, std::uint64_t seed,
                                       int window_points) {
  if (int(z.size()) != d)
    throw std::invalid_argument("small_ball: z dimension != d");
  if (window_points < 8)
    throw std::runtime_error("small_ball: grid too coarse to resolve the ball");
  std::sort(radii.begin(), radii.end(), std::greater<double>());
  const double gmax = gamma_eval(profile, profile.domain_max);

  SmallBallReport rep;
  std::vector<std::pair<double, double>> pts;
  // one experiment per radius: B_delta(t, r) sampled by window_points equally
  // spaced times. The discrete sup reaches the continuum chaining sup only
  // when log(window_points) ~ gamma^{-1}-entropy of the ball, so sub-Holder
  // profiles need dense windows and moderate radii.
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    if (!(r > 0.0) || r >= gmax)
      throw std::invalid_argument("small_ball: radius outside (0, gamma_max)");
    const double w = std::exp(gamma_inverse_logx(profile, r));
    if (w < 1e-300)
      throw std::runtime_error("small_ball: radius below float resolution");
    const int n = window_points | 1;  // odd: includes the center t
    TimeSet ts;
    ts.t0 = t - w;
    ts.gaps.assign(n - 1, 2.0 * w / (n - 1));
    ts.masses.assign(n, 1.0 / n);
    const Eigen::MatrixXd L =
        covariance_factor(volterra_covariance_gaps(profile, ts.t0, ts.gaps));

    const int n_blocks = std::max(1, std::min<int>(64, int(n_trials / 64 + 1)));
    std::vector<long long> counts(n_blocks, 0);
    parallel_for(n_blocks, [&](int blk) {
      const long long lo = n_trials * blk / n_blocks;
      const long long hi = n_trials * (blk + 1) / n_blocks;
      Eigen::MatrixXd vals(n, d);
      Eigen::VectorXd zvec(n);
      long long local = 0;
      for (long long trial = lo; trial < hi; ++trial) {
        for (int c = 0; c < d; ++c) {
          for (int i = 0; i < n; ++i)
            zvec[i] = gauss_draw(seed, std::uint64_t(trial), std::uint32_t(c),
                                 std::uint64_t(i));
          vals.col(c) = L * zvec;
        }
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          for (int c = 0; c < d; ++c) {
            const double dd = vals(i, c) - z[c];
            s += dd * dd;
          }
          if (s <= r * r) {
            ++local;
            break;
          }
        }
      }
      counts[blk] = local;
    });
    long long hits = 0;
    for (long long c : counts) hits += c;

    ResolutionPoint rp;
    rp.r = r;
    rp.mesh = 2.0 * w / (n - 1);
    rp.kappa_eff = r / gamma_eval(profile, rp.mesh);
    rp.ci = wilson_ci(hits, n_trials);
    rep.series.push_back(rp);
    pts.emplace_back(r, rp.ci.freq);
  }
  const LineFit f = fit_loglog(pts);
  rep.slope = f.slope;
  rep.slope_se = f.se;
  const double r0 = radii.front();
  const double bound0 = std::pow(r0 + f_gamma(profile, r0), double(d));
  rep.c2 = rep.series.front().ci.freq / bound0;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double b =
        rep.c2 * std::pow(radii[ri] + f_gamma(profile, radii[ri]), double(d));
    rep.bound_ratio.push_back(b > 0.0 ? rep.series[ri].ci.freq / b : 0.0);
  }
  return rep;
}

BinomialCI hitting_probability(const HittingExperiment& exp) {
  if (!(exp.a > 0.0 && exp.a < exp.b))
    throw std::invalid_argument("hitting: need 0 < a < b");
  SimulationGrid grid{0.0, exp.b, exp.m_grid};
  std::vector<int> window;
  if (exp.E) {
    for (const auto& p : exp.E->points) {
      const double t = p.at(0);
      if (t < exp.a - 1e-9 || t > exp.b + 1e-9)
        throw std::invalid_argument("hitting: E point outside [a,b]");
      window.push_back(std::clamp(int(std::lround(t / grid.mesh())), 0, grid.m));
    }
    std::sort(window.begin(), window.end());
    window.erase(std::unique(window.begin(), window.end()), window.end());
  } else {
    window = window_indices(grid, exp.a, exp.b);
  }

  Target target;
  target.d = exp.d;
  std::optional<AtomHash> hash;
  if (exp.ball_center) {
    target.center = &*exp.ball_center;
    target.radius = exp.ball_radius;
    if (int(exp.ball_center->size()) != exp.d)
      throw std::invalid_argument("hitting: ball center dimension != d");
  } else if (exp.F) {
    if (exp.F->dim() != exp.d)
      throw std::invalid_argument("hitting: F dimension != d");
    if (!(exp.proximity > 0.0))
      throw std::invalid_argument("hitting: proximity radius must be > 0");
    hash.emplace(exp.F->points, exp.proximity);
    target.hash = &*hash;
  } else {
    throw std::invalid_argument("hitting: no target given");
  }

  const long long hits = count_hits_grid(exp.profile, grid, exp.d, window,
                                         target, exp.n_trials, exp.seed);
  return wilson_ci(hits, exp.n_trials);
}

HitReport codimension_sweep(const VarianceProfile& profile, int d, double a,
                            double b, const Point& x0,
                            const std::vector<double>& radii,
                            std::uint64_t seed, const CodimSweepParams& params) {
  if (int(x0.size()) != d)
    throw std::invalid_argument("codimension_sweep: x0 dimension != d");
  double norm = 0.0;
  for (double v : x0) norm += v * v;
  norm = std::sqrt(norm);
  const double r_max = *std::max_element(radii.begin(), radii.end());
  if (norm < 4.0 * r_max)
    throw std::invalid_argument("codimension_sweep: need ||x0|| >= 4 r_max");

  HitReport rep;
  std::vector<std::pair<double, double>> pts;
  int k = 0;
  for (double r : radii) {
    const double h_tied = gamma_inverse(profile, std::min(
        r / params.kappa, gamma_eval(profile, profile.domain_max)));
    const double h = std::max(h_tied, b / params.m_cap);
    const int m = std::clamp(int(std::lround(b / h)), params.m_min, params.m_cap);
    SimulationGrid grid{0.0, b, m};
    Target target;
    target.d = d;
    target.center = &x0;
    target.radius = r;
    const long long hits =
        count_hits_grid(profile, grid, d, window_indices(grid, a, b), target,
                        params.n_trials, seed + std::uint64_t(1000 + k));
    ResolutionPoint rp;
    rp.r = r;
    rp.mesh = grid.mesh();
    rp.kappa_eff = r / gamma_eval(profile, grid.mesh());
    rp.ci = wilson_ci(hits, params.n_trials);
    rep.series.push_back(rp);
    pts.emplace_back(r, rp.ci.freq);
    if (hits == 0)
      rep.note += "zero hits at r=" + std::to_string(r) +
                  "; widen the ladder or increase trials. ";
    ++k;
  }
  const LineFit f = fit_loglog(pts);
  rep.fitted_exponent = f.slope;
  rep.fit_stderr = f.se;
  // expected (d - dim_delta(E)) clamped to [0, d] for an interval E
  const auto idx = estimate_indexes(
      profile, {1e-4 * profile.domain_max, 1e-5 * profile.domain_max,
                1e-6 * profile.domain_max});
  const double alpha = 0.5 * (idx.lower_index + idx.upper_index);
  const double dim_delta = alpha > 0.02 ? 1.0 / alpha : 1e9;
  rep.expected_exponent = std::clamp(double(d) - dim_delta, 0.0, double(d));
  return rep;
}

LndReport lnd_verify(const VarianceProfile& profile, double a, double b,
                     double band, int n_grid) {
  if (!(a > 0.0 && a < b))
    throw std::invalid_argument("lnd_verify: need 0 < a < b");
  std::vector<double> times(n_grid);
  for (int i = 0; i < n_grid; ++i)
    times[i] = a + (b - a) * double(i) / double(n_grid - 1);
  const Eigen::MatrixXd q = volterra_covariance_at(profile, times);
  const double dt = times[1] - times[0];
  const int band_cells = std::max(1, int(band * (b - a) / dt));
  return lnd_verify_cov(q, band_cells);
}

LndReport lnd_verify_cov(const Eigen::MatrixXd& cov, double band_cells) {
  LndReport rep;
  rep.min_ratio = 1e300;
  const int n = int(cov.rows());
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - int(band_cells)); j < i; ++j) {
      const double d2 = cov(i, i) + cov(j, j) - 2.0 * cov(i, j);
      if (!(d2 > 0.0) || !(cov(j, j) > 0.0)) continue;
      const double cv = cov(i, i) - cov(i, j) * cov(i, j) / cov(j, j);
      rep.min_ratio = std::min(rep.min_ratio, cv / d2);
    }
  rep.holds = rep.min_ratio >= 1e-3;
  return rep;
}

CriticalityReport criticality_experiment(const VarianceProfile& profile, int d,
                                         double a, double b, double alpha,
                                         double theta, double M,
                                         const std::vector<double>& radii,
                                         const std::vector<long long>& trials,
                                         std::uint64_t seed,
                                         const CodimSweepParams& params) {
  if (radii.size() != trials.size())
    throw std::invalid_argument("criticality: radii/trials size mismatch");
  CriticalityReport rep;
  rep.radii = radii;
  const double r_min = *std::min_element(radii.begin(), radii.end());

  // deepen each target until its leaf scale resolves the finest radius
  auto build_deep = [&](int which) {
    for (int depth = 2; depth <= 12; ++depth) {
      const auto pair =
          build_undecidable_pair(d, alpha, theta, SlowlyVarying{0.0}, M, depth);
      const double leaf = which == 0 ? pair.leaf_scale1 : pair.leaf_scale2;
      const std::size_t atoms =
          (which == 0 ? pair.f1 : pair.f2).points.size();
      if (leaf <= r_min / params.kappa || atoms * (1ull << d) > 800000) {
        (which == 0 ? rep.depth1 : rep.depth2) = depth;
        (which == 0 ? rep.leaf1 : rep.leaf2) = leaf;
        return which == 0 ? pair.f1 : pair.f2;
      }
    }
    throw std::runtime_error("criticality: could not refine the target");
  };
  const WeightedSet f1 = build_deep(0);
  const WeightedSet f2 = build_deep(1);

  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    const double h_tied = gamma_inverse(profile, std::min(
        r / params.kappa, gamma_eval(profile, profile.domain_max)));
    const double h = std::max(h_tied, b / params.m_cap);
    const int m = std::clamp(int(std::lround(b / h)), params.m_min, params.m_cap);
    for (int which = 0; which < 2; ++which) {
      HittingExperiment exp;
      exp.profile = profile;
      exp.d = d;
      exp.a = a;
      exp.b = b;
      exp.m_grid = m;
      exp.F = which == 0 ? f1 : f2;
      exp.proximity = r;
      exp.n_trials = trials[k];
      exp.seed = seed + 77 * k + std::uint64_t(which);
      const BinomialCI ci = hitting_probability(exp);
      ResolutionPoint rp;
      rp.r = r;
      rp.mesh = b / m;
      rp.kappa_eff = r / gamma_eval(profile, b / m);
      rp.ci = ci;
      (which == 0 ? rep.f1_series : rep.f2_series).push_back(rp);
    }
  }
  rep.f1_decaying = rep.f1_series.size() >= 2;
  for (std::size_t k = 1; k < rep.f1_series.size(); ++k)
    if (rep.f1_series[k].ci.freq >
        rep.decay_factor * rep.f1_series[k - 1].ci.freq)
      rep.f1_decaying = false;
  double fmin = 1e300, fmax = 0.0;
  for (const auto& rp : rep.f2_series) {
    fmin = std::min(fmin, rp.ci.freq);
    fmax = std::max(fmax, rp.ci.freq);
  }
  rep.f2_bounded = fmax > 0.0 && fmin / fmax >= rep.bounded_ratio;
  return rep;
}

std::vector<std::vector<Point>> simulate_clouds_at(const VarianceProfile& profile,
                                                   const TimeSet& times, int d,
                                                   int n_paths,
                                                   std::uint64_t seed) {
  const Eigen::MatrixXd L =
      covariance_factor(volterra_covariance_gaps(profile, times.t0, times.gaps));
  const int n = times.size();
  std::vector<std::vector<Point>> clouds(n_paths);
  parallel_for(n_paths, [&](int p) {
    Eigen::VectorXd z(n);
    clouds[p].assign(n, Point(d));
    for (int c = 0; c < d; ++c) {
      for (int i = 0; i < n; ++i)
        z[i] = gauss_draw(seed, std::uint64_t(p), std::uint32_t(c),
                          std::uint64_t(i));
      const Eigen::VectorXd v = L * z;
      for (int i = 0; i < n; ++i) clouds[p][i][c] = v[i];
    }
  });
  return clouds;
}

DimensionEstimate image_dimension_at(const VarianceProfile& profile,
                                     const TimeSet& times, int d, int n_paths,
                                     std::uint64_t seed,
                                     std::vector<double> radii) {
  const auto clouds = simulate_clouds_at(profile, times, d, n_paths, seed);
  const auto metric = MetricSpec::euclidean();
  if (radii.empty()) radii = auto_radii(clouds[0], metric, 12, 2.2);
  return aggregate_box_dimension(clouds, metric, radii);
}

}  // namespace fgp
