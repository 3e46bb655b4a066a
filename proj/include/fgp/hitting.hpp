#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fgp/cantor.hpp"
#include "fgp/dimension.hpp"
#include "fgp/sets.hpp"
#include "fgp/simulate.hpp"

namespace fgp {

struct BinomialCI {
  double freq = 0.0;
  double lo = 0.0, hi = 0.0;  // Wilson 95%
  long long hits = 0, trials = 0;
};
BinomialCI wilson_ci(long long hits, long long trials);

struct ResolutionPoint {
  double r = 0.0;        // proximity radius
  double mesh = 0.0;     // grid mesh used
  double kappa_eff = 0.0;  // r / gamma(mesh); < kappa means under-resolved
  BinomialCI ci;
};

struct HitReport {
  std::vector<ResolutionPoint> series;
  double fitted_exponent = 0.0;
  double fit_stderr = 0.0;
  double expected_exponent = 0.0;
  std::string note;
};

// P{ inf_{s in B_delta(t,r)} ||X(s) - z|| <= r } by Monte Carlo on a dense
// window time set around t, sampled exactly through the Volterra covariance.
// Slope of log freq against log r is reported along with the
// c2 (r + f_gamma(r))^d comparison fitted at the largest radius.
struct SmallBallReport {
  std::vector<ResolutionPoint> series;
  double slope = 0.0, slope_se = 0.0;
  double c2 = 0.0;                      // fitted at the largest radius
  std::vector<double> bound_ratio;      // freq / (c2 (r+f_gamma)^d)
};
SmallBallReport small_ball_probability(const VarianceProfile& profile, int d,
                                       double t, const Point& z,
                                       std::vector<double> radii,
                                       long long n_trials, std::uint64_t seed,
                                       int window_points = 257);

// Monte Carlo hitting experiment: X on a uniform grid over [0, b], hit when
// some snapped E-time comes within r (Euclidean) of the target.
struct HittingExperiment {
  VarianceProfile profile;
  int d = 1;
  double a = 0.1, b = 1.0;  // E window; the paper's theorems need a > 0
  int m_grid = 512;
  std::optional<WeightedSet> E;  // defaults to all grid times in [a, b]
  // target: a ball or an atomic set
  std::optional<Point> ball_center;
  double ball_radius = 0.0;
  std::optional<WeightedSet> F;
  double proximity = 0.0;  // r for atomic targets
  long long n_trials = 10000;
  std::uint64_t seed = 1;
};
BinomialCI hitting_probability(const HittingExperiment& exp);

// log P{hit B(x0, r)} vs log r across a radius ladder with the mesh tied to
// the radius (gamma(h) = r/kappa, capped at m_cap); compared against
// (d - dim_delta(E)) clamped to [0, d].
struct CodimSweepParams {
  double kappa = 3.0;
  int m_cap = 400000;
  int m_min = 64;
  long long n_trials = 100000;
};
HitReport codimension_sweep(const VarianceProfile& profile, int d, double a,
                            double b, const Point& x0,
                            const std::vector<double>& radii,
                            std::uint64_t seed, const CodimSweepParams& params = {});

// Two-point LND: min over near-diagonal pairs of Var(X(t)|X(s)) / delta^2.
struct LndReport {
  double min_ratio = 0.0;
  bool holds = false;
};
LndReport lnd_verify(const VarianceProfile& profile, double a, double b,
                     double band, int n_grid = 160);
LndReport lnd_verify_cov(const Eigen::MatrixXd& cov, double band_cells);

// Hitting frequencies for both undecidable targets across a common
// proximity-radius ladder (mesh tied to each radius). The targets are built
// once, deep enough that their leaf scale resolves the finest radius. F1
// decays only logarithmically in r, so the ladder should take large
// log-steps.
struct CriticalityReport {
  std::vector<double> radii;
  int depth1 = 0, depth2 = 0;
  double leaf1 = 0.0, leaf2 = 0.0;
  std::vector<ResolutionPoint> f1_series, f2_series;
  bool f1_decaying = false;   // each step <= decay_factor x previous
  bool f2_bounded = false;    // min/max >= bounded_ratio
  double decay_factor = 0.8;
  double bounded_ratio = 0.3;
};
CriticalityReport criticality_experiment(const VarianceProfile& profile, int d,
                                         double a, double b, double alpha,
                                         double theta, double M,
                                         const std::vector<double>& radii,
                                         const std::vector<long long>& trials,
                                         std::uint64_t seed,
                                         const CodimSweepParams& params = {});

// Exact sampling clouds at a gap-structured time set (for image estimates of
// logBm-regular sets, where a uniform grid cannot resolve E).
std::vector<std::vector<Point>> simulate_clouds_at(const VarianceProfile& profile,
                                                   const TimeSet& times, int d,
                                                   int n_paths,
                                                   std::uint64_t seed);
DimensionEstimate image_dimension_at(const VarianceProfile& profile,
                                     const TimeSet& times, int d, int n_paths,
                                     std::uint64_t seed,
                                     std::vector<double> radii = {});

}  // namespace fgp
