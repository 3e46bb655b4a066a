#pragma once

#include <functional>
#include <utility>

#include "fgp/sets.hpp"

namespace fgp {

// Gauge psi(r) = r^p * log(e/r)^log_e_pow * ell(r)^ell_pow, or a custom hook.
struct GaugeFunction {
  double p = 1.0;
  double log_e_pow = 0.0;
  SlowlyVarying ell{};
  double ell_pow = 0.0;
  std::function<double(double)> custom;

  double operator()(double r) const;

  static GaugeFunction power(double s);
  static GaugeFunction phi_d_ell(double d, SlowlyVarying ell);
  static GaugeFunction pseudo_plus(double d, double alpha, double theta,
                                   SlowlyVarying ell);
  static GaugeFunction pseudo_minus(double d, double alpha, double theta);
  static GaugeFunction custom_fn(std::function<double(double)> f);

  // psi^{1/k}; the one-dimensional factor of a k-fold product gauge.
  GaugeFunction root(double k) const;
};

// psi(2x) < 2 psi(x) and monotonicity, probed over [r_min, r_max].
bool gauge_doubling_ok(const GaugeFunction& g, double r_min, double r_max);

// Two-child subdivision: children of an interval of diameter D sit at its
// ends with diameter D' solving psi(D') = psi(D)/2 and half the mass.
// Reproduces the middle-thirds Cantor set for psi = r^{log2/log3}.
struct CantorSet1D {
  TimeSet leaves;
  std::vector<double> level_diams;  // D_0 .. D_depth
  int depth = 0;
};

CantorSet1D build_cantor_1d(const GaugeFunction& gauge, int depth,
                            double ambient_lo = 0.0, double ambient_hi = 1.0);

// Spec-facing wrapper. When the metric is gamma_delta or log_metric the gauge
// is interpreted for metric balls, i.e. the Euclidean construction runs with
// psi_eff(rho) = gauge(metric radius of the Euclidean ball rho).
WeightedSet build_gauge_cantor(const GaugeFunction& gauge, int depth,
                               const MetricSpec& metric, double ambient_lo = 0.0,
                               double ambient_hi = 1.0);
CantorSet1D build_gauge_cantor_structured(const GaugeFunction& gauge, int depth,
                                          const MetricSpec& metric,
                                          double ambient_lo = 0.0,
                                          double ambient_hi = 1.0);

// Union of n_copies translated copies of the depth-limited construction.
// Doubly-exponential metrics cap a single tree at ~16-32 leaves inside the
// double range; the union multiplies the point budget while keeping the
// ball-mass gauge within a factor n_copies.
CantorSet1D cantor_union_structured(const GaugeFunction& gauge, int depth,
                                    const MetricSpec& metric, int n_copies,
                                    double lo, double hi);

struct RegularityReport {
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  bool holds = false;
  int n_probes = 0;
};

// mu(B(x,r))/gauge(r) over >= 200 (center, radius) probes with centers drawn
// from the measure; holds iff the ratios are finite, nonzero, and spread by
// at most c_bound.
RegularityReport verify_ahlfors_regularity(const WeightedSet& set,
                                           const GaugeFunction& gauge,
                                           const std::vector<double>& radii,
                                           double c_bound = 64.0,
                                           std::uint64_t seed = 1);
// Same check through exact gap sums, for delta-structured time sets.
RegularityReport verify_ahlfors_regularity(const CantorSet1D& set,
                                           const VarianceProfile& profile,
                                           const GaugeFunction& gauge,
                                           const std::vector<double>& radii,
                                           double c_bound = 64.0,
                                           std::uint64_t seed = 1);

struct UndecidablePair {
  WeightedSet f1;  // zero phi-Hausdorff measure target
  WeightedSet f2;  // positive capacity target
  GaugeFunction gauge1, gauge2;  // d-dimensional ball-mass gauges
  double leaf_scale1 = 0.0, leaf_scale2 = 0.0;
};

// F1 from pseudo_plus, F2 from pseudo_minus, as d-fold products of the
// one-dimensional constructions, mapped into [-M, M]^d.
UndecidablePair build_undecidable_pair(int d, double alpha, double theta,
                                       SlowlyVarying ell, double M, int depth);

}  // namespace fgp
