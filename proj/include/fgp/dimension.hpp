#pragma once

#include <string>
#include <vector>

#include "fgp/cantor.hpp"
#include "fgp/sets.hpp"
#include "fgp/simulate.hpp"

namespace fgp {

enum class DimMethod { box_count, energy_scan };

struct DimensionEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  DimMethod method = DimMethod::box_count;
  double r_min = 0.0, r_max = 0.0;  // fit window
  std::vector<std::pair<double, double>> counts;  // (r, N) or (beta, growth)
  bool unbounded = false;   // energy scan saw no divergence up to beta_max
  bool inconclusive = false;
  std::string note;
};

// Least-squares slope of log N(r) against log(1/r). The largest and smallest
// 15% of the ladder are discarded, as are saturated (N < 3) and
// under-resolved (N > points/10) radii.
DimensionEstimate box_dimension(const std::vector<Point>& cloud,
                                const MetricSpec& metric,
                                std::vector<double> radii);
DimensionEstimate box_dimension(const WeightedSet& set,
                                std::vector<double> radii);

// Geometric ladder from the cloud's diameter down ~2.5 decades.
std::vector<double> auto_radii(const std::vector<Point>& cloud,
                               const MetricSpec& metric, int count = 12,
                               double decades = 2.5);

// Pooled box fit across per-path clouds: mean value, spread/sqrt(n) stderr.
DimensionEstimate aggregate_box_dimension(
    const std::vector<std::vector<Point>>& clouds, const MetricSpec& metric,
    const std::vector<double>& radii);

struct EnergyReport {
  double beta = 0.0;
  double value = 0.0;
  bool infinite = false;     // coincident atoms at positive order
  long long pair_count = 0;
  double min_distance = 0.0;  // smallest positive pair distance (leaf scale)
};
EnergyReport energy(const WeightedSet& measure, const MetricSpec& metric,
                    double beta);

// Capacity-based dimension from a blow-up scan across one refinement step:
// growth g(beta) = log(E_fine/E_coarse)/log(h_coarse/h_fine); energies with
// ratio above blowup_threshold are flagged divergent and the transition is
// the root of the fitted growth line.
DimensionEstimate capacity_dimension(const WeightedSet& coarse,
                                     const WeightedSet& fine,
                                     const MetricSpec& metric,
                                     const std::vector<double>& betas,
                                     double blowup_threshold = 2.5);

// Euclidean box dimension of {X(t): t in E}, averaged across paths.
DimensionEstimate image_dimension(const PathEnsemble& ensemble,
                                  const WeightedSet& E,
                                  std::vector<double> radii = {});
// Box dimension of the graph {(t, X(t))} in the product metric rho_delta.
DimensionEstimate graph_dimension(const PathEnsemble& ensemble,
                                  const WeightedSet& E,
                                  const VarianceProfile& profile,
                                  std::vector<double> radii = {});

// Component-wise drift coef * gamma(t); Lipschitz in the canonical metric.
PathEnsemble with_drift(const PathEnsemble& ensemble,
                        const VarianceProfile& profile, double coef);

struct ProductDimReport {
  DimensionEstimate product;  // box dim of E x F under rho_delta
  DimensionEstimate e_part;   // box dim of E under gamma_delta
  DimensionEstimate f_part;   // box dim of F euclidean
  double discrepancy = 0.0;   // product - (e_part + f_part)
};
ProductDimReport product_dimension_check(const WeightedSet& E,
                                         const WeightedSet& F,
                                         const VarianceProfile& profile);

enum class ContentTrend { decaying, flat, growing };
struct ContentEstimate {
  double value = 0.0;  // min over the ladder of N(r) * gauge(2r)
  std::vector<std::pair<double, double>> series;
  ContentTrend trend = ContentTrend::flat;
};
ContentEstimate hausdorff_content(const std::vector<Point>& points,
                                  const MetricSpec& metric,
                                  const GaugeFunction& gauge,
                                  std::vector<double> radii);

}  // namespace fgp
