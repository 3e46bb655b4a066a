#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fgp/profiles.hpp"

namespace fgp {

using Point = std::vector<double>;

enum class MetricKind { gamma_delta, euclidean, log_metric, empirical, product };

// Distance evaluator over one of the five metric families used here:
//   gamma_delta  delta(s,t) = gamma(|t-s|) on times
//   euclidean    ||x-y|| on R^n
//   log_metric   delta_log(s,t) = 1/log(1/|t-s|), extended by e|t-s| past 1/e
//   empirical    matrix lookup after snapping times to a grid
//   product      rho((s,x),(t,y)) = max(time(s,t), ||x-y||)
struct MetricSpec {
  MetricKind kind = MetricKind::euclidean;
  VarianceProfile profile;  // gamma_delta
  std::shared_ptr<const Eigen::MatrixXd> matrix;  // empirical
  std::shared_ptr<const std::vector<double>> grid_times;
  std::shared_ptr<const MetricSpec> time_part;  // product
  int space_dim = 0;                            // product

  static MetricSpec gamma_delta(VarianceProfile p);
  static MetricSpec euclidean();
  static MetricSpec log_metric();
  static MetricSpec empirical(Eigen::MatrixXd m, std::vector<double> times);
  static MetricSpec product(MetricSpec time_metric, int space_dim);

  // expected point dimension; 0 means any (euclidean)
  int point_dim() const;
};

double distance(const MetricSpec& metric, const Point& a, const Point& b);

// Per-axis box half-widths such that distance <= r implies coordinate-wise
// containment; empty when the metric has no usable cell geometry at r.
std::optional<std::vector<double>> cell_widths(const MetricSpec& metric,
                                               double r, int dim);

struct MetricAxiomReport {
  bool symmetric = true;
  bool identity = true;
  bool triangle = true;
  std::string notes;
};
// Randomized probe of the metric axioms on triples drawn from sample points.
MetricAxiomReport validate_metric(const MetricSpec& metric,
                                  const std::vector<Point>& sample,
                                  int n_triples, std::uint64_t seed);

struct GammaDyadicGrid {
  VarianceProfile profile;
  int level = 0;
  double t_end = 1.0;
  double cell_length = 0.0;  // gamma^{-1}(2^-n)
  long long count = 0;       // number of cells tiling [0, t_end]

  std::pair<double, double> interval(long long j) const;  // 1-based index
};
GammaDyadicGrid gamma_dyadic_cover(const VarianceProfile& profile, int level,
                                   double t_end);

// Greedy covering / packing counters; deterministic via lexicographic presort.
// covering: r-net size (valid cover, centers pairwise > r apart)
// packing:  greedy count of disjoint radius-r balls (centers pairwise > 2r)
long long covering_number(const std::vector<Point>& points,
                          const MetricSpec& metric, double r);
long long packing_number(const std::vector<Point>& points,
                         const MetricSpec& metric, double r);
// Greedy cover that also reports the chosen centers.
long long covering_number_centers(const std::vector<Point>& points,
                                  const MetricSpec& metric, double r,
                                  std::vector<std::size_t>* centers);

// Occupied cells of the axis grid with the given per-axis widths; the
// box-count analogue of the covering number, free of greedy-net drift.
long long occupied_cell_count(const std::vector<Point>& points,
                              const std::vector<double>& widths);

std::string to_record(const MetricSpec& m);
MetricSpec metric_from_record(const std::string& record);

}  // namespace fgp
