#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fgp/metrics.hpp"

namespace fgp {

// Finite approximation of a Borel set carrying a probability measure.
struct WeightedSet {
  std::vector<Point> points;
  std::vector<double> masses;
  MetricSpec metric_tag = MetricSpec::euclidean();
  std::string construction;

  int dim() const { return points.empty() ? 0 : int(points[0].size()); }
  void validate() const;
};

// One-dimensional point set stored by gaps from t0 so that structure far
// below absolute double resolution (logBm-regular sets) survives. Pairwise
// differences are direct gap sums, never differences of absolute positions.
struct TimeSet {
  double t0 = 0.0;
  std::vector<double> gaps;  // gaps[i] = t_{i+1} - t_i, all > 0
  std::vector<double> masses;

  int size() const { return int(gaps.size()) + 1; }
  double diff(int i, int j) const;           // |t_j - t_i|
  std::vector<double> times() const;         // absolute positions (may collapse)
  WeightedSet to_weighted(MetricSpec tag) const;
};

// gamma(|t_i - t_j|) matrix from exact gap sums.
Eigen::MatrixXd delta_matrix(const TimeSet& ts, const VarianceProfile& profile);

WeightedSet uniform_interval(double a, double b, int n_atoms);
WeightedSet uniform_box(const std::vector<double>& lo,
                        const std::vector<double>& hi, int per_axis);
WeightedSet singleton(Point p);

// Cartesian product with product masses; capped at 1e6 points.
WeightedSet product_measure(const std::vector<WeightedSet>& factors);

// Affine image mapping ambient [0,1]^d onto the box [lo,hi]^d.
WeightedSet affine_map(const WeightedSet& set, double lo, double hi);

// Mass-preserving systematic thinning to at most max_points atoms.
WeightedSet thin_to(const WeightedSet& set, int max_points, std::uint64_t seed);

// Total mass within distance r of a center, in the tagged metric.
double ball_mass(const WeightedSet& set, const Point& center, double r);

void write_set_csv(const WeightedSet& set, const std::string& path);
WeightedSet read_set_csv(const std::string& path, MetricSpec tag);

}  // namespace fgp
