#include "fgp/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fgp/parallel.hpp"

namespace fgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
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
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ssr += r * r;
    }
    f.slope_se = std::sqrt(ssr / double(n - 2) / sxx);
  }
  return f;
}

}  // namespace

DimensionEstimate box_dimension(const std::vector<Point>& cloud,
                                const MetricSpec& metric,
                                std::vector<double> radii) {
  if (radii.size() < 4)
    throw std::invalid_argument("box_dimension: need >= 4 radii");
  std::sort(radii.begin(), radii.end(), std::greater<double>());
  if (radii.front() / radii.back() < 100.0 * (1.0 - 1e-9))
    throw std::invalid_argument("box_dimension: ladder must span >= 2 decades");

  DimensionEstimate est;
  est.method = DimMethod::box_count;
  const int dim = cloud.empty() ? 1 : int(cloud[0].size());
  for (double r : radii) {
    // occupied-cell counts where the metric has a cell geometry; the greedy
    // net drifts between 2x and 1x of the optimal cover as r shrinks, which
    // tilts the fitted slope
    const auto widths = cell_widths(metric, r, dim);
    const double n = widths ? double(occupied_cell_count(cloud, *widths))
                            : double(covering_number(cloud, metric, r));
    est.counts.emplace_back(r, n);
  }

  // fit window: drop 15% extremes, saturated and under-resolved radii
  const std::size_t trim = std::size_t(0.15 * double(radii.size()));
  const double n_cap = std::max(3.0, double(cloud.size()) / 5.0);
  std::vector<double> lx, ly;
  double r_lo = kInf, r_hi = 0.0;
  for (std::size_t i = trim; i + trim < est.counts.size(); ++i) {
    const auto [r, cnt] = est.counts[i];
    if (cnt < 3.0 || cnt > n_cap) continue;
    lx.push_back(std::log(1.0 / r));
    ly.push_back(std::log(cnt));
    r_lo = std::min(r_lo, r);
    r_hi = std::max(r_hi, r);
  }
  if (lx.size() < 3)
    throw std::invalid_argument(
        "box_dimension: degenerate ladder after trimming (need more points "
        "or a wider radius range)");
  const LineFit f = fit_line(lx, ly);
  est.value = std::max(0.0, f.slope);
  est.stderr_ = f.slope_se;
  est.r_min = r_lo;
  est.r_max = r_hi;
  return est;
}

DimensionEstimate box_dimension(const WeightedSet& set,
                                std::vector<double> radii) {
  return box_dimension(set.points, set.metric_tag, std::move(radii));
}

std::vector<double> auto_radii(const std::vector<Point>& cloud,
                               const MetricSpec& metric, int count,
                               double decades) {
  if (cloud.size() < 2)
    throw std::invalid_argument("auto_radii: need >= 2 points");
  // diameter proxy from a far-point sweep
  std::size_t a = 0;
  double best = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    std::size_t far = a;
    best = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double d = distance(metric, cloud[a], cloud[i]);
      if (d > best) {
        best = d;
        far = i;
      }
    }
    a = far;
  }
  if (!(best > 0.0))
    throw std::invalid_argument("auto_radii: cloud has zero diameter");
  const double r_hi = best / 3.0;
  std::vector<double> radii(count);
  for (int i = 0; i < count; ++i)
    radii[i] = r_hi * std::pow(10.0, -decades * double(i) / double(count - 1));
  return radii;
}

DimensionEstimate aggregate_box_dimension(
    const std::vector<std::vector<Point>>& clouds, const MetricSpec& metric,
    const std::vector<double>& radii) {
  if (clouds.empty())
    throw std::invalid_argument("aggregate_box_dimension: no clouds");
  std::vector<double> values(clouds.size());
  std::vector<double> fit_ses(clouds.size());
  std::vector<int> failed(clouds.size(), 0);
  parallel_for(int(clouds.size()), [&](int i) {
    try {
      const DimensionEstimate e = box_dimension(clouds[i], metric, radii);
      values[i] = e.value;
      fit_ses[i] = e.stderr_;
    } catch (const std::exception&) {
      failed[i] = 1;
    }
  });
  std::vector<double> ok;
  double se_acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!failed[i]) {
      ok.push_back(values[i]);
      se_acc += fit_ses[i];
    }
  if (ok.empty())
    throw std::runtime_error("aggregate_box_dimension: all per-path fits failed");
  DimensionEstimate est;
  est.method = DimMethod::box_count;
  double mean = std::accumulate(ok.begin(), ok.end(), 0.0) / double(ok.size());
  est.value = mean;
  if (ok.size() >= 2) {
    // across-path spread, not the standard error of the mean
    double var = 0.0;
    for (double v : ok) var += (v - mean) * (v - mean);
    est.stderr_ = std::sqrt(var / double(ok.size() - 1));
  } else {
    est.stderr_ = se_acc;
  }
  est.r_min = *std::min_element(radii.begin(), radii.end());
  est.r_max = *std::max_element(radii.begin(), radii.end());
  for (double v : ok) est.counts.emplace_back(0.0, v);
  return est;
}

EnergyReport energy(const WeightedSet& measure, const MetricSpec& metric,
                    double beta) {
  measure.validate();
  EnergyReport rep;
  rep.beta = beta;
  rep.min_distance = kInf;
  double acc = 0.0;
  const std::size_t n = measure.points.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double d = distance(metric, measure.points[i], measure.points[j]);
      ++rep.pair_count;
      if (d <= 0.0) {
        rep.infinite = true;
        continue;
      }
      rep.min_distance = std::min(rep.min_distance, d);
      acc += 2.0 * measure.masses[i] * measure.masses[j] / std::pow(d, beta);
    }
  rep.value = rep.infinite && beta > 0.0 ? kInf : acc;
  return rep;
}

DimensionEstimate capacity_dimension(const WeightedSet& coarse,
                                     const WeightedSet& fine,
                                     const MetricSpec& metric,
                                     const std::vector<double>& betas,
                                     double blowup_threshold) {
  if (betas.size() < 5)
    throw std::invalid_argument("capacity_dimension: need >= 5 beta probes");
  std::vector<double> sorted = betas;
  std::sort(sorted.begin(), sorted.end());

  double h_c = 0.0, h_f = 0.0;
  DimensionEstimate est;
  est.method = DimMethod::energy_scan;
  std::vector<double> bx, gy;
  int n_divergent = 0;
  for (double beta : sorted) {
    const EnergyReport ec = energy(coarse, metric, beta);
    const EnergyReport ef = energy(fine, metric, beta);
    h_c = ec.min_distance;
    h_f = ef.min_distance;
    if (!(h_f < h_c))
      throw std::invalid_argument(
          "capacity_dimension: fine set must refine the coarse one");
    if (ec.infinite || ef.infinite) continue;
    const double ratio = ef.value / ec.value;
    const double g = std::log(ratio) / std::log(h_c / h_f);
    est.counts.emplace_back(beta, g);
    if (ratio > blowup_threshold) ++n_divergent;
    // qualify by a clear energy blow-up; finite-size drift sits below this
    if (ratio > 1.3) {
      bx.push_back(beta);
      gy.push_back(g);
    }
  }
  est.r_min = h_f;
  est.r_max = h_c;
  // growth must be non-decreasing in beta
  for (std::size_t i = 1; i < est.counts.size(); ++i)
    if (est.counts[i].second < est.counts[i - 1].second - 0.15) {
      est.inconclusive = true;
      est.note = "non-monotone energy growth diagnostics";
    }
  if (bx.size() < 2) {
    est.unbounded = true;
    est.value = sorted.back();
    est.note += est.note.empty() ? "" : "; ";
    est.note += "no energy blow-up up to beta_max";
    return est;
  }
  est.note += "divergent betas (ratio>" + std::to_string(blowup_threshold) +
              "): " + std::to_string(n_divergent);
  const LineFit f = fit_line(bx, gy);
  if (!(f.slope > 0.0)) {
    est.inconclusive = true;
    est.value = sorted.back();
    return est;
  }
  est.value = std::max(0.0, -f.intercept / f.slope);  // root of the growth line
  est.stderr_ = f.slope_se * std::abs(est.value / f.slope);
  return est;
}

namespace {

std::vector<int> snap_indices(const SimulationGrid& grid,
                              const WeightedSet& E) {
  std::vector<int> idx;
  idx.reserve(E.points.size());
  for (const auto& p : E.points) {
    const double t = p.at(0);
    int j = int(std::lround((t - grid.t_start) / grid.mesh()));
    j = std::clamp(j, 0, grid.m);
    idx.push_back(j);
  }
  return idx;
}

}  // namespace

DimensionEstimate image_dimension(const PathEnsemble& ensemble,
                                  const WeightedSet& E,
                                  std::vector<double> radii) {
  if (E.points.size() == 1) {
    DimensionEstimate zero;
    zero.note = "singleton time set; image is a point";
    return zero;
  }
  if (E.points.size() < 32)
    throw std::invalid_argument("image_dimension: E has fewer than 32 points");
  const auto idx = snap_indices(ensemble.grid, E);
  const int n = ensemble.grid.m + 1;
  std::vector<std::vector<Point>> clouds(ensemble.n_paths);
  for (int p = 0; p < ensemble.n_paths; ++p) {
    clouds[p].reserve(idx.size());
    for (int j : idx) {
      Point x(ensemble.d);
      for (int c = 0; c < ensemble.d; ++c)
        x[c] = ensemble.values[p][std::size_t(n) * c + j];
      clouds[p].push_back(std::move(x));
    }
  }
  const auto metric = MetricSpec::euclidean();
  if (radii.empty()) radii = auto_radii(clouds[0], metric);
  return aggregate_box_dimension(clouds, metric, radii);
}

DimensionEstimate graph_dimension(const PathEnsemble& ensemble,
                                  const WeightedSet& E,
                                  const VarianceProfile& profile,
                                  std::vector<double> radii) {
  if (E.points.size() < 32)
    throw std::invalid_argument("graph_dimension: E has fewer than 32 points");
  const auto idx = snap_indices(ensemble.grid, E);
  const int n = ensemble.grid.m + 1;
  std::vector<std::vector<Point>> clouds(ensemble.n_paths);
  for (int p = 0; p < ensemble.n_paths; ++p) {
    clouds[p].reserve(idx.size());
    for (int j : idx) {
      Point x(1 + ensemble.d);
      x[0] = ensemble.grid.time(j);
      for (int c = 0; c < ensemble.d; ++c)
        x[1 + c] = ensemble.values[p][std::size_t(n) * c + j];
      clouds[p].push_back(std::move(x));
    }
  }
  const auto metric =
      MetricSpec::product(MetricSpec::gamma_delta(profile), ensemble.d);
  if (radii.empty()) radii = auto_radii(clouds[0], metric);
  return aggregate_box_dimension(clouds, metric, radii);
}

PathEnsemble with_drift(const PathEnsemble& ensemble,
                        const VarianceProfile& profile, double coef) {
  PathEnsemble out = ensemble;
  const int n = ensemble.grid.m + 1;
  for (auto& row : out.values)
    for (int c = 0; c < ensemble.d; ++c)
      for (int j = 0; j < n; ++j)
        row[std::size_t(n) * c + j] +=
            coef * gamma_eval(profile, std::min(ensemble.grid.time(j),
                                                profile.domain_max));
  return out;
}

ProductDimReport product_dimension_check(const WeightedSet& E,
                                         const WeightedSet& F,
                                         const VarianceProfile& profile) {
  ProductDimReport rep;
  const auto delta = MetricSpec::gamma_delta(profile);

  std::vector<Point> epts = E.points;
  rep.e_part = box_dimension(epts, delta, auto_radii(epts, delta));
  if (F.points.size() == 1)
    rep.f_part.note = "singleton factor";
  else
    rep.f_part =
        box_dimension(F.points, MetricSpec::euclidean(),
                      auto_radii(F.points, MetricSpec::euclidean()));

  const WeightedSet fthin = thin_to(F, 900, 3);
  const int e_budget =
      std::max(600, int(400000 / std::max<std::size_t>(fthin.points.size(), 1)));
  const WeightedSet ethin = thin_to(E, e_budget, 2);
  std::vector<Point> prod;
  prod.reserve(ethin.points.size() * fthin.points.size());
  for (const auto& t : ethin.points)
    for (const auto& x : fthin.points) {
      Point p{t[0]};
      p.insert(p.end(), x.begin(), x.end());
      prod.push_back(std::move(p));
    }
  const auto rho = MetricSpec::product(delta, F.dim());
  rep.product = box_dimension(prod, rho, auto_radii(prod, rho, 12, 2.2));
  rep.discrepancy = rep.product.value - (rep.e_part.value + rep.f_part.value);
  return rep;
}

ContentEstimate hausdorff_content(const std::vector<Point>& points,
                                  const MetricSpec& metric,
                                  const GaugeFunction& gauge,
                                  std::vector<double> radii) {
  if (radii.empty()) throw std::invalid_argument("hausdorff_content: no radii");
  std::sort(radii.begin(), radii.end(), std::greater<double>());
  ContentEstimate est;
  est.value = kInf;
  for (double r : radii) {
    const double term =
        double(covering_number(points, metric, r)) * gauge(2.0 * r);
    est.series.emplace_back(r, term);
    est.value = std::min(est.value, term);
  }
  const double first = est.series.front().second;
  const double last = est.series.back().second;
  est.trend = last <= 0.5 * first
                  ? ContentTrend::decaying
                  : (last >= 2.0 * first ? ContentTrend::growing
                                         : ContentTrend::flat);
  return est;
}

}  // namespace fgp
