#include "fgp/cantor.hpp"

#include <cmath>
#include <stdexcept>

#include "fgp/rng.hpp"

namespace fgp {

double GaugeFunction::operator()(double r) const {
  if (custom) return custom(r);
  if (r <= 0.0) return 0.0;
  double v = std::pow(r, p);
  if (log_e_pow != 0.0) v *= std::pow(std::log(M_E / r), log_e_pow);
  if (ell_pow != 0.0) v *= std::pow(ell(r), ell_pow);
  return v;
}

GaugeFunction GaugeFunction::power(double s) { return GaugeFunction{s}; }

GaugeFunction GaugeFunction::phi_d_ell(double d, SlowlyVarying ell) {
  GaugeFunction g;
  g.p = d;
  g.ell = ell;
  g.ell_pow = d;
  return g;
}

GaugeFunction GaugeFunction::pseudo_plus(double d, double alpha, double theta,
                                         SlowlyVarying ell) {
  GaugeFunction g;
  g.p = d - alpha;
  g.log_e_pow = theta;
  g.ell = ell;
  g.ell_pow = d;
  return g;
}

GaugeFunction GaugeFunction::pseudo_minus(double d, double alpha, double theta) {
  GaugeFunction g;
  g.p = d - alpha;
  g.log_e_pow = -theta;
  return g;
}

GaugeFunction GaugeFunction::custom_fn(std::function<double(double)> f) {
  GaugeFunction g;
  g.custom = std::move(f);
  return g;
}

GaugeFunction GaugeFunction::root(double k) const {
  if (custom) {
    auto f = custom;
    return custom_fn([f, k](double r) { return std::pow(f(r), 1.0 / k); });
  }
  GaugeFunction g = *this;
  g.p /= k;
  g.log_e_pow /= k;
  g.ell_pow /= k;
  return g;
}

bool gauge_doubling_ok(const GaugeFunction& g, double r_min, double r_max) {
  if (!(r_min > 0.0 && r_min < r_max)) return false;
  double r = r_max;
  double prev = g(r);
  if (!(prev > 0.0) || !std::isfinite(prev)) return false;
  while (r > r_min) {
    const double half = g(0.5 * r);
    if (!(half > 0.0) || !(half < prev) || !(prev < 2.0 * half)) return false;
    prev = half;
    r *= 0.5;
  }
  return true;
}

namespace {

// D' with psi(D') = psi(D)/2, by bisection in log D'
double child_diameter(const GaugeFunction& g, double D) {
  const double target = g(D) / 2.0;
  double lo = std::log(D) - 745.0 + std::log(D) * 0.0;
  lo = std::max(lo, -745.0);
  double hi = std::log(D);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(std::exp(mid)) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  const double d = std::exp(0.5 * (lo + hi));
  if (!(d > 0.0) || d < 1e-300)
    throw std::runtime_error("cantor: depth beyond float resolution");
  return d;
}

int trailing_ones(unsigned long long v) {
  int n = 0;
  while (v & 1ull) {
    ++n;
    v >>= 1;
  }
  return n;
}

}  // namespace

CantorSet1D build_cantor_1d(const GaugeFunction& gauge, int depth,
                            double ambient_lo, double ambient_hi) {
  if (depth < 1 || depth > 24)
    throw std::invalid_argument("cantor: depth must be in [1, 24]");
  if (!(ambient_lo < ambient_hi))
    throw std::invalid_argument("cantor: bad ambient interval");
  const double D0 = ambient_hi - ambient_lo;

  CantorSet1D set;
  set.depth = depth;
  set.level_diams.push_back(D0);
  for (int k = 1; k <= depth; ++k)
    set.level_diams.push_back(child_diameter(gauge, set.level_diams.back()));

  if (!gauge_doubling_ok(gauge, set.level_diams.back(), D0))
    throw std::invalid_argument(
        "cantor: gauge fails the doubling/monotonicity probe");

  const unsigned long long n = 1ull << depth;
  const double leaf = set.level_diams[depth];
  set.leaves.t0 = ambient_lo + leaf / 2.0;
  set.leaves.masses.assign(n, 1.0 / double(n));
  set.leaves.gaps.resize(n - 1);
  // consecutive leaves i, i+1 share the ancestor at level depth-1-t where t
  // counts trailing ones of i; midpoint gap = D_j - 2 D_{j+1} + D_leaf
  for (unsigned long long i = 0; i + 1 < n; ++i) {
    const int j = depth - 1 - trailing_ones(i);
    set.leaves.gaps[i] =
        set.level_diams[j] - 2.0 * set.level_diams[j + 1] + leaf;
  }
  return set;
}

CantorSet1D build_gauge_cantor_structured(const GaugeFunction& gauge, int depth,
                                          const MetricSpec& metric,
                                          double ambient_lo, double ambient_hi) {
  GaugeFunction effective = gauge;
  if (metric.kind == MetricKind::gamma_delta) {
    const VarianceProfile prof = metric.profile;
    const GaugeFunction g = gauge;
    effective = GaugeFunction::custom_fn([prof, g](double rho) {
      if (rho <= 0.0) return 0.0;
      return g(gamma_eval(prof, std::min(rho, prof.domain_max)));
    });
  } else if (metric.kind == MetricKind::log_metric) {
    const GaugeFunction g = gauge;
    effective = GaugeFunction::custom_fn([g](double rho) {
      if (rho <= 0.0) return 0.0;
      const double d = rho >= 0.36787944117144233 ? M_E * rho
                                                  : 1.0 / std::log(1.0 / rho);
      return g(d);
    });
  } else if (metric.kind != MetricKind::euclidean) {
    throw std::invalid_argument(
        "build_gauge_cantor: metric must be euclidean, gamma_delta or log");
  }
  return build_cantor_1d(effective, depth, ambient_lo, ambient_hi);
}

CantorSet1D cantor_union_structured(const GaugeFunction& gauge, int depth,
                                    const MetricSpec& metric, int n_copies,
                                    double lo, double hi) {
  if (n_copies < 1)
    throw std::invalid_argument("cantor_union: need n_copies >= 1");
  // copies of width w separated by gaps of w/2
  const double w = (hi - lo) / (n_copies + 0.5 * (n_copies - 1));
  CantorSet1D out;
  for (int c = 0; c < n_copies; ++c) {
    const double base = lo + c * 1.5 * w;
    const CantorSet1D one =
        build_gauge_cantor_structured(gauge, depth, metric, base, base + w);
    if (c == 0) {
      out = one;
    } else {
      // bridge gap between the last leaf of the previous copy and the first
      // leaf of this one; leaf offsets within a copy are identical
      const double tree_span =
          one.leaves.diff(0, one.leaves.size() - 1);
      out.leaves.gaps.push_back(1.5 * w - tree_span);
      out.leaves.gaps.insert(out.leaves.gaps.end(), one.leaves.gaps.begin(),
                             one.leaves.gaps.end());
      out.leaves.masses.insert(out.leaves.masses.end(),
                               one.leaves.masses.begin(),
                               one.leaves.masses.end());
    }
  }
  for (auto& m : out.leaves.masses) m /= n_copies;
  return out;
}

WeightedSet build_gauge_cantor(const GaugeFunction& gauge, int depth,
                               const MetricSpec& metric, double ambient_lo,
                               double ambient_hi) {
  const CantorSet1D set =
      build_gauge_cantor_structured(gauge, depth, metric, ambient_lo, ambient_hi);
  WeightedSet w = set.leaves.to_weighted(metric);
  w.construction = "gauge_cantor;depth=" + std::to_string(depth);
  return w;
}

namespace {

RegularityReport regularity_from_probes(
    const std::vector<double>& radii, int n_centers,
    const std::function<double(int, double)>& mass_at,
    const std::function<double(double)>& gauge_at, double c_bound) {
  RegularityReport rep;
  rep.ratio_min = 1e300;
  rep.ratio_max = 0.0;
  for (double r : radii) {
    const double g = gauge_at(r);
    for (int c = 0; c < n_centers; ++c) {
      const double mu = mass_at(c, r);
      if (!(g > 0.0)) continue;
      const double ratio = mu / g;
      rep.ratio_min = std::min(rep.ratio_min, ratio);
      rep.ratio_max = std::max(rep.ratio_max, ratio);
      ++rep.n_probes;
    }
  }
  rep.holds = rep.n_probes > 0 && rep.ratio_min > 0.0 &&
              std::isfinite(rep.ratio_max) &&
              rep.ratio_max / rep.ratio_min <= c_bound;
  return rep;
}

}  // namespace

RegularityReport verify_ahlfors_regularity(const WeightedSet& set,
                                           const GaugeFunction& gauge,
                                           const std::vector<double>& radii,
                                           double c_bound, std::uint64_t seed) {
  set.validate();
  if (radii.empty())
    throw std::invalid_argument("verify_ahlfors_regularity: no radii");
  const int n_centers = std::max<int>(200 / int(radii.size()) + 1, 8);
  // centers drawn from the measure by inverse-cdf sampling
  std::vector<double> cdf(set.masses.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < set.masses.size(); ++i) {
    acc += set.masses[i];
    cdf[i] = acc;
  }
  std::vector<std::size_t> centers(n_centers);
  for (int c = 0; c < n_centers; ++c) {
    const double u = uniform_draw(seed, c, 0, 0) * acc;
    centers[c] = std::size_t(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (centers[c] >= set.points.size()) centers[c] = set.points.size() - 1;
  }
  return regularity_from_probes(
      radii, n_centers,
      [&](int c, double r) { return ball_mass(set, set.points[centers[c]], r); },
      [&](double r) { return gauge(r); }, c_bound);
}

RegularityReport verify_ahlfors_regularity(const CantorSet1D& set,
                                           const VarianceProfile& profile,
                                           const GaugeFunction& gauge,
                                           const std::vector<double>& radii,
                                           double c_bound, std::uint64_t seed) {
  const int n = set.leaves.size();
  const int n_centers = std::min(n, std::max<int>(200 / int(radii.size()) + 1, 8));
  std::vector<int> centers(n_centers);
  for (int c = 0; c < n_centers; ++c)
    centers[c] = int(uniform_draw(seed, c, 1, 0) * n) % n;
  // mass of the metric ball of radius r: |t - center| <= gamma^{-1}(r)
  auto mass_at = [&](int c, double r) {
    const int ci = centers[c];
    const double w = gamma_inverse(profile, std::min(r, gamma_eval(profile, profile.domain_max)));
    double m = set.leaves.masses[ci];
    for (int i = ci - 1; i >= 0; --i) {
      if (set.leaves.diff(i, ci) > w) break;
      m += set.leaves.masses[i];
    }
    for (int i = ci + 1; i < n; ++i) {
      if (set.leaves.diff(ci, i) > w) break;
      m += set.leaves.masses[i];
    }
    return m;
  };
  return regularity_from_probes(radii, n_centers, mass_at,
                                [&](double r) { return gauge(r); }, c_bound);
}

UndecidablePair build_undecidable_pair(int d, double alpha, double theta,
                                       SlowlyVarying ell, double M, int depth) {
  if (!(alpha > 0.0 && alpha < double(d)))
    throw std::invalid_argument("undecidable pair: need 0 < alpha < d");
  if (!(theta > 1.0))
    throw std::invalid_argument("undecidable pair: need theta > 1");
  UndecidablePair pair;
  pair.gauge1 = GaugeFunction::pseudo_plus(d, alpha, theta, ell);
  pair.gauge2 = GaugeFunction::pseudo_minus(d, alpha, theta);
  const GaugeFunction psi1 = pair.gauge1.root(double(d));
  const GaugeFunction psi2 = pair.gauge2.root(double(d));

  // the log modulations break doubling near r = 1; start the cascade below
  // the gauge's x0
  auto start_width = [](const GaugeFunction& g) {
    double w = 1.0;
    for (int it = 0; it < 24; ++it) {
      if (gauge_doubling_ok(g, w * 1e-9, w)) return w;
      w *= 0.5;
    }
    throw std::invalid_argument("undecidable pair: gauge never doubles");
  };
  const double w1_width = start_width(psi1);
  const double w2_width = start_width(psi2);
  CantorSet1D c1 = build_cantor_1d(psi1, depth, 0.0, w1_width);
  CantorSet1D c2 = build_cantor_1d(psi2, depth, 0.0, w2_width);
  // rescale each construction to [0,1] so the affine map fills [-M, M]^d
  c1.leaves.t0 /= w1_width;
  c2.leaves.t0 /= w2_width;
  for (auto& g : c1.leaves.gaps) g /= w1_width;
  for (auto& g : c2.leaves.gaps) g /= w2_width;
  pair.leaf_scale1 = c1.level_diams.back() / w1_width * 2.0 * M;
  pair.leaf_scale2 = c2.level_diams.back() / w2_width * 2.0 * M;

  const WeightedSet w1 = c1.leaves.to_weighted(MetricSpec::euclidean());
  const WeightedSet w2 = c2.leaves.to_weighted(MetricSpec::euclidean());
  pair.f1 = affine_map(product_measure(std::vector<WeightedSet>(d, w1)), -M, M);
  pair.f2 = affine_map(product_measure(std::vector<WeightedSet>(d, w2)), -M, M);
  pair.f1.construction = "undecidable_f1;theta=" + std::to_string(theta);
  pair.f2.construction = "undecidable_f2;theta=" + std::to_string(theta);
  return pair;
}

}  // namespace fgp
