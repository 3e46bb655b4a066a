#include "fgp/sets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fgp/rng.hpp"

namespace fgp {

void WeightedSet::validate() const {
  if (points.size() != masses.size())
    throw std::invalid_argument("WeightedSet: points/masses size mismatch");
  if (points.empty()) throw std::invalid_argument("WeightedSet: empty");
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("WeightedSet: negative mass");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("WeightedSet: masses must sum to 1");
  for (const auto& p : points)
    if (int(p.size()) != dim())
      throw std::invalid_argument("WeightedSet: ragged point dimensions");
}

double TimeSet::diff(int i, int j) const {
  if (i > j) std::swap(i, j);
  double s = 0.0;
  for (int k = i; k < j; ++k) s += gaps[k];
  return s;
}

std::vector<double> TimeSet::times() const {
  std::vector<double> t(size());
  t[0] = t0;
  for (int i = 1; i < size(); ++i) t[i] = t[i - 1] + gaps[i - 1];
  return t;
}

WeightedSet TimeSet::to_weighted(MetricSpec tag) const {
  WeightedSet w;
  const auto t = times();
  w.points.reserve(t.size());
  for (double x : t) w.points.push_back({x});
  w.masses = masses;
  w.metric_tag = std::move(tag);
  return w;
}

Eigen::MatrixXd delta_matrix(const TimeSet& ts, const VarianceProfile& profile) {
  const int n = ts.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      d(i, j) = d(j, i) = gamma_eval(profile, ts.diff(j, i));
  return d;
}

WeightedSet uniform_interval(double a, double b, int n_atoms) {
  if (!(a < b) || n_atoms < 1)
    throw std::invalid_argument("uniform_interval: need a < b and n >= 1");
  WeightedSet w;
  const double h = (b - a) / n_atoms;
  for (int i = 0; i < n_atoms; ++i) {
    w.points.push_back({a + (i + 0.5) * h});
    w.masses.push_back(1.0 / n_atoms);
  }
  w.construction = "uniform_interval";
  return w;
}

WeightedSet uniform_box(const std::vector<double>& lo,
                        const std::vector<double>& hi, int per_axis) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("uniform_box: bad bounds");
  std::vector<WeightedSet> axes;
  for (std::size_t i = 0; i < lo.size(); ++i)
    axes.push_back(uniform_interval(lo[i], hi[i], per_axis));
  WeightedSet w = product_measure(axes);
  w.construction = "uniform_box";
  return w;
}

WeightedSet singleton(Point p) {
  WeightedSet w;
  w.points.push_back(std::move(p));
  w.masses.push_back(1.0);
  w.construction = "singleton";
  return w;
}

WeightedSet product_measure(const std::vector<WeightedSet>& factors) {
  if (factors.empty()) throw std::invalid_argument("product_measure: no factors");
  std::size_t total = 1;
  for (const auto& f : factors) {
    f.validate();
    total *= f.points.size();
    if (total > 1000000)
      throw std::runtime_error(
          "product_measure: product exceeds 1e6 points; thin the factors");
  }
  WeightedSet out;
  out.points.assign(total, {});
  out.masses.assign(total, 1.0);
  std::size_t repeat = total;
  for (const auto& f : factors) {
    const std::size_t n = f.points.size();
    repeat /= n;
    for (std::size_t idx = 0; idx < total; ++idx) {
      const std::size_t which = (idx / repeat) % n;
      const auto& p = f.points[which];
      out.points[idx].insert(out.points[idx].end(), p.begin(), p.end());
      out.masses[idx] *= f.masses[which];
    }
  }
  out.construction = "product";
  return out;
}

WeightedSet affine_map(const WeightedSet& set, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("affine_map: need lo < hi");
  WeightedSet out = set;
  for (auto& p : out.points)
    for (auto& x : p) x = lo + (hi - lo) * x;
  out.construction += ";affine[" + std::to_string(lo) + "," +
                      std::to_string(hi) + "]";
  return out;
}

WeightedSet thin_to(const WeightedSet& set, int max_points, std::uint64_t seed) {
  set.validate();
  const int n = int(set.points.size());
  if (n <= max_points) return set;
  WeightedSet out;
  out.metric_tag = set.metric_tag;
  out.construction = set.construction + ";thinned";
  // systematic resampling over the cumulative masses
  const double u0 = uniform_draw(seed, 0, 0, 0);
  double cum = 0.0;
  int take = 0;
  int i = 0;
  for (int k = 0; k < max_points; ++k) {
    const double target = (k + u0) / max_points;
    while (cum + set.masses[i] < target && i < n - 1) {
      cum += set.masses[i];
      ++i;
    }
    out.points.push_back(set.points[i]);
    out.masses.push_back(1.0 / max_points);
    ++take;
  }
  (void)take;
  return out;
}

double ball_mass(const WeightedSet& set, const Point& center, double r) {
  double m = 0.0;
  for (std::size_t i = 0; i < set.points.size(); ++i)
    if (distance(set.metric_tag, set.points[i], center) <= r)
      m += set.masses[i];
  return m;
}

void write_set_csv(const WeightedSet& set, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_set_csv: cannot open " + path);
  const int d = set.dim();
  for (int i = 1; i <= d; ++i) os << "x" << i << ",";
  os << "mass\n";
  char buf[40];
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    for (double x : set.points[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      os << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", set.masses[i]);
    os << buf << "\n";
  }
}

WeightedSet read_set_csv(const std::string& path, MetricSpec tag) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_set_csv: cannot open " + path);
  WeightedSet w;
  w.metric_tag = std::move(tag);
  w.construction = "csv:" + path;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
    if (vals.size() < 2) throw std::runtime_error("read_set_csv: short row");
    w.masses.push_back(vals.back());
    vals.pop_back();
    w.points.push_back(std::move(vals));
  }
  w.validate();
  return w;
}

}  // namespace fgp
