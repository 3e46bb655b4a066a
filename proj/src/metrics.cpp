#include "fgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fgp/rng.hpp"

namespace fgp {

MetricSpec MetricSpec::gamma_delta(VarianceProfile p) {
  MetricSpec m;
  m.kind = MetricKind::gamma_delta;
  m.profile = std::move(p);
  return m;
}

MetricSpec MetricSpec::euclidean() { return MetricSpec{}; }

MetricSpec MetricSpec::log_metric() {
  MetricSpec m;
  m.kind = MetricKind::log_metric;
  return m;
}

MetricSpec MetricSpec::empirical(Eigen::MatrixXd mat, std::vector<double> times) {
  if (mat.rows() != mat.cols() || std::size_t(mat.rows()) != times.size())
    throw std::invalid_argument("empirical metric: matrix/grid size mismatch");
  MetricSpec m;
  m.kind = MetricKind::empirical;
  m.matrix = std::make_shared<Eigen::MatrixXd>(std::move(mat));
  m.grid_times = std::make_shared<std::vector<double>>(std::move(times));
  return m;
}

MetricSpec MetricSpec::product(MetricSpec time_metric, int space_dim) {
  if (space_dim < 1)
    throw std::invalid_argument("product metric: space_dim must be >= 1");
  MetricSpec m;
  m.kind = MetricKind::product;
  m.time_part = std::make_shared<MetricSpec>(std::move(time_metric));
  m.space_dim = space_dim;
  return m;
}

int MetricSpec::point_dim() const {
  switch (kind) {
    case MetricKind::gamma_delta:
    case MetricKind::log_metric:
    case MetricKind::empirical:
      return 1;
    case MetricKind::product:
      return 1 + space_dim;
    case MetricKind::euclidean:
      return 0;
  }
  return 0;
}

namespace {

double log_metric_dist(double dt) {
  dt = std::abs(dt);
  if (dt == 0.0) return 0.0;
  if (dt >= 0.36787944117144233) return M_E * dt;  // linear extension past 1/e
  return 1.0 / std::log(1.0 / dt);
}

std::size_t snap_index(const std::vector<double>& grid, double t) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.begin()) return 0;
  if (it == grid.end()) return grid.size() - 1;
  const std::size_t hi = std::size_t(it - grid.begin());
  return (t - grid[hi - 1] <= grid[hi] - t) ? hi - 1 : hi;
}

double euclid(const Point& a, const Point& b, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double distance(const MetricSpec& metric, const Point& a, const Point& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("distance: point dimension mismatch");
  const int want = metric.point_dim();
  if (want > 0 && int(a.size()) != want)
    throw std::invalid_argument("distance: wrong dimension for this metric");
  switch (metric.kind) {
    case MetricKind::gamma_delta: {
      const double dt = std::abs(a[0] - b[0]);
      if (dt > metric.profile.domain_max * (1.0 + 1e-12))
        throw std::domain_error("gamma_delta: |t-s| beyond profile domain");
      return dt == 0.0 ? 0.0 : gamma_eval(metric.profile, dt);
    }
    case MetricKind::euclidean:
      return euclid(a, b, 0, a.size());
    case MetricKind::log_metric:
      return log_metric_dist(a[0] - b[0]);
    case MetricKind::empirical: {
      const auto& grid = *metric.grid_times;
      return (*metric.matrix)(snap_index(grid, a[0]), snap_index(grid, b[0]));
    }
    case MetricKind::product: {
      Point ta{a[0]}, tb{b[0]};
      const double dt = distance(*metric.time_part, ta, tb);
      return std::max(dt, euclid(a, b, 1, a.size()));
    }
  }
  return 0.0;
}

std::optional<std::vector<double>> cell_widths(const MetricSpec& metric,
                                               double r, int dim) {
  switch (metric.kind) {
    case MetricKind::gamma_delta: {
      if (r >= gamma_eval(metric.profile, metric.profile.domain_max))
        return std::vector<double>{metric.profile.domain_max};
      const double w = gamma_inverse(metric.profile, r);
      if (w < 1e-300) return std::nullopt;
      return std::vector<double>{w};
    }
    case MetricKind::euclidean:
      return std::vector<double>(std::size_t(dim), r);
    case MetricKind::log_metric: {
      const double w = r >= 1.0 ? r / M_E : std::exp(-1.0 / r);
      if (w < 1e-300) return std::nullopt;
      return std::vector<double>{w};
    }
    case MetricKind::empirical:
      return std::nullopt;
    case MetricKind::product: {
      auto tw = cell_widths(*metric.time_part, r, 1);
      if (!tw) return std::nullopt;
      std::vector<double> w{(*tw)[0]};
      w.insert(w.end(), std::size_t(metric.space_dim), r);
      return w;
    }
  }
  return std::nullopt;
}

MetricAxiomReport validate_metric(const MetricSpec& metric,
                                  const std::vector<Point>& sample,
                                  int n_triples, std::uint64_t seed) {
  MetricAxiomReport rep;
  if (sample.size() < 3) {
    rep.notes = "sample too small";
    return rep;
  }
  for (int t = 0; t < n_triples; ++t) {
    const auto pick = [&](int slot) -> const Point& {
      const double u = uniform_draw(seed, std::uint64_t(t), std::uint32_t(slot), 0);
      return sample[std::size_t(u * double(sample.size()))];
    };
    const Point& a = pick(0);
    const Point& b = pick(1);
    const Point& c = pick(2);
    const double dab = distance(metric, a, b);
    const double dba = distance(metric, b, a);
    const double dac = distance(metric, a, c);
    const double dcb = distance(metric, c, b);
    if (std::abs(dab - dba) > 1e-12 * (1.0 + dab)) rep.symmetric = false;
    if (distance(metric, a, a) != 0.0) rep.identity = false;
    if (dab > dac + dcb + 1e-12 * (1.0 + dab)) rep.triangle = false;
  }
  if (!rep.triangle)
    rep.notes += "triangle inequality violated on probe triples; ";
  if (!rep.symmetric) rep.notes += "asymmetry detected; ";
  if (!rep.identity) rep.notes += "nonzero self-distance; ";
  return rep;
}

GammaDyadicGrid gamma_dyadic_cover(const VarianceProfile& profile, int level,
                                   double t_end) {
  if (level < 0) throw std::invalid_argument("gamma_dyadic_cover: level < 0");
  const double target = std::pow(2.0, -level);
  if (target > gamma_eval(profile, profile.domain_max) * (1.0 + 1e-12))
    throw std::domain_error("gamma_dyadic_cover: 2^-n above gamma(domain_max)");
  GammaDyadicGrid g;
  g.profile = profile;
  g.level = level;
  g.t_end = t_end;
  g.cell_length = gamma_inverse(profile, target);
  if (g.cell_length < 1e-300 || t_end / g.cell_length > 4e9)
    throw std::runtime_error(
        "gamma_dyadic_cover: level too deep for float resolution");
  g.count = (long long)(std::ceil(t_end / g.cell_length - 1e-12));
  return g;
}

std::pair<double, double> GammaDyadicGrid::interval(long long j) const {
  if (j < 1 || j > count)
    throw std::invalid_argument("gamma-dyadic interval index out of range");
  return {(double(j) - 1.0) * cell_length,
          std::min(double(j) * cell_length, t_end)};
}

namespace {

// Greedy keep-if-farther-than-threshold scan over lexicographically sorted
// points; accelerated by a uniform cell hash when the metric admits one.
long long greedy_separated(const std::vector<Point>& points,
                           const MetricSpec& metric, double threshold,
                           std::vector<std::size_t>* kept_out) {
  if (points.empty()) return 0;
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a] < points[b];
  });

  const int dim = int(points[0].size());
  const auto widths = cell_widths(metric, threshold, dim);
  std::vector<std::size_t> kept;

  if (!widths) {
    for (std::size_t idx : order) {
      bool covered = false;
      for (auto it = kept.rbegin(); it != kept.rend(); ++it)
        if (distance(metric, points[idx], points[*it]) <= threshold) {
          covered = true;
          break;
        }
      if (!covered) kept.push_back(idx);
    }
  } else {
    struct KeyHash {
      std::size_t operator()(const std::vector<long long>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (long long v : k) {
          h ^= std::size_t(v);
          h *= 1099511628211ull;
        }
        return h;
      }
    };
    std::unordered_map<std::vector<long long>, std::vector<std::size_t>, KeyHash>
        cells;
    auto key_of = [&](const Point& p) {
      std::vector<long long> key(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        key[i] = (long long)(std::floor(p[i] / (*widths)[i]));
      return key;
    };
    std::vector<long long> nb(dim);
    for (std::size_t idx : order) {
      const auto key = key_of(points[idx]);
      bool covered = false;
      // scan the 3^dim neighborhood
      std::vector<int> off(dim, -1);
      while (!covered) {
        for (int i = 0; i < dim; ++i) nb[i] = key[i] + off[i];
        if (auto it = cells.find(nb); it != cells.end())
          for (std::size_t j : it->second)
            if (distance(metric, points[idx], points[j]) <= threshold) {
              covered = true;
              break;
            }
        int axis = 0;
        while (axis < dim && off[axis] == 1) off[axis++] = -1;
        if (axis == dim) break;
        ++off[axis];
      }
      if (!covered) {
        kept.push_back(idx);
        cells[key].push_back(idx);
      }
    }
  }
  if (kept_out) *kept_out = kept;
  return (long long)(kept.size());
}

}  // namespace

long long covering_number(const std::vector<Point>& points,
                          const MetricSpec& metric, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("covering_number: r must be > 0");
  return greedy_separated(points, metric, r, nullptr);
}

long long occupied_cell_count(const std::vector<Point>& points,
                              const std::vector<double>& widths) {
  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (long long v : k) {
        h ^= std::size_t(v);
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  std::unordered_map<std::vector<long long>, char, KeyHash> cells;
  std::vector<long long> key(widths.size());
  for (const auto& p : points) {
    for (std::size_t i = 0; i < widths.size(); ++i)
      key[i] = (long long)(std::floor(p[i] / widths[i]));
    cells.emplace(key, 1);
  }
  return (long long)(cells.size());
}

long long covering_number_centers(const std::vector<Point>& points,
                                  const MetricSpec& metric, double r,
                                  std::vector<std::size_t>* centers) {
  if (!(r > 0.0)) throw std::invalid_argument("covering_number: r must be > 0");
  return greedy_separated(points, metric, r, centers);
}

long long packing_number(const std::vector<Point>& points,
                         const MetricSpec& metric, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("packing_number: r must be > 0");
  return greedy_separated(points, metric, 2.0 * r, nullptr);
}

std::string to_record(const MetricSpec& m) {
  switch (m.kind) {
    case MetricKind::euclidean:
      return "kind=euclidean";
    case MetricKind::log_metric:
      return "kind=log_metric";
    case MetricKind::gamma_delta:
      return "kind=gamma_delta; " + to_record(m.profile);
    case MetricKind::product:
      return "kind=product; space_dim=" + std::to_string(m.space_dim) + "; " +
             to_record(*m.time_part);
    case MetricKind::empirical:
      throw std::invalid_argument("empirical metric is not serializable");
  }
  return {};
}

MetricSpec metric_from_record(const std::string& record) {
  const auto head = record.find("kind=");
  if (head == std::string::npos)
    throw std::invalid_argument("metric record: no kind");
  const auto end = record.find(';', head);
  const std::string kind = record.substr(head + 5, end == std::string::npos
                                                       ? std::string::npos
                                                       : end - head - 5);
  if (kind == "euclidean") return MetricSpec::euclidean();
  if (kind == "log_metric") return MetricSpec::log_metric();
  if (kind == "gamma_delta")
    return MetricSpec::gamma_delta(profile_from_record(record.substr(end + 1)));
  if (kind == "product") {
    const auto sd = record.find("space_dim=");
    if (sd == std::string::npos)
      throw std::invalid_argument("product metric record: no space_dim");
    const int dim = std::atoi(record.c_str() + sd + 10);
    const auto rest = record.find(';', sd);
    return MetricSpec::product(metric_from_record(record.substr(rest + 1)), dim);
  }
  throw std::invalid_argument("metric record: unknown kind " + kind);
}

}  // namespace fgp
