#include <doctest.h>

#include <cmath>

#include "fgp/cantor.hpp"

using namespace fgp;

namespace {

// Independent middle-thirds oracle: leaf midpoints and masses by direct
// ternary construction.
void ternary_cantor(int depth, std::vector<double>* mids) {
  std::vector<std::pair<double, double>> level{{0.0, 1.0}};
  for (int k = 0; k < depth; ++k) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : level) {
      const double third = (b - a) / 3.0;
      next.push_back({a, a + third});
      next.push_back({b - third, b});
    }
    level = std::move(next);
  }
  mids->clear();
  for (auto [a, b] : level) mids->push_back(0.5 * (a + b));
}

const double kCantorDim = std::log(2.0) / std::log(3.0);

}  // namespace

TEST_CASE("gauge psi = r^{log2/log3} reproduces the middle-thirds Cantor set") {
  const int depth = 8;
  const auto set = build_cantor_1d(GaugeFunction::power(kCantorDim), depth);
  std::vector<double> oracle;
  ternary_cantor(depth, &oracle);
  const auto got = set.leaves.times();
  REQUIRE(got.size() == oracle.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
  // level diameters are exact powers of three
  for (int k = 0; k <= depth; ++k)
    CHECK(set.level_diams[k] == doctest::Approx(std::pow(3.0, -k)).epsilon(1e-10));
}

TEST_CASE("mass conservation is exact at every level") {
  for (int depth : {4, 10}) {
    const auto set = build_cantor_1d(GaugeFunction::power(kCantorDim), depth);
    double total = 0.0;
    for (double m : set.leaves.masses) total += m;
    CHECK(total == 1.0);  // dyadic masses add exactly
  }
}

TEST_CASE("construction is deterministic") {
  const auto a = build_cantor_1d(GaugeFunction::power(0.5), 9);
  const auto b = build_cantor_1d(GaugeFunction::power(0.5), 9);
  CHECK(a.leaves.gaps == b.leaves.gaps);
  CHECK(a.leaves.t0 == b.leaves.t0);
}

TEST_CASE("ball-mass ratios against the gauge stay within [1/8, 8]") {
  const int depth = 10;
  const auto w = build_gauge_cantor(GaugeFunction::power(kCantorDim), depth,
                                    MetricSpec::euclidean());
  std::vector<double> radii;
  for (int j = 4; j <= 12; ++j) radii.push_back(std::pow(2.0, -j));
  const auto rep =
      verify_ahlfors_regularity(w, GaugeFunction::power(kCantorDim), radii, 64.0);
  CHECK(rep.holds);
  CHECK(rep.ratio_min >= 1.0 / 8.0);
  CHECK(rep.ratio_max <= 8.0);
  CHECK(rep.n_probes >= 200);
}

TEST_CASE("interval is 1-regular; Cantor set is not") {
  WeightedSet interval = uniform_interval(0.2, 0.8, 2048);
  interval.masses.assign(interval.masses.size(), 1.0 / 2048.0);
  std::vector<double> radii{0.002, 0.01, 0.05, 0.2};
  // length measure: mu(B(x,r)) ~ 2r/0.6, ratio against r^1 is ~3.3 throughout
  auto rep = verify_ahlfors_regularity(interval, GaugeFunction::power(1.0), radii);
  CHECK(rep.holds);

  const auto cantor = build_gauge_cantor(GaugeFunction::power(kCantorDim), 14,
                                         MetricSpec::euclidean());
  std::vector<double> radii2;
  for (int j = 2; j <= 20; ++j) radii2.push_back(std::pow(2.0, -j));
  rep = verify_ahlfors_regularity(cantor, GaugeFunction::power(1.0), radii2, 64.0);
  CHECK_FALSE(rep.holds);  // ratio r^{s-1} spans > 64 over 18 dyadic scales
}

TEST_CASE("interval under gamma_delta(power alpha) is 1/alpha-regular") {
  // consistent with dim_delta(E) = dim_euc(E)/alpha
  const auto prof = VarianceProfile::power(0.5);
  WeightedSet e = uniform_interval(0.0, 1.0, 4096);
  e.metric_tag = MetricSpec::gamma_delta(prof);
  std::vector<double> radii{0.05, 0.1, 0.2, 0.4};  // delta-radii
  const auto rep =
      verify_ahlfors_regularity(e, GaugeFunction::power(2.0), radii, 64.0);
  CHECK(rep.holds);
}

TEST_CASE("doubling violations and resolution limits are rejected") {
  CHECK_THROWS_AS(build_cantor_1d(GaugeFunction::power(1.2), 4),
                  std::invalid_argument);
  // log-metric structured build: depth 6 needs scales below double range
  const auto g = GaugeFunction::power(0.5);
  CHECK_THROWS_AS(
      build_gauge_cantor_structured(g, 7, MetricSpec::log_metric()),
      std::runtime_error);
  const auto ok = build_gauge_cantor_structured(g, 5, MetricSpec::log_metric());
  CHECK(ok.leaves.size() == 32);
  CHECK(ok.level_diams.back() > 0.0);
}

TEST_CASE("delta-structured set: regularity through exact gap sums") {
  // wide ambient keeps the doubly-exponential level scales inside the double
  // range: log(1/D_k) = 4^k log(1/D_0) for dim_delta = 1/2 at beta = 1
  const auto prof = VarianceProfile::logbm(1.0, 0.97);
  const auto metric = MetricSpec::gamma_delta(prof);
  const auto set =
      cantor_union_structured(GaugeFunction::power(0.5), 4, metric, 4, 0.02, 0.92);
  CHECK(set.leaves.size() == 64);
  // delta-radius probes: mass within B_delta(x, r) should scale like r^{1/2}
  const std::vector<double> radii{0.01, 0.02, 0.04, 0.08};
  const auto rep = verify_ahlfors_regularity(set, prof,
                                             GaugeFunction::power(0.5), radii, 64.0);
  CHECK(rep.holds);
  // pairwise structure below absolute resolution is preserved in the gaps
  const auto& ts = set.leaves;
  CHECK(ts.diff(0, 1) > 0.0);
  CHECK(ts.diff(0, 1) < 1e-40);  // sibling leaves at doubly-exponential depth
}

TEST_CASE("undecidable pair: gauges, scaling, and box counts") {
  const int d = 2;
  const auto pair =
      build_undecidable_pair(d, 1.0, 2.0, SlowlyVarying{0.0}, 1.0, 8);
  pair.f1.validate();
  pair.f2.validate();
  CHECK(pair.f1.dim() == d);
  CHECK(pair.f2.points.size() == (1u << 16));

  // mu_2 satisfies the pseudo-Ahlfors bound r^{d-alpha} log^{-theta}(e/r)
  // within a constant factor across probed scales (affine map absorbs one)
  std::vector<double> radii;
  for (int j = 3; j <= 9; ++j) radii.push_back(std::pow(2.0, -j));
  const auto rep2 = verify_ahlfors_regularity(pair.f2, pair.gauge2, radii, 64.0);
  CHECK(rep2.holds);
  const auto rep1 = verify_ahlfors_regularity(pair.f1, pair.gauge1, radii, 64.0);
  CHECK(rep1.holds);

  CHECK_THROWS_AS(build_undecidable_pair(2, 2.5, 2.0, SlowlyVarying{}, 1.0, 6),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_undecidable_pair(2, 1.0, 0.5, SlowlyVarying{}, 1.0, 6),
                  std::invalid_argument);
}
