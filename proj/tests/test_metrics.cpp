#include <doctest.h>

#include <cmath>
#include <random>

#include "fgp/metrics.hpp"
#include "fgp/sets.hpp"

using namespace fgp;

TEST_CASE("distance evaluators match the defining formulas") {
  const auto gd = MetricSpec::gamma_delta(VarianceProfile::power(0.5));
  CHECK(distance(gd, {0.0}, {0.25}) == doctest::Approx(0.5));
  CHECK(distance(gd, {0.3}, {0.3}) == 0.0);

  const auto lm = MetricSpec::log_metric();
  CHECK(distance(lm, {0.0}, {std::exp(-100.0)}) == doctest::Approx(0.01));

  const auto prod = MetricSpec::product(gd, 2);
  // delta part 0.3 (power 0.5 at dt=0.09), space part 0.4
  const Point a{0.0, 0.0, 0.0}, b{0.09, 0.4, 0.0};
  CHECK(distance(prod, a, b) == doctest::Approx(0.4));
  const Point c{0.09, 0.1, 0.0};
  CHECK(distance(prod, a, c) == doctest::Approx(0.3));

  CHECK_THROWS_AS(distance(MetricSpec::euclidean(), {0.0}, {0.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("metric axioms on random probe triples") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> times, cloud;
  for (int i = 0; i < 300; ++i) {
    times.push_back({u(gen)});
    cloud.push_back({u(gen), u(gen), u(gen)});
  }
  for (const auto& m :
       {MetricSpec::gamma_delta(VarianceProfile::power(0.5)),
        MetricSpec::log_metric()}) {
    const auto rep = validate_metric(m, times, 10000, 9);
    CHECK(rep.symmetric);
    CHECK(rep.identity);
    CHECK(rep.triangle);  // gamma concave near 0
  }
  const auto rep = validate_metric(MetricSpec::euclidean(), cloud, 10000, 9);
  CHECK(rep.symmetric);
  CHECK(rep.triangle);
}

TEST_CASE("product metric dominates both components") {
  const auto gd = MetricSpec::gamma_delta(VarianceProfile::power(0.4));
  const auto prod = MetricSpec::product(gd, 1);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Point a{u(gen), u(gen)}, b{u(gen), u(gen)};
    const double rho = distance(prod, a, b);
    CHECK(rho >= distance(gd, {a[0]}, {b[0]}) - 1e-15);
    CHECK(rho >= std::abs(a[1] - b[1]) - 1e-15);
  }
}

TEST_CASE("gamma-dyadic covers") {
  // Lipschitz scale: ordinary dyadic intervals
  const auto lip = gamma_dyadic_cover(VarianceProfile::power(1.0), 5, 1.0);
  CHECK(lip.cell_length == doctest::Approx(std::pow(2.0, -5)));
  CHECK(lip.count == 32);
  CHECK(lip.interval(1).first == 0.0);
  CHECK(lip.interval(32).second == doctest::Approx(1.0));

  // power 1/2 at level 4: gamma^{-1}(1/16) = 2^{-8}
  const auto sq = gamma_dyadic_cover(VarianceProfile::power(0.5), 4, 1.0);
  CHECK(sq.cell_length == doctest::Approx(std::pow(2.0, -8)));

  // logbm beta=1 level 3: cell length e^{-8}
  const auto lb = gamma_dyadic_cover(VarianceProfile::logbm(1.0, 0.3), 3, 0.3);
  CHECK(lb.cell_length == doctest::Approx(std::exp(-8.0)));

  // delta-diameter of each cell is 2^-n on the nose for the analytic delta
  const auto gd = MetricSpec::gamma_delta(VarianceProfile::power(0.5));
  const auto [a, b] = sq.interval(3);
  CHECK(distance(gd, {a}, {b}) == doctest::Approx(std::pow(2.0, -4)));

  CHECK_THROWS_AS(gamma_dyadic_cover(VarianceProfile::logbm(1.0, 0.3), 40, 0.3),
                  std::runtime_error);
}

TEST_CASE("covering and packing counters") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back({u(gen)});
  const auto euc = MetricSpec::euclidean();

  const long long n01 = covering_number(pts, euc, 0.1);
  CHECK(n01 >= 5);
  CHECK(n01 <= 10);

  CHECK(covering_number({{0.3}}, euc, 0.05) == 1);
  CHECK(packing_number({{0.3}}, euc, 0.05) == 1);
  CHECK(covering_number({}, euc, 0.1) == 0);

  // sandwich N(2r) <= P(r) <= N(r/2)
  std::vector<Point> cloud;
  for (int i = 0; i < 500; ++i) cloud.push_back({u(gen), u(gen)});
  for (double r : {0.02, 0.05, 0.1}) {
    const long long n2r = covering_number(cloud, euc, 2.0 * r);
    const long long pr = packing_number(cloud, euc, r);
    const long long nhalf = covering_number(cloud, euc, 0.5 * r);
    CHECK(n2r <= pr);
    CHECK(pr <= nhalf);
  }
}

TEST_CASE("cell-hash covering agrees with brute-force greedy") {
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 400; ++i) pts.push_back({u(gen), u(gen)});
  const auto euc = MetricSpec::euclidean();
  for (double r : {0.03, 0.1, 0.35}) {
    // reference: same scan order, no spatial hash
    std::vector<Point> sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Point> kept;
    for (const auto& p : sorted) {
      bool covered = false;
      for (const auto& q : kept) {
        double dx = p[0] - q[0], dy = p[1] - q[1];
        if (std::sqrt(dx * dx + dy * dy) <= r) {
          covered = true;
          break;
        }
      }
      if (!covered) kept.push_back(p);
    }
    CHECK(covering_number(pts, euc, r) == (long long)(kept.size()));
  }
}

TEST_CASE("metric records round-trip") {
  const auto gd = MetricSpec::gamma_delta(VarianceProfile::logbm(0.8));
  const auto r1 = metric_from_record(to_record(gd));
  CHECK(r1.kind == MetricKind::gamma_delta);
  CHECK(r1.profile.beta == doctest::Approx(0.8));

  const auto prod = MetricSpec::product(gd, 3);
  const auto r2 = metric_from_record(to_record(prod));
  CHECK(r2.kind == MetricKind::product);
  CHECK(r2.space_dim == 3);
  CHECK(r2.time_part->profile.beta == doctest::Approx(0.8));

  CHECK(metric_from_record("kind=euclidean").kind == MetricKind::euclidean);
  CHECK(metric_from_record("kind=log_metric").kind == MetricKind::log_metric);
}

TEST_CASE("weighted set plumbing") {
  const auto e = uniform_interval(0.1, 1.0, 64);
  e.validate();
  CHECK(e.points.size() == 64);

  const auto box = uniform_box({0.0, 0.0}, {1.0, 1.0}, 8);
  CHECK(box.points.size() == 64);
  box.validate();

  // product of two uniform 2-point measures: 4 points, masses 1/4
  const auto two = uniform_interval(0.0, 1.0, 2);
  const auto four = product_measure({two, two});
  CHECK(four.points.size() == 4);
  for (double m : four.masses) CHECK(m == doctest::Approx(0.25));

  // product with a singleton factor embeds the other factor
  const auto emb = product_measure({two, singleton({0.7})});
  CHECK(emb.points.size() == 2);
  CHECK(emb.points[0][1] == 0.7);

  const auto thin = thin_to(box, 16, 3);
  CHECK(thin.points.size() == 16);
  double total = 0.0;
  for (double m : thin.masses) total += m;
  CHECK(total == doctest::Approx(1.0));

  write_set_csv(four, "/tmp/fgp_set_test.csv");
  const auto back = read_set_csv("/tmp/fgp_set_test.csv", MetricSpec::euclidean());
  CHECK(back.points.size() == four.points.size());
  CHECK(back.points[1] == four.points[1]);
  std::remove("/tmp/fgp_set_test.csv");
}
