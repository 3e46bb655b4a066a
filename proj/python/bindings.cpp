#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fgp/config.hpp"
#include "fgp/dimension.hpp"
#include "fgp/hitting.hpp"
#include "fgp/kl.hpp"
#include "fgp/runner.hpp"

namespace py = pybind11;
using namespace fgp;

namespace {

py::array_t<double> ensemble_array(const PathEnsemble& e) {
  const int n = e.grid.m + 1;
  py::array_t<double> out({e.n_paths, e.d, n});
  auto buf = out.mutable_unchecked<3>();
  for (int p = 0; p < e.n_paths; ++p)
    for (int c = 0; c < e.d; ++c)
      for (int j = 0; j < n; ++j) buf(p, c, j) = e.at(p, j, c);
  return out;
}

}  // namespace

PYBIND11_MODULE(_fgp, m) {
  m.doc() = "Gaussian-process fractal geometry laboratory (C++ core)";
  m.attr("__version__") = kLibraryVersion;

  py::class_<VarianceProfile>(m, "VarianceProfile")
      .def_static("power", &VarianceProfile::power, py::arg("alpha"),
                  py::arg("domain_max") = 1.0, py::arg("l") = 1.0)
      .def_static("logbm", &VarianceProfile::logbm, py::arg("beta"),
                  py::arg("domain_max") = 0.3, py::arg("l") = 2.0)
      .def_static("stretched_exp", &VarianceProfile::stretched_exp,
                  py::arg("q"), py::arg("domain_max") = 0.5, py::arg("l") = 2.0)
      .def_static("power_log", &VarianceProfile::power_log, py::arg("alpha"),
                  py::arg("beta_log"), py::arg("domain_max") = 0.0,
                  py::arg("l") = 2.0)
      .def_static("tabulated", &VarianceProfile::tabulated, py::arg("x"),
                  py::arg("g"), py::arg("l") = 2.0)
      .def_readonly("domain_max", &VarianceProfile::domain_max)
      .def_readonly("l_factor", &VarianceProfile::l_factor)
      .def("__repr__", [](const VarianceProfile& p) { return to_record(p); });

  m.def("profile_from_record", &profile_from_record);
  m.def("to_record", py::overload_cast<const VarianceProfile&>(&to_record));
  m.def("profile_catalog", &profile_catalog);

  m.def("gamma_eval", &gamma_eval);
  m.def("gamma_inverse", &gamma_inverse);
  m.def("dgamma_squared", &dgamma_squared);
  m.def("chaining_integral", &chaining_integral, py::arg("profile"),
        py::arg("x"), py::arg("rel_tol") = 1e-5);
  m.def("f_gamma", &f_gamma, py::arg("profile"), py::arg("r"),
        py::arg("rel_tol") = 1e-5);
  m.def("modulus_phi", &modulus_phi, py::arg("profile"), py::arg("r"),
        py::arg("integrand_log_y") = true, py::arg("rel_tol") = 1e-5);

  py::class_<IndexEstimate>(m, "IndexEstimate")
      .def_readonly("lower_index", &IndexEstimate::lower_index)
      .def_readonly("upper_index", &IndexEstimate::upper_index)
      .def_readonly("slope_series", &IndexEstimate::slope_series);
  m.def("estimate_indexes", &estimate_indexes);

  py::enum_<ConditionId>(m, "ConditionId")
      .value("C0", ConditionId::C0)
      .value("C_eps", ConditionId::C_eps)
      .value("C_ell", ConditionId::C_ell)
      .value("C0_plus", ConditionId::C0_plus)
      .value("Hyp2", ConditionId::Hyp2)
      .value("concavity", ConditionId::concavity);
  py::enum_<Verdict>(m, "Verdict")
      .value("holds", Verdict::holds)
      .value("fails", Verdict::fails)
      .value("inconclusive", Verdict::inconclusive);
  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("verdict", &ConditionReport::verdict)
      .def_readonly("fitted_exponent", &ConditionReport::fitted_exponent)
      .def_readonly("diagnostics", &ConditionReport::diagnostics);
  m.def(
      "check_condition",
      [](const VarianceProfile& p, ConditionId id, double eps,
         double ell_log_power, double tol) {
        ConditionParams prm;
        prm.eps = eps;
        prm.ell = SlowlyVarying{ell_log_power};
        prm.tol = tol;
        return check_condition(p, id, prm);
      },
      py::arg("profile"), py::arg("condition"), py::arg("eps") = 0.0,
      py::arg("ell_log_power") = 0.0, py::arg("tol") = 0.05);
  m.def("condition_transition_eps", [](const VarianceProfile& p) {
    return condition_transition_eps(p);
  });

  py::class_<SimulationGrid>(m, "SimulationGrid")
      .def(py::init([](double t_end, int m) {
             return SimulationGrid{0.0, t_end, m};
           }),
           py::arg("t_end") = 1.0, py::arg("m") = 256)
      .def_readonly("t_end", &SimulationGrid::t_end)
      .def_readonly("m", &SimulationGrid::m)
      .def("mesh", &SimulationGrid::mesh);

  py::class_<PathEnsemble>(m, "PathEnsemble")
      .def_readonly("d", &PathEnsemble::d)
      .def_readonly("n_paths", &PathEnsemble::n_paths)
      .def_readonly("seed", &PathEnsemble::seed)
      .def_property_readonly("grid", [](const PathEnsemble& e) { return e.grid; })
      .def_property_readonly("values", &ensemble_array);

  m.def("volterra_simulate", &volterra_simulate, py::arg("profile"),
        py::arg("grid"), py::arg("d"), py::arg("n_paths"), py::arg("seed"));
  m.def("cholesky_simulate", &cholesky_simulate, py::arg("cov"), py::arg("grid"),
        py::arg("d"), py::arg("n_paths"), py::arg("seed"));
  m.def("volterra_covariance", &volterra_covariance);
  m.def("volterra_covariance_at", &volterra_covariance_at);
  m.def("empirical_delta", &empirical_delta);
  m.def("conditional_variance", &conditional_variance);
  m.def("write_fgp1", &write_fgp1);
  m.def("read_fgp1", &read_fgp1);

  py::class_<CommensurabilityReport>(m, "CommensurabilityReport")
      .def_readonly("l_hat", &CommensurabilityReport::l_hat)
      .def_readonly("holds", &CommensurabilityReport::holds);
  m.def("verify_commensurability", &verify_commensurability, py::arg("ensemble"),
        py::arg("profile"), py::arg("tol") = 0.15);

  py::class_<KLBasis>(m, "KLBasis")
      .def_readonly("eigenvalues", &KLBasis::eigenvalues)
      .def_readonly("eigenvectors", &KLBasis::eigenvectors)
      .def_readonly("quad_weights", &KLBasis::quad_weights)
      .def_readonly("k", &KLBasis::k);
  m.def("kl_decompose", &kl_decompose);
  m.def("kl_delta", &kl_delta);
  m.def("kl_simulate", &kl_simulate);
  m.def("kl_split_simulate", &kl_split_simulate);

  py::class_<MetricSpec>(m, "MetricSpec")
      .def_static("gamma_delta", &MetricSpec::gamma_delta)
      .def_static("euclidean", &MetricSpec::euclidean)
      .def_static("log_metric", &MetricSpec::log_metric)
      .def_static("empirical", &MetricSpec::empirical)
      .def_static("product", &MetricSpec::product)
      .def("__repr__", [](const MetricSpec& ms) {
        return ms.kind == MetricKind::empirical ? std::string("empirical")
                                                : to_record(ms);
      });
  m.def("distance", &distance);
  m.def("covering_number", &covering_number);
  m.def("packing_number", &packing_number);

  py::class_<GammaDyadicGrid>(m, "GammaDyadicGrid")
      .def_readonly("cell_length", &GammaDyadicGrid::cell_length)
      .def_readonly("count", &GammaDyadicGrid::count)
      .def("interval", &GammaDyadicGrid::interval);
  m.def("gamma_dyadic_cover", &gamma_dyadic_cover);

  py::class_<WeightedSet>(m, "WeightedSet")
      .def_readonly("points", &WeightedSet::points)
      .def_readonly("masses", &WeightedSet::masses)
      .def_readonly("construction", &WeightedSet::construction)
      .def("dim", &WeightedSet::dim);
  m.def("uniform_interval", &uniform_interval);
  m.def("uniform_box", &uniform_box);
  m.def("product_measure", &product_measure);
  m.def("affine_map", &affine_map);
  m.def("thin_to", &thin_to);
  m.def("ball_mass", &ball_mass);
  m.def("write_set_csv", &write_set_csv);
  m.def("read_set_csv", &read_set_csv);

  py::class_<GaugeFunction>(m, "GaugeFunction")
      .def_static("power", &GaugeFunction::power)
      .def_static("phi_d_ell",
                  [](double d, double lp) {
                    return GaugeFunction::phi_d_ell(d, SlowlyVarying{lp});
                  })
      .def_static("pseudo_plus",
                  [](double d, double a, double t, double lp) {
                    return GaugeFunction::pseudo_plus(d, a, t, SlowlyVarying{lp});
                  })
      .def_static("pseudo_minus", &GaugeFunction::pseudo_minus)
      .def("root", &GaugeFunction::root)
      .def("__call__", &GaugeFunction::operator());
  m.def("build_gauge_cantor", &build_gauge_cantor, py::arg("gauge"),
        py::arg("depth"), py::arg("metric"), py::arg("ambient_lo") = 0.0,
        py::arg("ambient_hi") = 1.0);

  py::class_<RegularityReport>(m, "RegularityReport")
      .def_readonly("ratio_min", &RegularityReport::ratio_min)
      .def_readonly("ratio_max", &RegularityReport::ratio_max)
      .def_readonly("holds", &RegularityReport::holds);
  m.def("verify_ahlfors_regularity",
        [](const WeightedSet& s, const GaugeFunction& g,
           const std::vector<double>& radii, double c_bound,
           std::uint64_t seed) {
          return verify_ahlfors_regularity(s, g, radii, c_bound, seed);
        },
        py::arg("set"), py::arg("gauge"), py::arg("radii"),
        py::arg("c_bound") = 64.0, py::arg("seed") = 1);

  py::class_<UndecidablePair>(m, "UndecidablePair")
      .def_readonly("f1", &UndecidablePair::f1)
      .def_readonly("f2", &UndecidablePair::f2)
      .def_readonly("leaf_scale1", &UndecidablePair::leaf_scale1)
      .def_readonly("leaf_scale2", &UndecidablePair::leaf_scale2);
  m.def(
      "build_undecidable_pair",
      [](int d, double alpha, double theta, double ell_log_power, double M,
         int depth) {
        return build_undecidable_pair(d, alpha, theta,
                                      SlowlyVarying{ell_log_power}, M, depth);
      },
      py::arg("d"), py::arg("alpha"), py::arg("theta"),
      py::arg("ell_log_power") = 0.0, py::arg("M") = 1.0, py::arg("depth") = 8);

  py::class_<DimensionEstimate>(m, "DimensionEstimate")
      .def_readonly("value", &DimensionEstimate::value)
      .def_readonly("stderr", &DimensionEstimate::stderr_)
      .def_readonly("r_min", &DimensionEstimate::r_min)
      .def_readonly("r_max", &DimensionEstimate::r_max)
      .def_readonly("counts", &DimensionEstimate::counts)
      .def_readonly("unbounded", &DimensionEstimate::unbounded)
      .def_readonly("note", &DimensionEstimate::note);
  m.def("box_dimension",
        [](const std::vector<Point>& cloud, const MetricSpec& metric,
           std::vector<double> radii) {
          return box_dimension(cloud, metric, std::move(radii));
        });
  m.def("auto_radii", &auto_radii, py::arg("cloud"), py::arg("metric"),
        py::arg("count") = 12, py::arg("decades") = 2.5);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("beta", &EnergyReport::beta)
      .def_readonly("value", &EnergyReport::value)
      .def_readonly("infinite", &EnergyReport::infinite)
      .def_readonly("pair_count", &EnergyReport::pair_count);
  m.def("energy", &energy);
  m.def("capacity_dimension", &capacity_dimension, py::arg("coarse"),
        py::arg("fine"), py::arg("metric"), py::arg("betas"),
        py::arg("blowup_threshold") = 2.5);

  m.def("image_dimension", &image_dimension, py::arg("ensemble"), py::arg("E"),
        py::arg("radii") = std::vector<double>{});
  m.def("graph_dimension", &graph_dimension, py::arg("ensemble"), py::arg("E"),
        py::arg("profile"), py::arg("radii") = std::vector<double>{});
  m.def("with_drift", &with_drift);

  py::class_<ProductDimReport>(m, "ProductDimReport")
      .def_readonly("product", &ProductDimReport::product)
      .def_readonly("e_part", &ProductDimReport::e_part)
      .def_readonly("f_part", &ProductDimReport::f_part)
      .def_readonly("discrepancy", &ProductDimReport::discrepancy);
  m.def("product_dimension_check", &product_dimension_check);

  py::class_<ContentEstimate>(m, "ContentEstimate")
      .def_readonly("value", &ContentEstimate::value)
      .def_readonly("series", &ContentEstimate::series)
      .def_property_readonly("trend", [](const ContentEstimate& c) {
        return c.trend == ContentTrend::decaying
                   ? "decaying"
                   : c.trend == ContentTrend::growing ? "growing" : "flat";
      });
  m.def("hausdorff_content", &hausdorff_content);

  py::class_<BinomialCI>(m, "BinomialCI")
      .def_readonly("freq", &BinomialCI::freq)
      .def_readonly("lo", &BinomialCI::lo)
      .def_readonly("hi", &BinomialCI::hi)
      .def_readonly("hits", &BinomialCI::hits)
      .def_readonly("trials", &BinomialCI::trials);
  py::class_<ResolutionPoint>(m, "ResolutionPoint")
      .def_readonly("r", &ResolutionPoint::r)
      .def_readonly("mesh", &ResolutionPoint::mesh)
      .def_readonly("kappa_eff", &ResolutionPoint::kappa_eff)
      .def_readonly("ci", &ResolutionPoint::ci);

  py::class_<SmallBallReport>(m, "SmallBallReport")
      .def_readonly("series", &SmallBallReport::series)
      .def_readonly("slope", &SmallBallReport::slope)
      .def_readonly("slope_se", &SmallBallReport::slope_se)
      .def_readonly("bound_ratio", &SmallBallReport::bound_ratio);
  m.def("small_ball_probability", &small_ball_probability, py::arg("profile"),
        py::arg("d"), py::arg("t"), py::arg("z"), py::arg("radii"),
        py::arg("n_trials"), py::arg("seed"), py::arg("window_points") = 257);

  py::class_<HittingExperiment>(m, "HittingExperiment")
      .def(py::init<>())
      .def_readwrite("profile", &HittingExperiment::profile)
      .def_readwrite("d", &HittingExperiment::d)
      .def_readwrite("a", &HittingExperiment::a)
      .def_readwrite("b", &HittingExperiment::b)
      .def_readwrite("m_grid", &HittingExperiment::m_grid)
      .def_readwrite("E", &HittingExperiment::E)
      .def_readwrite("ball_center", &HittingExperiment::ball_center)
      .def_readwrite("ball_radius", &HittingExperiment::ball_radius)
      .def_readwrite("F", &HittingExperiment::F)
      .def_readwrite("proximity", &HittingExperiment::proximity)
      .def_readwrite("n_trials", &HittingExperiment::n_trials)
      .def_readwrite("seed", &HittingExperiment::seed);
  m.def("hitting_probability", &hitting_probability);

  py::class_<HitReport>(m, "HitReport")
      .def_readonly("series", &HitReport::series)
      .def_readonly("fitted_exponent", &HitReport::fitted_exponent)
      .def_readonly("fit_stderr", &HitReport::fit_stderr)
      .def_readonly("expected_exponent", &HitReport::expected_exponent)
      .def_readonly("note", &HitReport::note);
  py::class_<CodimSweepParams>(m, "CodimSweepParams")
      .def(py::init<>())
      .def_readwrite("kappa", &CodimSweepParams::kappa)
      .def_readwrite("m_cap", &CodimSweepParams::m_cap)
      .def_readwrite("n_trials", &CodimSweepParams::n_trials);
  m.def("codimension_sweep", &codimension_sweep, py::arg("profile"),
        py::arg("d"), py::arg("a"), py::arg("b"), py::arg("x0"),
        py::arg("radii"), py::arg("seed"),
        py::arg("params") = CodimSweepParams{});

  py::class_<LndReport>(m, "LndReport")
      .def_readonly("min_ratio", &LndReport::min_ratio)
      .def_readonly("holds", &LndReport::holds);
  m.def("lnd_verify", &lnd_verify, py::arg("profile"), py::arg("a"),
        py::arg("b"), py::arg("band"), py::arg("n_grid") = 160);

  py::class_<CriticalityReport>(m, "CriticalityReport")
      .def_readonly("depths", &CriticalityReport::depths)
      .def_readonly("f1_series", &CriticalityReport::f1_series)
      .def_readonly("f2_series", &CriticalityReport::f2_series)
      .def_readonly("f1_decaying", &CriticalityReport::f1_decaying)
      .def_readonly("f2_bounded", &CriticalityReport::f2_bounded);
  m.def("criticality_experiment", &criticality_experiment, py::arg("profile"),
        py::arg("d"), py::arg("a"), py::arg("b"), py::arg("alpha"),
        py::arg("theta"), py::arg("M"), py::arg("depths"), py::arg("trials"),
        py::arg("seed"), py::arg("params") = CodimSweepParams{});

  m.def(
      "run_experiment",
      [](const std::string& config_path, const std::string& output_dir,
         std::optional<std::uint64_t> seed) {
        const RunOutcome out = run_experiment_file(config_path, output_dir, seed);
        return py::make_tuple(out.exit_code, out.message);
      },
      py::arg("config_path"), py::arg("output_dir"),
      py::arg("seed") = std::nullopt);
}
