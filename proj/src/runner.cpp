#include "fgp/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

#include "fgp/dimension.hpp"
#include "fgp/hitting.hpp"
#include "fgp/io.hpp"
#include "fgp/kl.hpp"
#include "fgp/parallel.hpp"
#include "fgp/simulate.hpp"

namespace fs = std::filesystem;

namespace fgp {

namespace {

VarianceProfile profile_from_config(const Config& cfg) {
  if (cfg.has("profile.record"))
    return profile_from_record(cfg.require("profile.record"));
  const std::string kind = cfg.require("profile.kind");
  const double dm = cfg.num_or("profile.domain_max", 0.0);
  const double l = cfg.num_or("profile.l", 0.0);
  if (kind == "power")
    return VarianceProfile::power(cfg.num("profile.alpha"), dm > 0 ? dm : 1.0,
                                  l > 0 ? l : 1.0);
  if (kind == "logbm")
    return VarianceProfile::logbm(cfg.num("profile.beta"), dm > 0 ? dm : 0.3,
                                  l > 0 ? l : 2.0);
  if (kind == "stretched_exp")
    return VarianceProfile::stretched_exp(cfg.num("profile.q"),
                                          dm > 0 ? dm : 0.5, l > 0 ? l : 2.0);
  if (kind == "power_log")
    return VarianceProfile::power_log(cfg.num("profile.alpha"),
                                      cfg.num("profile.beta_log"), dm,
                                      l > 0 ? l : 2.0);
  throw std::invalid_argument("config: unknown profile.kind " + kind);
}

const char* verdict_name(Verdict v) {
  return v == Verdict::holds ? "holds"
                             : v == Verdict::fails ? "fails" : "inconclusive";
}

double verdict_code(Verdict v) {
  return v == Verdict::holds ? 1.0 : v == Verdict::fails ? 0.0 : -1.0;
}

struct RunContext {
  std::string id;
  std::string kind;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::vector<ResultRow> rows;
  std::vector<std::string> written;  // for cleanup on failure
  std::ostringstream provenance;

  void row(const std::string& quantity, double value, double se = 0.0,
           double aux1 = 0.0, double aux2 = 0.0) {
    rows.push_back({id, kind, quantity, value, se, aux1, aux2, seed});
  }
  std::string path(const std::string& name) const { return out_dir + "/" + name; }
  void wrote(const std::string& p) { written.push_back(p); }
};

void exec_simulate(const Config& cfg, RunContext& ctx) {
  const VarianceProfile profile = profile_from_config(cfg);
  SimulationGrid grid{0.0, cfg.num_or("grid.t_end", 1.0),
                      int(cfg.integer_or("grid.m", 256))};
  grid.validate();
  const int d = int(cfg.integer_or("simulate.d", 1));
  const int n_paths = int(cfg.integer_or("simulate.n_paths", 1000));
  const auto ens = volterra_simulate(profile, grid, d, n_paths, ctx.seed);

  double worst = 0.0;
  std::vector<std::vector<double>> var_series;
  for (int j = 1; j <= grid.m; ++j) {
    double acc = 0.0;
    for (int p = 0; p < n_paths; ++p) acc += ens.at(p, j, 0) * ens.at(p, j, 0);
    acc /= n_paths;
    const double g2 = gamma_sq(profile, grid.time(j));
    const double se = g2 * std::sqrt(2.0 / n_paths);
    worst = std::max(worst, std::abs(acc - g2) / se);
    var_series.push_back({grid.time(j), acc, g2});
  }
  ctx.row("var_dev_over_se_max", worst);
  if (n_paths >= 100) {
    const auto comm = verify_commensurability(ens, profile);
    ctx.row("l_hat", comm.l_hat, 0.0, comm.holds ? 1.0 : 0.0, profile.l_factor);
  }
  emit_plotdata(var_series, {"t", "var_hat", "gamma_sq"},
                ctx.path("variance.dat"));
  ctx.wrote(ctx.path("variance.dat"));
  if (cfg.get("simulate.export").value_or("fgp1") != "none") {
    write_fgp1(ens, ctx.path("ensemble.fgp1"));
    ctx.wrote(ctx.path("ensemble.fgp1"));
  }
  ctx.provenance << "provenance.var = ensemble second moment, "
                 << n_paths << " paths\n";
}

void exec_check_conditions(const Config& cfg, RunContext& ctx) {
  const VarianceProfile profile = profile_from_config(cfg);
  const auto c0 = check_condition(profile, ConditionId::C0);
  ctx.row("C0", c0.fitted_exponent, 0.0, 0.0, verdict_code(c0.verdict));
  std::vector<double> eps_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  if (cfg.has("conditions.eps_list"))
    eps_list = cfg.num_list("conditions.eps_list");
  for (double eps : eps_list) {
    ConditionParams prm;
    prm.eps = eps;
    const auto rep = check_condition(profile, ConditionId::C_eps, prm);
    ctx.row("C_eps", rep.fitted_exponent, 0.0, eps, verdict_code(rep.verdict));
  }
  ctx.row("eps_transition", condition_transition_eps(profile));
  const auto cp = check_condition(profile, ConditionId::C0_plus);
  ctx.row("C0_plus", cp.fitted_exponent, 0.0, 0.0, verdict_code(cp.verdict));
  const auto hyp2 = check_condition(profile, ConditionId::Hyp2);
  ctx.row("Hyp2", hyp2.fitted_exponent, 0.0, 0.0, verdict_code(hyp2.verdict));
  const auto conc = check_condition(profile, ConditionId::concavity);
  ctx.row("concavity", conc.fitted_exponent, 0.0, 0.0,
          verdict_code(conc.verdict));
  ctx.provenance << "provenance.conditions = slope of log I vs log gamma, "
                 << "deep-half ladder; " << c0.diagnostics << "\n";
  (void)verdict_name;
}

WeightedSet interval_set(const Config& cfg, const std::string& section) {
  const double a = cfg.num_or(section + ".a", 0.1);
  const double b = cfg.num_or(section + ".b", 1.0);
  const int atoms = int(cfg.integer_or(section + ".atoms", 2000));
  return uniform_interval(a, b, atoms);
}

void exec_dim_image(const Config& cfg, RunContext& ctx, bool graph) {
  const VarianceProfile profile = profile_from_config(cfg);
  SimulationGrid grid{0.0, cfg.num_or("grid.t_end", 1.0),
                      int(cfg.integer_or("grid.m", 4096))};
  grid.validate();
  const int d = int(cfg.integer_or("image.d", 1));
  const int n_paths = int(cfg.integer_or("image.n_paths", 200));
  const WeightedSet E = interval_set(cfg, "image");
  const auto ens = volterra_simulate(profile, grid, d, n_paths, ctx.seed);
  if (graph) {
    const auto est = graph_dimension(ens, E, profile);
    ctx.row("dim_graph", est.value, est.stderr_, est.r_min, est.r_max);
    const double coef = cfg.num_or("image.drift", 0.0);
    if (coef != 0.0) {
      const auto drifted = graph_dimension(with_drift(ens, profile, coef), E,
                                           profile);
      ctx.row("dim_graph_drifted", drifted.value, drifted.stderr_, coef,
              std::abs(drifted.value - est.value));
    }
    ctx.provenance << "provenance.dim_graph = box_count in rho_delta, window ["
                   << est.r_min << ", " << est.r_max << "]\n";
  } else {
    const auto est = image_dimension(ens, E);
    ctx.row("dim_image", est.value, est.stderr_, est.r_min, est.r_max);
    ctx.provenance << "provenance.dim_image = box_count euclidean, window ["
                   << est.r_min << ", " << est.r_max << "]\n";
  }
}

void exec_hit_prob(const Config& cfg, RunContext& ctx) {
  HittingExperiment exp;
  exp.profile = profile_from_config(cfg);
  exp.d = int(cfg.integer_or("hit.d", 1));
  exp.a = cfg.num_or("hit.a", 0.1);
  exp.b = cfg.num_or("hit.b", 1.0);
  exp.m_grid = int(cfg.integer_or("hit.m", 4096));
  exp.n_trials = cfg.integer_or("hit.trials", 10000);
  exp.seed = ctx.seed;
  std::vector<double> radii;
  if (cfg.has("hit.center")) {
    const auto c = cfg.num_list("hit.center");
    exp.ball_center = Point(c.begin(), c.end());
    radii = cfg.num_list("hit.radius");
  } else {
    exp.F = read_set_csv(cfg.require("hit.set_csv"), MetricSpec::euclidean());
    radii = cfg.num_list("hit.proximity");
  }
  std::vector<std::vector<double>> series;
  for (double r : radii) {
    if (exp.ball_center)
      exp.ball_radius = r;
    else
      exp.proximity = r;
    const auto ci = hitting_probability(exp);
    ctx.row("hit_freq", ci.freq, (ci.hi - ci.lo) / 4.0, ci.lo, ci.hi);
    series.push_back({r, ci.freq, ci.lo, ci.hi});
  }
  emit_plotdata(series, {"r", "freq", "lo", "hi"}, ctx.path("hit_series.dat"));
  ctx.wrote(ctx.path("hit_series.dat"));
  ctx.provenance << "provenance.hit_freq = grid proximity, m=" << exp.m_grid
                 << ", trials=" << exp.n_trials << "\n";
}

void exec_codim(const Config& cfg, RunContext& ctx) {
  const VarianceProfile profile = profile_from_config(cfg);
  const int d = int(cfg.integer_or("codim.d", 3));
  const auto x0v = cfg.num_list("codim.x0");
  CodimSweepParams prm;
  prm.n_trials = cfg.integer_or("codim.trials", 100000);
  prm.kappa = cfg.num_or("codim.kappa", 3.0);
  prm.m_cap = int(cfg.integer_or("codim.m_cap", 400000));
  const auto rep = codimension_sweep(
      profile, d, cfg.num_or("codim.a", 0.1), cfg.num_or("codim.b", 1.0),
      Point(x0v.begin(), x0v.end()), cfg.num_list("codim.radii"), ctx.seed, prm);
  ctx.row("codim_slope", rep.fitted_exponent, rep.fit_stderr);
  ctx.row("codim_expected", rep.expected_exponent);
  std::vector<std::vector<double>> series;
  for (const auto& rp : rep.series) {
    series.push_back({rp.r, rp.ci.freq, rp.ci.lo, rp.ci.hi});
    ctx.row("hit_freq", rp.ci.freq, (rp.ci.hi - rp.ci.lo) / 4.0, rp.r,
            rp.kappa_eff);
  }
  emit_plotdata(series, {"r", "freq", "lo", "hi"}, ctx.path("codim_series.dat"));
  ctx.wrote(ctx.path("codim_series.dat"));
  if (!rep.note.empty()) ctx.provenance << "provenance.codim_note = " << rep.note << "\n";
  ctx.provenance << "provenance.codim = mesh tied gamma(h)=r/kappa, kappa="
                 << prm.kappa << ", trials=" << prm.n_trials << "\n";
}

GaugeFunction gauge_from_config(const Config& cfg) {
  const std::string kind = cfg.get("set.gauge").value_or("power");
  const SlowlyVarying ell{cfg.num_or("set.ell_log_power", 0.0)};
  if (kind == "power") return GaugeFunction::power(cfg.num("set.s"));
  if (kind == "pseudo_plus")
    return GaugeFunction::pseudo_plus(cfg.num("set.d"), cfg.num("set.alpha"),
                                      cfg.num("set.theta"), ell);
  if (kind == "pseudo_minus")
    return GaugeFunction::pseudo_minus(cfg.num("set.d"), cfg.num("set.alpha"),
                                       cfg.num("set.theta"));
  if (kind == "phi_d_ell")
    return GaugeFunction::phi_d_ell(cfg.num("set.d"), ell);
  throw std::invalid_argument("config: unknown set.gauge " + kind);
}

void exec_construct_set(const Config& cfg, RunContext& ctx) {
  const GaugeFunction gauge = gauge_from_config(cfg);
  const int depth = int(cfg.integer_or("set.depth", 10));
  const std::string metric_kind = cfg.get("set.metric").value_or("euclidean");
  MetricSpec metric = MetricSpec::euclidean();
  if (metric_kind == "gamma_delta")
    metric = MetricSpec::gamma_delta(profile_from_config(cfg));
  else if (metric_kind == "log_metric")
    metric = MetricSpec::log_metric();
  else if (metric_kind != "euclidean")
    throw std::invalid_argument("config: unknown set.metric " + metric_kind);

  const WeightedSet set = build_gauge_cantor(gauge, depth, metric);
  write_set_csv(set, ctx.path("set.csv"));
  ctx.wrote(ctx.path("set.csv"));

  std::vector<double> radii;
  for (int j = 3; j <= 3 + 8; ++j) radii.push_back(std::pow(2.0, -j));
  const auto reg = verify_ahlfors_regularity(set, gauge, radii);
  ctx.row("ad_ratio_min", reg.ratio_min, 0.0, 0.0, reg.holds ? 1.0 : 0.0);
  ctx.row("ad_ratio_max", reg.ratio_max, 0.0, 0.0, reg.holds ? 1.0 : 0.0);
  if (metric.kind == MetricKind::euclidean) {
    std::vector<double> ladder;
    for (int j = 2; j <= 14; ++j) ladder.push_back(std::pow(2.0, -j));
    const auto box = box_dimension(set, ladder);
    ctx.row("box_dim", box.value, box.stderr_, box.r_min, box.r_max);
    std::vector<std::vector<double>> counts;
    for (auto [r, nn] : box.counts) counts.push_back({r, nn});
    emit_plotdata(counts, {"r", "N"}, ctx.path("counts.dat"));
    ctx.wrote(ctx.path("counts.dat"));
  }
  ctx.provenance << "provenance.set = gauge cantor depth " << depth << "\n";
}

void exec_criticality(const Config& cfg, RunContext& ctx) {
  const VarianceProfile profile = profile_from_config(cfg);
  const int d = int(cfg.integer_or("criticality.d", 3));
  std::vector<int> depths;
  for (double v : cfg.num_list("criticality.depths")) depths.push_back(int(v));
  std::vector<long long> trials;
  for (double v : cfg.num_list("criticality.trials"))
    trials.push_back((long long)(v));
  CodimSweepParams prm;
  prm.m_cap = int(cfg.integer_or("criticality.m_cap", 100000));
  const auto rep = criticality_experiment(
      profile, d, cfg.num_or("criticality.a", 0.1),
      cfg.num_or("criticality.b", 1.0), cfg.num("criticality.alpha"),
      cfg.num_or("criticality.theta", 2.0), cfg.num_or("criticality.M", 0.75),
      depths, trials, ctx.seed, prm);
  for (std::size_t k = 0; k < rep.depths.size(); ++k) {
    ctx.row("f1_freq", rep.f1_series[k].ci.freq, 0.0, rep.depths[k],
            rep.f1_series[k].r);
    ctx.row("f2_freq", rep.f2_series[k].ci.freq, 0.0, rep.depths[k],
            rep.f2_series[k].r);
  }
  ctx.row("f1_decaying", rep.f1_decaying ? 1.0 : 0.0, 0.0, rep.decay_factor);
  ctx.row("f2_bounded", rep.f2_bounded ? 1.0 : 0.0, 0.0, rep.bounded_ratio);
  ctx.row("conjecture", 0.0, 0.0, 0.0, 0.0);  // exploratory only, never asserted
  std::vector<std::vector<double>> s1, s2;
  for (std::size_t k = 0; k < rep.depths.size(); ++k) {
    s1.push_back({rep.f1_series[k].r, rep.f1_series[k].ci.freq,
                  rep.f1_series[k].ci.lo, rep.f1_series[k].ci.hi});
    s2.push_back({rep.f2_series[k].r, rep.f2_series[k].ci.freq,
                  rep.f2_series[k].ci.lo, rep.f2_series[k].ci.hi});
  }
  emit_plotdata(s1, {"r", "freq", "lo", "hi"}, ctx.path("f1_series.dat"));
  ctx.wrote(ctx.path("f1_series.dat"));
  emit_plotdata(s2, {"r", "freq", "lo", "hi"}, ctx.path("f2_series.dat"));
  ctx.wrote(ctx.path("f2_series.dat"));
  ctx.provenance << "provenance.criticality = conjecture=true exploratory; "
                 << "proximity tied to target leaf scale\n";
}

}  // namespace

RunOutcome run_experiment(const Config& cfg, const std::string& output_dir,
                          std::optional<std::uint64_t> seed_override) {
  RunContext ctx;
  std::function<void()> body;
  // validation pass: everything referenced must parse before compute starts
  try {
    ctx.kind = cfg.require("experiment.kind");
    ctx.id = cfg.get("experiment.id").value_or(ctx.kind);
    ctx.seed = seed_override ? *seed_override
                             : std::uint64_t(cfg.integer_or("experiment.seed", 1));
    ctx.out_dir = output_dir;
    fs::create_directories(output_dir);

    if (ctx.kind == "simulate")
      body = [&] { exec_simulate(cfg, ctx); };
    else if (ctx.kind == "check_conditions")
      body = [&] { exec_check_conditions(cfg, ctx); };
    else if (ctx.kind == "dim_image")
      body = [&] { exec_dim_image(cfg, ctx, false); };
    else if (ctx.kind == "dim_graph")
      body = [&] { exec_dim_image(cfg, ctx, true); };
    else if (ctx.kind == "hit_prob")
      body = [&] { exec_hit_prob(cfg, ctx); };
    else if (ctx.kind == "codim_sweep")
      body = [&] { exec_codim(cfg, ctx); };
    else if (ctx.kind == "construct_set")
      body = [&] { exec_construct_set(cfg, ctx); };
    else if (ctx.kind == "criticality")
      body = [&] { exec_criticality(cfg, ctx); };
    else
      throw std::invalid_argument("config: unknown experiment.kind " + ctx.kind);

    // dry parse of the pieces every kind needs
    if (ctx.kind != "construct_set" || cfg.has("profile.kind") ||
        cfg.has("profile.record"))
      if (ctx.kind != "construct_set" ||
          cfg.get("set.metric").value_or("euclidean") == "gamma_delta")
        if (ctx.kind != "hit_prob" && ctx.kind != "construct_set")
          (void)profile_from_config(cfg);
  } catch (const std::exception& e) {
    return {2, std::string("validation failure: ") + e.what()};
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::invalid_argument& e) {
    for (const auto& p : ctx.written) std::remove(p.c_str());
    return {2, std::string("validation failure: ") + e.what()};
  } catch (const std::exception& e) {
    for (const auto& p : ctx.written) std::remove(p.c_str());
    return {3, std::string("numerical failure: ") + e.what()};
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  // manifest precedes results: results are valid only when both exist
  std::ostringstream manifest;
  char hashbuf[20];
  std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                (unsigned long long)(fnv1a(cfg.canonical())));
  manifest << "config_hash = " << hashbuf << "\n"
           << "library = " << kLibraryVersion << "\n"
           << "experiment_id = " << ctx.id << "\n"
           << "kind = " << ctx.kind << "\n"
           << "seed = " << ctx.seed << "\n"
           << "threads = " << worker_count() << "\n"
           << "wall_time_s = " << format_float(wall) << "\n"
           << ctx.provenance.str();
  try {
    write_text_file(ctx.path("manifest.txt"), manifest.str());
    ctx.wrote(ctx.path("manifest.txt"));
    write_text_file(ctx.path("results.csv"), results_csv(ctx.rows));
  } catch (const std::exception& e) {
    for (const auto& p : ctx.written) std::remove(p.c_str());
    return {3, std::string("output failure: ") + e.what()};
  }
  return {0, "ok"};
}

RunOutcome run_experiment_file(const std::string& config_path,
                               const std::string& output_dir,
                               std::optional<std::uint64_t> seed_override) {
  Config cfg;
  try {
    cfg = Config::parse_file(config_path);
  } catch (const std::exception& e) {
    return {2, std::string("validation failure: ") + e.what()};
  }
  return run_experiment(cfg, output_dir, seed_override);
}

}  // namespace fgp
