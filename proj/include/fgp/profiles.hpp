#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fgp {

enum class ProfileKind { power, logbm, stretched_exp, power_log, custom_tabulated };

// Slowly varying modulation ell(y) = log^p(1/y) (p = 0 gives the constant 1).
struct SlowlyVarying {
  double log_power = 0.0;
  double operator()(double y) const;
};

// Standard-deviation function gamma: increasing on (0, domain_max], gamma(0)=0.
// l_factor is the commensurability constant of the induced canonical metric.
struct VarianceProfile {
  ProfileKind kind = ProfileKind::power;
  double alpha = 0.5;     // power, power_log
  double beta = 1.0;      // logbm
  double q = 0.5;         // stretched_exp
  double beta_log = 0.0;  // power_log
  double domain_max = 1.0;
  double l_factor = 1.0;
  std::vector<double> table_x, table_g;  // custom_tabulated, strictly increasing

  static VarianceProfile power(double alpha, double domain_max = 1.0,
                               double l = 1.0);
  static VarianceProfile logbm(double beta, double domain_max = 0.3,
                               double l = 2.0);
  static VarianceProfile stretched_exp(double q, double domain_max = 0.5,
                                       double l = 2.0);
  static VarianceProfile power_log(double alpha, double beta_log,
                                   double domain_max = 0.0, double l = 2.0);
  static VarianceProfile tabulated(std::vector<double> x, std::vector<double> g,
                                   double l = 2.0);

  void validate() const;
};

double gamma_eval(const VarianceProfile& p, double x);
// gamma at an argument given through its natural log; needed because chaining
// integrals reach arguments far below the smallest positive double.
double gamma_eval_logx(const VarianceProfile& p, double log_x);
double gamma_sq(const VarianceProfile& p, double x);
double gamma_inverse(const VarianceProfile& p, double v);
// log of gamma^{-1}(v); stays finite where the inverse itself underflows.
double gamma_inverse_logx(const VarianceProfile& p, double v);
// (gamma^2)'(x); returns +infinity at x=0 when the derivative diverges there.
double dgamma_squared(const VarianceProfile& p, double x);

// I(x) = int_0^{1/2} gamma(x y) dy / (y sqrt(log(1/y))), relative accuracy ~rel_tol.
double chaining_integral(const VarianceProfile& p, double x,
                         double rel_tol = 1e-5);
double chaining_integral_logx(const VarianceProfile& p, double log_x,
                              double rel_tol = 1e-5);
// f_gamma(r) = I(gamma^{-1}(sqrt(l) r)).
double f_gamma(const VarianceProfile& p, double r, double rel_tol = 1e-5);
// Phi_gamma(r) = gamma(r) sqrt(log(1/r)) + int_0^r gamma(y)/(y sqrt(log(1/y))) dy.
// integrand_log_y=false switches the integrand's log argument to log(1/r).
double modulus_phi(const VarianceProfile& p, double r,
                   bool integrand_log_y = true, double rel_tol = 1e-5);

struct IndexEstimate {
  double lower_index = 0.0;
  double upper_index = 0.0;
  std::vector<double> probe_scales;
  std::vector<std::pair<double, double>> slope_series;  // (x, x g'(x)/g(x))
};
IndexEstimate estimate_indexes(const VarianceProfile& p,
                               const std::vector<double>& probe_scales);

enum class ConditionId { C0, C_eps, C_ell, C0_plus, Hyp2, concavity };
enum class Verdict { holds, fails, inconclusive };

struct ConditionParams {
  double eps = 0.0;        // C_eps
  SlowlyVarying ell{};     // C_ell
  double tol = 0.05;
  std::vector<double> probe_scales;  // empty -> default geometric ladder
  double a = -1.0, b = -1.0;         // Hyp2 window; defaults from domain_max
};

struct ConditionReport {
  ConditionId condition_id = ConditionId::C0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> probe_scales;
  double fitted_exponent = 0.0;  // slope of log I(x) against log gamma(x)
  std::string diagnostics;
};

ConditionReport check_condition(const VarianceProfile& p, ConditionId id,
                                const ConditionParams& params = {});
// eps* = 1 - slope of log I vs log gamma: smallest eps for which (C_eps) holds.
double condition_transition_eps(const VarianceProfile& p,
                                std::vector<double> probe_scales = {});

std::string to_record(const VarianceProfile& p);
VarianceProfile profile_from_record(const std::string& record);

const char* kind_name(ProfileKind k);
std::string profile_catalog();

}  // namespace fgp
