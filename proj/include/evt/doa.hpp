#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <cstdint>

namespace evt {

using RealFn = std::function<double(double)>;

// A distribution handed to the domain-of-attraction checks. `cdf` and
// `quantile` are required; everything else is optional and unlocks extra
// criteria or deeper tail probes. Callables must be safe to invoke
// concurrently.
struct CdfSpec {
  std::string name;
  RealFn cdf;
  RealFn quantile;           // generalized inverse on [0, 1]
  RealFn derivative;         // F'
  RealFn second_derivative;  // F''
  RealFn survival;           // 1 - F without cancellation
  RealFn tail_quantile;      // u -> F^{-1}(1 - u) without forming 1 - u
  double lep = -std::numeric_limits<double>::infinity();
  double uep = std::numeric_limits<double>::infinity();

  double sf(double x) const;
  double upper_quantile(double u) const;
  /// True when both survival and tail_quantile are supplied, which lets the
  /// probes go below the 1e-8 resolution of 1 - F.
  bool precise_tail() const { return bool(survival) && bool(tail_quantile); }
};

enum class Criterion { A11, A12, A13, A21, A22, A23, Lo86, B11, B12, B13 };
enum class Domain { Frechet, Gumbel, Weibull, Unclassified };

std::string_view to_string(Criterion c) noexcept;
std::string_view to_string(Domain d) noexcept;

struct ProbeRecord {
  double level;     // tail probability u at the probe
  double x;         // probe point on the data scale
  double estimate;  // limit quantity at this probe (exponent, ratio, ...)
  double spread;    // max deviation across the lambda / t probes
};

struct DoaVerdict {
  double gamma_hat = 0.0;
  Criterion criterion_used = Criterion::A11;
  double residual = std::numeric_limits<double>::infinity();
  Domain classified_domain = Domain::Unclassified;
  std::vector<ProbeRecord> trace;
};

// Limits are read off geometric probe grids. Tail levels below 1e-8 are only
// used for specs with precise_tail(); probes whose arithmetic degenerates
// (zero survival, overflow, unresolvable distance to uep) are dropped.
struct ProbeConfig {
  std::vector<double> tail_levels = {1e-2, 1e-3, 1e-4,  1e-5,  1e-6,  1e-7,
                                     1e-8, 1e-9, 1e-10, 1e-11, 1e-12, 1e-20,
                                     1e-40, 1e-80, 1e-160};
  /// When non-empty, these data-scale points replace tail_levels.
  std::vector<double> x_points;
  std::vector<double> lambdas = {2.0, 5.0, 10.0};
  std::vector<double> t_values = {-1.0, 0.5, 1.0, 2.0};
  /// A verdict is accepted when its residual is at most this value.
  double acceptance = 1e-2;
  /// Power criteria additionally need the exponent to move by less than
  /// this fraction of its size between the two deepest probes.
  double resolution = 0.25;
};

/// R(x, F): mean excess over x, computed as the tail integral of the
/// survival function divided by the survival at x.
double asymptotic_moment_R(const CdfSpec& spec, double x);

/// Evaluates a single criterion. Throws Errc::capability when the spec lacks
/// a callable the criterion needs and Errc::wrong_branch when the criterion
/// does not apply to the spec's upper endpoint.
DoaVerdict evaluate_criterion(const CdfSpec& spec, Criterion criterion,
                              const ProbeConfig& cfg = {});

DoaVerdict check_frechet(const CdfSpec& spec, const ProbeConfig& cfg = {});
DoaVerdict check_gumbel(const CdfSpec& spec, const ProbeConfig& cfg = {});
DoaVerdict check_weibull(const CdfSpec& spec, const ProbeConfig& cfg = {});

/// Runs the power-law checks for the spec's endpoint type, then the Gumbel
/// checks, and returns the accepted verdict with the smallest residual.
DoaVerdict classify_domain(const CdfSpec& spec, const ProbeConfig& cfg = {});

// Quantile representations inside the three domains. a_fn and ell_fn are the
// vanishing perturbations (empty means identically zero). For gamma == 0 the
// slowly varying s(u) is s_fn when given, otherwise c (1 + a(u)) exp(int_u^1
// ell(t)/t dt).
struct KaramataRep {
  double gamma = 0.0;
  double c = 1.0;
  RealFn a_fn;
  RealFn ell_fn;
  double uep = std::numeric_limits<double>::infinity();
  double d = 0.0;
  RealFn s_fn;
};

/// F^{-1}(1 - u) for u in (0, 1).
double karamata_quantile(const KaramataRep& rep, double u);
std::vector<double> karamata_sample(const KaramataRep& rep, std::size_t n,
                                    std::uint64_t seed);

/// Named specs: "exponential[:rate]", "pareto:alpha", "uniform", "normal",
/// "gpd:xi,beta", "lognormal:mu,sigma".
CdfSpec builtin_spec(std::string_view name);
/// One instance of each built-in family, as accepted by builtin_spec.
std::vector<std::string> builtin_spec_names();

}  // namespace evt
