#include "evt/doa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "evt/error.hpp"
#include "evt/quadrature.hpp"
#include "evt/rng.hpp"

namespace evt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCoarseFloor = 1e-8;  // 1 - F cannot resolve levels below this

struct Probe {
  double u;
  double x;
};

struct ProbeValue {
  double estimate;
  double spread;
};

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<Probe> make_probes(const CdfSpec& spec, const ProbeConfig& cfg) {
  std::vector<Probe> out;
  if (!cfg.x_points.empty()) {
    for (double x : cfg.x_points) out.push_back({spec.sf(x), x});
    return out;
  }
  const bool deep = spec.precise_tail();
  for (double u : cfg.tail_levels) {
    if (!(u > 0.0 && u < 1.0)) continue;
    if (u < kCoarseFloor * (1.0 - 1e-9) && !deep) continue;
    out.push_back({u, spec.upper_quantile(u)});
  }
  return out;
}

// Distance from x to a finite upper endpoint, or nullopt when it is too small
// to be resolved in double precision.
std::optional<double> resolvable_gap(const CdfSpec& spec, double x) {
  const double gap = spec.uep - x;
  if (!(gap > 1e-12 * std::max(1.0, std::abs(spec.uep)))) return std::nullopt;
  return gap;
}

// Least-squares slope through the origin of log(ratio) against log(lambda)
// plus the largest deviation of an individual exponent from that slope.
std::optional<ProbeValue> power_fit(const std::vector<double>& lambdas,
                                    const std::vector<double>& ratios) {
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!finite_positive(ratios[i])) return std::nullopt;
    const double lx = std::log(lambdas[i]);
    sxy += lx * std::log(ratios[i]);
    sxx += lx * lx;
  }
  if (sxx == 0.0) return std::nullopt;
  const double slope = sxy / sxx;
  double spread = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double e = std::log(ratios[i]) / std::log(lambdas[i]);
    spread = std::max(spread, std::abs(e - slope));
  }
  return ProbeValue{slope, spread};
}

void require(const RealFn& fn, const char* field, Criterion c) {
  if (!fn) {
    throw Error(Errc::capability, std::string("criterion ") +
                                      std::string(to_string(c)) +
                                      " needs the spec field '" + field + "'");
  }
}

bool is_power(Criterion c) {
  switch (c) {
    case Criterion::A11: case Criterion::A12: case Criterion::A13:
    case Criterion::B11: case Criterion::B12: case Criterion::B13:
      return true;
    default:
      return false;
  }
}

bool is_weibull(Criterion c) {
  return c == Criterion::B11 || c == Criterion::B12 || c == Criterion::B13;
}

// Converts the limit quantity of a power criterion into gamma; nullopt when
// its sign rules the domain out.
std::optional<double> gamma_from(Criterion c, double est) {
  switch (c) {
    case Criterion::A11: if (est < 0.0) return -1.0 / est; break;
    case Criterion::A12: if (est < 0.0) return -est; break;
    case Criterion::A13: if (est > 0.0) return 1.0 / est; break;
    case Criterion::B11: if (est < 0.0) return 1.0 / est; break;
    case Criterion::B12: if (est > 0.0) return -est; break;
    case Criterion::B13: if (est > 0.0) return -1.0 / est; break;
    default: break;
  }
  return std::nullopt;
}

std::optional<ProbeValue> eval_probe(const CdfSpec& spec, Criterion c,
                                     const ProbeConfig& cfg, const Probe& p) {
  const auto& lambdas = cfg.lambdas;
  const double x = p.x;
  const double u = p.u;
  if (!std::isfinite(x) || !(u > 0.0) || !(u < 1.0)) return std::nullopt;
  switch (c) {
    case Criterion::A11: {
      if (!(x > 0.0)) return std::nullopt;
      const double s0 = spec.sf(x);
      if (!(s0 > 0.0)) return std::nullopt;
      std::vector<double> r;
      for (double l : lambdas) r.push_back(spec.sf(l * x) / s0);
      return power_fit(lambdas, r);
    }
    case Criterion::A12: {
      const double q0 = spec.upper_quantile(u);
      if (!finite_positive(q0)) return std::nullopt;
      std::vector<double> r;
      for (double l : lambdas) {
        if (!(l * u < 1.0)) return std::nullopt;
        r.push_back(spec.upper_quantile(l * u) / q0);
      }
      return power_fit(lambdas, r);
    }
    case Criterion::A13: {
      const double s0 = spec.sf(x);
      if (!(s0 > 0.0)) return std::nullopt;
      const double v = x * spec.derivative(x) / s0;
      if (!std::isfinite(v)) return std::nullopt;
      return ProbeValue{v, 0.0};
    }
    case Criterion::B11: {
      const auto gap = resolvable_gap(spec, x);
      if (!gap) return std::nullopt;
      const double s0 = spec.sf(spec.uep - *gap);
      if (!(s0 > 0.0)) return std::nullopt;
      std::vector<double> r;
      for (double l : lambdas) {
        const double inner = *gap / l;
        if (!(inner > 4.0 * std::numeric_limits<double>::epsilon() *
                          std::max(1.0, std::abs(spec.uep)))) {
          return std::nullopt;
        }
        r.push_back(spec.sf(spec.uep - inner) / s0);
      }
      return power_fit(lambdas, r);
    }
    case Criterion::B12: {
      const auto gap = resolvable_gap(spec, spec.upper_quantile(u));
      if (!gap) return std::nullopt;
      std::vector<double> r;
      for (double l : lambdas) {
        if (!(l * u < 1.0)) return std::nullopt;
        r.push_back((spec.uep - spec.upper_quantile(l * u)) / *gap);
      }
      return power_fit(lambdas, r);
    }
    case Criterion::B13: {
      const auto gap = resolvable_gap(spec, x);
      if (!gap) return std::nullopt;
      const double s0 = spec.sf(x);
      if (!(s0 > 0.0)) return std::nullopt;
      const double v = *gap * spec.derivative(x) / s0;
      if (!std::isfinite(v)) return std::nullopt;
      return ProbeValue{v, 0.0};
    }
    case Criterion::A21: {
      const double q0 = spec.upper_quantile(u);
      const double aux = spec.upper_quantile(u / std::numbers::e) - q0;
      if (!finite_positive(aux)) return std::nullopt;
      double num = 0.0;
      double den = 0.0;
      double spread = 0.0;
      for (double l : lambdas) {
        if (!(l * u < 1.0)) return std::nullopt;
        const double v = (spec.upper_quantile(l * u) - q0) / aux;
        if (!std::isfinite(v)) return std::nullopt;
        num -= v * std::log(l);
        den += std::log(l) * std::log(l);
        spread = std::max(spread, std::abs(v + std::log(l)));
      }
      return ProbeValue{num / den, spread};
    }
    case Criterion::A22: {
      if (!(x > spec.lep && x < spec.uep)) return std::nullopt;
      const double s0 = spec.sf(x);
      if (!(s0 > 0.0)) return std::nullopt;
      double r_x;
      try {
        r_x = asymptotic_moment_R(spec, x);
      } catch (const Error&) {
        return std::nullopt;
      }
      if (!finite_positive(r_x)) return std::nullopt;
      double spread = 0.0;
      for (double t : cfg.t_values) {
        const double ratio = spec.sf(x + t * r_x) / s0;
        if (!std::isfinite(ratio)) return std::nullopt;
        spread = std::max(spread, std::abs(ratio - std::exp(-t)));
      }
      return ProbeValue{r_x, spread};
    }
    case Criterion::A23: {
      const double s0 = spec.sf(x);
      const double f1 = spec.derivative(x);
      if (!(s0 > 0.0) || !(f1 > 0.0)) return std::nullopt;
      const double v = spec.second_derivative(x) * s0 / (f1 * f1);
      if (!std::isfinite(v)) return std::nullopt;
      return ProbeValue{v, std::abs(v + 1.0)};
    }
    case Criterion::Lo86: {
      auto s_of = [&](double level) {
        return level / spec.derivative(spec.upper_quantile(level));
      };
      const double s0 = s_of(u);
      if (!finite_positive(s0)) return std::nullopt;
      double spread = 0.0;
      for (double l : lambdas) {
        if (!(l * u < 1.0)) return std::nullopt;
        const double ratio = s_of(l * u) / s0;
        if (!std::isfinite(ratio)) return std::nullopt;
        spread = std::max(spread, std::abs(ratio - 1.0));
      }
      return ProbeValue{s0, spread};
    }
  }
  return std::nullopt;
}

DoaVerdict run_criterion(const CdfSpec& spec, Criterion c,
                         const ProbeConfig& cfg) {
  const bool finite_uep = std::isfinite(spec.uep);
  if (is_power(c)) {
    if (is_weibull(c) && !finite_uep) {
      throw Error(Errc::wrong_branch,
                  std::string(to_string(c)) +
                      " needs a finite upper endpoint; use the Frechet checks");
    }
    if (!is_weibull(c) && finite_uep) {
      throw Error(Errc::wrong_branch,
                  std::string(to_string(c)) +
                      " needs an infinite upper endpoint; use check_weibull");
    }
  }
  switch (c) {
    case Criterion::A13: case Criterion::B13: case Criterion::Lo86:
      require(spec.derivative, "derivative", c);
      break;
    case Criterion::A23:
      require(spec.derivative, "derivative", c);
      require(spec.second_derivative, "second_derivative", c);
      break;
    default:
      break;
  }

  DoaVerdict v;
  v.criterion_used = c;
  for (const Probe& p : make_probes(spec, cfg)) {
    if (auto pv = eval_probe(spec, c, cfg, p)) {
      v.trace.push_back({p.u, p.x, pv->estimate, pv->spread});
    }
  }
  if (v.trace.empty()) return v;

  const ProbeRecord& last = v.trace.back();
  if (!is_power(c)) {
    v.residual = last.spread;
    if (v.residual <= cfg.acceptance) v.classified_domain = Domain::Gumbel;
    return v;
  }

  double drift = 0.0;
  if (v.trace.size() >= 2) {
    drift = std::abs(last.estimate - v.trace[v.trace.size() - 2].estimate);
  }
  v.residual = std::max(last.spread, drift);
  const auto gamma = gamma_from(c, last.estimate);
  if (!gamma) {
    v.residual = kInf;
    return v;
  }
  v.gamma_hat = *gamma;
  const bool resolved = drift <= cfg.resolution * std::abs(last.estimate);
  if (v.residual <= cfg.acceptance && resolved) {
    v.classified_domain = is_weibull(c) ? Domain::Weibull : Domain::Frechet;
  }
  return v;
}

// Accepted verdicts beat unaccepted ones; within a group the smaller residual
// wins and ties keep the earlier criterion.
const DoaVerdict& better(const DoaVerdict& a, const DoaVerdict& b) {
  const bool acc_a = a.classified_domain != Domain::Unclassified;
  const bool acc_b = b.classified_domain != Domain::Unclassified;
  if (acc_a != acc_b) return acc_a ? a : b;
  return b.residual < a.residual ? b : a;
}

DoaVerdict best_of(const CdfSpec& spec, const std::vector<Criterion>& order,
                   const ProbeConfig& cfg) {
  std::optional<DoaVerdict> best;
  for (Criterion c : order) {
    DoaVerdict v = run_criterion(spec, c, cfg);
    best = best ? better(*best, v) : v;
  }
  return *best;
}

double integral_ell_over_t(const RealFn& ell, double u) {
  if (!ell) return 0.0;
  // t = e^s turns dt / t into ds, removing the 1/t singularity at 0.
  return quad::integrate([&](double s) { return ell(std::exp(s)); },
                         std::log(u), 0.0, 1e-12, 1e-14)
      .value;
}

double slowly_varying_s(const KaramataRep& rep, double u) {
  if (rep.s_fn) return rep.s_fn(u);
  const double a = rep.a_fn ? rep.a_fn(u) : 0.0;
  return rep.c * (1.0 + a) * std::exp(integral_ell_over_t(rep.ell_fn, u));
}

}  // namespace

std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::A11: return "A11";
    case Criterion::A12: return "A12";
    case Criterion::A13: return "A13";
    case Criterion::A21: return "A21";
    case Criterion::A22: return "A22";
    case Criterion::A23: return "A23";
    case Criterion::Lo86: return "Lo86";
    case Criterion::B11: return "B11";
    case Criterion::B12: return "B12";
    case Criterion::B13: return "B13";
  }
  return "?";
}

std::string_view to_string(Domain d) noexcept {
  switch (d) {
    case Domain::Frechet: return "Frechet";
    case Domain::Gumbel: return "Gumbel";
    case Domain::Weibull: return "Weibull";
    case Domain::Unclassified: return "Unclassified";
  }
  return "?";
}

double CdfSpec::sf(double x) const {
  if (survival) return survival(x);
  return 1.0 - cdf(x);
}

double CdfSpec::upper_quantile(double u) const {
  if (tail_quantile) return tail_quantile(u);
  return quantile(1.0 - u);
}

double asymptotic_moment_R(const CdfSpec& spec, double x) {
  if (!(x > spec.lep && x < spec.uep)) {
    throw Error(Errc::domain, "asymptotic_moment_R: x=" + std::to_string(x) +
                                  " lies outside (lep, uep)");
  }
  const double s0 = spec.sf(x);
  if (!(s0 > 0.0)) {
    throw Error(Errc::domain, "asymptotic_moment_R: zero survival at x=" +
                                  std::to_string(x));
  }
  const auto sf = [&](double y) { return spec.sf(y); };
  double integral;
  if (std::isfinite(spec.uep)) {
    integral = quad::integrate(sf, x, spec.uep, 1e-12).value;
  } else {
    double scale = std::max(1.0, std::abs(x));
    if (spec.derivative) {
      const double local = s0 / spec.derivative(x);
      if (finite_positive(local)) scale = std::min(scale, local);
    }
    integral = quad::integrate_tail(sf, x, scale, 1e-12).value;
  }
  return integral / s0;
}

DoaVerdict evaluate_criterion(const CdfSpec& spec, Criterion criterion,
                              const ProbeConfig& cfg) {
  return run_criterion(spec, criterion, cfg);
}

DoaVerdict check_frechet(const CdfSpec& spec, const ProbeConfig& cfg) {
  if (std::isfinite(spec.uep)) {
    throw Error(Errc::wrong_branch,
                "check_frechet: upper endpoint is finite; use check_weibull");
  }
  DoaVerdict v = run_criterion(spec, Criterion::A11, cfg);
  if (v.classified_domain == Domain::Frechet) return v;
  v = better(v, run_criterion(spec, Criterion::A12, cfg));
  if (v.classified_domain == Domain::Frechet) return v;
  if (spec.derivative) v = better(v, run_criterion(spec, Criterion::A13, cfg));
  return v;
}

DoaVerdict check_weibull(const CdfSpec& spec, const ProbeConfig& cfg) {
  if (!std::isfinite(spec.uep)) {
    throw Error(Errc::wrong_branch,
                "check_weibull: upper endpoint is infinite; use check_frechet");
  }
  DoaVerdict v = run_criterion(spec, Criterion::B11, cfg);
  if (v.classified_domain == Domain::Weibull) return v;
  v = better(v, run_criterion(spec, Criterion::B12, cfg));
  if (v.classified_domain == Domain::Weibull) return v;
  if (spec.derivative) v = better(v, run_criterion(spec, Criterion::B13, cfg));
  return v;
}

DoaVerdict check_gumbel(const CdfSpec& spec, const ProbeConfig& cfg) {
  std::vector<Criterion> order = {Criterion::A21, Criterion::A22};
  if (spec.derivative && spec.second_derivative) order.push_back(Criterion::A23);
  if (spec.derivative) order.push_back(Criterion::Lo86);
  return best_of(spec, order, cfg);
}

DoaVerdict classify_domain(const CdfSpec& spec, const ProbeConfig& cfg) {
  DoaVerdict power = std::isfinite(spec.uep) ? check_weibull(spec, cfg)
                                             : check_frechet(spec, cfg);
  DoaVerdict gumbel = check_gumbel(spec, cfg);
  DoaVerdict best = better(power, gumbel);
  if (best.classified_domain == Domain::Unclassified) best.gamma_hat = 0.0;
  return best;
}

double karamata_quantile(const KaramataRep& rep, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(Errc::domain, "karamata_quantile: u must lie in (0, 1), got " +
                                  std::to_string(u));
  }
  if (rep.gamma < 0.0 && !std::isfinite(rep.uep)) {
    throw Error(Errc::invalid_representation,
                "karamata_quantile: gamma < 0 needs a finite upper endpoint");
  }
  if (rep.gamma == 0.0) {
    const double s_u = slowly_varying_s(rep, u);
    const double tail =
        quad::integrate([&](double s) { return slowly_varying_s(rep, std::exp(s)); },
                        std::log(u), 0.0, 1e-11, 1e-14)
            .value;
    return rep.d + s_u + tail;
  }
  const double a = rep.a_fn ? rep.a_fn(u) : 0.0;
  const double body = rep.c * (1.0 + a) * std::pow(u, -rep.gamma) *
                      std::exp(integral_ell_over_t(rep.ell_fn, u));
  return rep.gamma > 0.0 ? body : rep.uep - body;
}

std::vector<double> karamata_sample(const KaramataRep& rep, std::size_t n,
                                    std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(karamata_quantile(rep, rng.uniform()));
  return out;
}

}  // namespace evt
