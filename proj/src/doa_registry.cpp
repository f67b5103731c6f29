#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "evt/dist.hpp"
#include "evt/doa.hpp"
#include "evt/error.hpp"

namespace evt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> parse_args(std::string_view text, std::string_view name) {
  std::vector<double> out;
  std::string buf(text);
  std::size_t pos = 0;
  while (pos <= buf.size() && !buf.empty()) {
    const std::size_t comma = buf.find(',', pos);
    const std::string item = buf.substr(pos, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_input, "spec '" + std::string(name) +
                                           "': cannot parse argument '" + item +
                                           "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void expect_args(const std::vector<double>& args, std::size_t n,
                 std::string_view name) {
  if (args.size() != n) {
    throw Error(Errc::invalid_input, "spec '" + std::string(name) + "' expects " +
                                         std::to_string(n) + " argument(s)");
  }
}

// Upper standard-normal quantile z with P(Z > z) = u, accurate for tiny u.
double normal_upper(double u) {
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

CdfSpec exponential(double rate) {
  if (!(rate > 0.0)) throw Error(Errc::invalid_parameter, "exponential: rate must be positive");
  CdfSpec s;
  s.name = "exponential:" + std::to_string(rate);
  s.lep = 0.0;
  s.cdf = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  s.survival = [rate](double x) { return x <= 0.0 ? 1.0 : std::exp(-rate * x); };
  s.quantile = [rate](double p) { return p >= 1.0 ? kInf : -std::log1p(-p) / rate; };
  s.tail_quantile = [rate](double u) { return -std::log(u) / rate; };
  s.derivative = [rate](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
  s.second_derivative = [rate](double x) {
    return x < 0.0 ? 0.0 : -rate * rate * std::exp(-rate * x);
  };
  return s;
}

CdfSpec pareto(double alpha) {
  if (!(alpha > 0.0)) throw Error(Errc::invalid_parameter, "pareto: alpha must be positive");
  CdfSpec s;
  s.name = "pareto:" + std::to_string(alpha);
  s.lep = 1.0;
  s.cdf = [alpha](double x) { return x <= 1.0 ? 0.0 : -std::expm1(-alpha * std::log(x)); };
  s.survival = [alpha](double x) { return x <= 1.0 ? 1.0 : std::exp(-alpha * std::log(x)); };
  s.quantile = [alpha](double p) {
    return p >= 1.0 ? kInf : std::exp(-std::log1p(-p) / alpha);
  };
  s.tail_quantile = [alpha](double u) { return std::exp(-std::log(u) / alpha); };
  s.derivative = [alpha](double x) {
    return x < 1.0 ? 0.0 : alpha * std::exp(-(alpha + 1.0) * std::log(x));
  };
  s.second_derivative = [alpha](double x) {
    return x < 1.0 ? 0.0 : -alpha * (alpha + 1.0) * std::exp(-(alpha + 2.0) * std::log(x));
  };
  return s;
}

CdfSpec uniform() {
  CdfSpec s;
  s.name = "uniform";
  s.lep = 0.0;
  s.uep = 1.0;
  s.cdf = [](double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); };
  s.survival = [](double x) { return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x); };
  s.quantile = [](double p) { return p; };
  s.tail_quantile = [](double u) { return 1.0 - u; };
  s.derivative = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
  s.second_derivative = [](double) { return 0.0; };
  return s;
}

CdfSpec normal() {
  CdfSpec s;
  s.name = "normal";
  s.cdf = [](double x) { return normal_sf(-x); };
  s.survival = [](double x) { return normal_sf(x); };
  s.quantile = normal_quantile;
  s.tail_quantile = normal_upper;
  s.derivative = normal_pdf;
  s.second_derivative = [](double x) { return -x * normal_pdf(x); };
  return s;
}

CdfSpec lognormal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::invalid_parameter, "lognormal: sigma must be positive");
  CdfSpec s;
  s.name = "lognormal:" + std::to_string(mu) + "," + std::to_string(sigma);
  s.lep = 0.0;
  auto z = [mu, sigma](double x) { return (std::log(x) - mu) / sigma; };
  s.cdf = [z](double x) { return x <= 0.0 ? 0.0 : normal_sf(-z(x)); };
  s.survival = [z](double x) { return x <= 0.0 ? 1.0 : normal_sf(z(x)); };
  s.quantile = [mu, sigma](double p) {
    if (p <= 0.0) return 0.0;
    return std::exp(mu + sigma * normal_quantile(p));
  };
  s.tail_quantile = [mu, sigma](double u) { return std::exp(mu + sigma * normal_upper(u)); };
  s.derivative = [z, sigma](double x) {
    return x <= 0.0 ? 0.0 : normal_pdf(z(x)) / (sigma * x);
  };
  s.second_derivative = [z, sigma](double x) {
    if (x <= 0.0) return 0.0;
    const double f = normal_pdf(z(x)) / (sigma * x);
    return -f * (1.0 + z(x) / sigma) / x;
  };
  return s;
}

CdfSpec gpd(double xi, double beta) {
  const GpdParams p{xi, beta};
  validate(p);
  CdfSpec s;
  s.name = "gpd:" + std::to_string(xi) + "," + std::to_string(beta);
  s.lep = 0.0;
  s.uep = gpd_upper_endpoint(p);
  s.cdf = [p](double x) { return gpd_cdf(p, x); };
  s.survival = [p](double x) { return gpd_sf(p, x); };
  s.quantile = [p](double q) { return q >= 1.0 ? gpd_upper_endpoint(p) : gpd_quantile(p, q); };
  s.tail_quantile = [p](double u) { return gpd_tail_quantile(p, u); };
  s.derivative = [p](double x) { return gpd_pdf(p, x); };
  s.second_derivative = [p](double x) {
    if (x < 0.0) return 0.0;
    if (std::abs(p.xi) < kShapeZero) return -std::exp(-x / p.beta) / (p.beta * p.beta);
    const double t = 1.0 + p.xi * x / p.beta;
    if (t <= 0.0) return 0.0;
    return -(1.0 + p.xi) / (p.beta * p.beta) * std::exp((-1.0 / p.xi - 2.0) * std::log(t));
  };
  return s;
}

}  // namespace

CdfSpec builtin_spec(std::string_view name) {
  const std::size_t colon = name.find(':');
  const std::string_view family = name.substr(0, colon);
  const std::string_view rest =
      colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
  const std::vector<double> args =
      rest.empty() ? std::vector<double>{} : parse_args(rest, name);
  if (family == "exponential") {
    if (args.empty()) return exponential(1.0);
    expect_args(args, 1, name);
    return exponential(args[0]);
  }
  if (family == "pareto") {
    expect_args(args, 1, name);
    return pareto(args[0]);
  }
  if (family == "uniform") {
    expect_args(args, 0, name);
    return uniform();
  }
  if (family == "normal") {
    expect_args(args, 0, name);
    return normal();
  }
  if (family == "lognormal") {
    expect_args(args, 2, name);
    return lognormal(args[0], args[1]);
  }
  if (family == "gpd") {
    expect_args(args, 2, name);
    return gpd(args[0], args[1]);
  }
  throw Error(Errc::invalid_input, "unknown distribution spec '" + std::string(name) + "'");
}

std::vector<std::string> builtin_spec_names() {
  return {"exponential", "pareto:2", "uniform", "normal", "gpd:0.3,1", "gpd:-0.3,1",
          "lognormal:0,1"};
}

}  // namespace evt
