#include "stagpoint/fit.hpp"

#include <cmath>
#include <vector>

#include "stagpoint/error.hpp"

namespace stagpoint {

namespace {

double log_term(double x, int log_power) {
  return log_power == 0 ? 0.0 : log_power * std::log(std::abs(std::log(x)));
}

LineFit weighted_line(const std::vector<double>& u, const std::vector<double>& v, const std::vector<double>& w) {
  double sw = 0.0, su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sw += w[i];
    su += w[i] * u[i];
    sv += w[i] * v[i];
  }
  const double mu = su / sw, mv = sv / sw;
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += w[i] * (u[i] - mu) * (u[i] - mu);
    suv += w[i] * (u[i] - mu) * (v[i] - mv);
  }
  if (!(suu > 0.0)) throw Error(ErrorCode::InvalidInput, "fit abscissae are all equal");
  const double slope = suv / suu;
  return {slope, mv - slope * mu};
}

}  // namespace

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y, int log_power,
                       std::span<const double> weights) {
  if (x.size() != y.size() || (!weights.empty() && weights.size() != x.size()))
    throw Error(ErrorCode::InvalidInput, "fit inputs differ in length");
  std::vector<double> u, v, w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0) || (log_power != 0 && x[i] == 1.0)) continue;
    u.push_back(std::log(x[i]));
    v.push_back(std::log(y[i]) - log_term(x[i], log_power));
    w.push_back(weights.empty() ? 1.0 : weights[i]);
  }
  if (u.size() < 2) throw Error(ErrorCode::InvalidInput, "power fit needs two positive points");
  const LineFit line = weighted_line(u, v, w);
  PowerFit fit;
  fit.exponent = line.slope;
  fit.constant = std::exp(line.intercept);
  fit.n = static_cast<int>(u.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = v[i] - line.intercept - line.slope * u[i];
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / u.size());
  return fit;
}

double fit_constant(std::span<const double> x, std::span<const double> y, double exponent, int log_power) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidInput, "fit inputs differ in length");
  double acc = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    acc += std::log(y[i]) - exponent * std::log(x[i]) - log_term(x[i], log_power);
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::InvalidInput, "constant fit needs a positive point");
  return std::exp(acc / n);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidInput, "line fit needs two points");
  std::vector<double> u(x.begin(), x.end()), v(y.begin(), y.end()), w(x.size(), 1.0);
  return weighted_line(u, v, w);
}

}  // namespace stagpoint
