#include "stagpoint/presets.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stagpoint/error.hpp"

namespace stagpoint {

namespace {

double binomial(int n, int r) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0)));
}

}  // namespace

InitialDatum example1() { return InitialDatum(Polynomial{{0.0, 0.5, -1.5, 1.0}}, Bc::Dirichlet); }

InitialDatum example2() {
  TrigPolynomial f;
  f.sine = {0.5 / std::numbers::pi};
  return InitialDatum(f, Bc::Periodic);
}

InitialDatum zero_datum() { return InitialDatum(Polynomial{{0.0}}, Bc::Dirichlet); }

InitialDatum quadratic_datum() { return InitialDatum(Polynomial{{0.0, 1.0, -1.0}}, Bc::Dirichlet); }

InitialDatum synthetic_order(int k) {
  if (k < 1 || k % 2 == 0) throw Error(ErrorCode::InvalidInput, "order must be a positive odd integer");
  // cos^n x = 2^-n [C(n, n/2) + 2 sum_j C(n, n/2 - j) cos(2 j x)], x = pi a.
  const int n = k + 1;
  TrigPolynomial f;
  f.sine.resize(n / 2);
  for (int j = 1; j <= n / 2; ++j) {
    const double amp = -std::ldexp(binomial(n, n / 2 - j), 1 - n);
    f.sine[j - 1] = amp / (2.0 * std::numbers::pi * j);
  }
  return InitialDatum(f, Bc::Periodic);
}

InitialDatum power_datum(double q) {
  PowerProfile p;
  p.anchor = 0.0;
  p.peak = 1.0;
  p.c1 = -(q + 1.0);
  p.q = q;
  return InitialDatum(p, Bc::Dirichlet);
}

InitialDatum preset(std::string_view name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "zero") return zero_datum();
  if (name == "quadratic") return quadratic_datum();
  if (name == "order1") return synthetic_order(1);
  if (name == "order3") return synthetic_order(3);
  if (name == "order5") return synthetic_order(5);
  if (name == "power1.5") return power_datum(1.5);
  throw Error(ErrorCode::InvalidInput, "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"example1", "example2", "zero", "quadratic", "order1", "order3", "order5", "power1.5"};
}

}  // namespace stagpoint
