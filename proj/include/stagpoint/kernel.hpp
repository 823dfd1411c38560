#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "stagpoint/initial_data.hpp"

namespace stagpoint {

/// A point of the internal time axis. Near eta* the gap eta* - eta is the
/// accurate coordinate; eta itself rounds it away once the gap is below ulp(eta*).
struct EtaPoint {
  double eta = 0.0;
  double gap = 0.0;  // eta* - eta, +inf when M0 <= 0
};

/// J(alpha, eta) = 1 - eta u0'(alpha).
double jacobian(const InitialDatum& datum, double alpha, double eta);

/// Label integrals at one eta over [a, b]:
///   k0 = int 1/J,  k1 = int 1/J^2,  l = int u0'/J^2 (= d k0/d eta),  q = int u0'^2/J^3.
struct Moments {
  double k0 = 0.0;
  double k1 = 0.0;
  double l = 0.0;
  double q = 0.0;
  std::array<double, 4> error{};
  std::size_t evals = 0;
};

struct KernelValue {
  double eta = 0.0;
  double kbar0 = 0.0;
  double kbar1 = 0.0;
  double est_error = 0.0;
};

struct KernelOptions {
  double rel_tol = 1e-12;
  std::size_t max_evals = 4'000'000;
};

/// Evaluates the label integrals with a regularising substitution around each
/// maximizer of u0'. Holds copies of the datum and its profile; immutable.
class Kernel {
 public:
  Kernel(InitialDatum datum, CriticalProfile profile, KernelOptions options = {});

  const InitialDatum& datum() const { return datum_; }
  const CriticalProfile& profile() const { return profile_; }
  const KernelOptions& options() const { return options_; }

  /// Throws DomainError for eta < 0 and SingularEta for eta >= eta*.
  EtaPoint at_eta(double eta) const;
  /// Throws DomainError unless 0 < gap <= eta*.
  EtaPoint at_gap(double gap) const;

  /// J computed from the gap, accurate near the maximizers.
  double jacobian(double alpha, const EtaPoint& p) const;

  /// Throws QuadratureBudgetExceeded if rel_tol cannot be met.
  Moments moments(const EtaPoint& p, double a = 0.0, double b = 1.0) const;

  KernelValue value(const EtaPoint& p) const;

 private:
  // Plain: alpha in [lo, hi]. Offset: h in [lo, hi], alpha = alpha_bar + side h.
  // Angle: v with h = lambda tan(v^m)^(2/p). LogCoangle: x with
  // h = lambda tan(e^x)^(-2/p), which resolves h -> r as lambda -> 0.
  struct Segment {
    enum class Kind { Plain, Offset, Angle, LogCoangle };
    Kind kind = Kind::Plain;
    double lo = 0.0, hi = 0.0;
    double alpha_bar = 0.0;
    std::size_t which = 0;  // maximizer index
    double side = 1.0;
    double lambda = 0.0, p = 1.0, m = 1.0;
  };

  std::vector<Segment> segments(const EtaPoint& p, double a, double b) const;

  InitialDatum datum_;
  CriticalProfile profile_;
  KernelOptions options_;
  std::vector<LocalDrop> drops_;  // one per maximizer
};

/// int_0^1 J^-b for b in {1, 2}, absolute error <= tol * max(1, value).
double kbar(const InitialDatum& datum, const CriticalProfile& profile, double eta, int b, double tol = 1e-12);

/// Gamma(p) Gamma(s) / Gamma(p + s).
double beta_integral(double p, double s);

/// f(g) ~ constant * g^exponent * |ln g|^log_power as g = eta* - eta -> 0.
struct RateModel {
  double exponent = 0.0;
  double constant = 0.0;
  int log_power = 0;
  bool extension = false;  // non-smooth exponent q, not covered by the theorems

  bool log_correction() const { return log_power != 0; }
  double evaluate(double gap) const;
};

/// Two-sided contribution of one maximizer with local model M0 - |C1| h^p to
/// int J^-b: (2/p) M0^(2/p - b) |C1|^(-1/p) B(1/p, b - 1/p).
double rate_constant(double m0, double c1_abs, double p, int b);

/// Single-maximizer constants for order k, written with Gamma functions.
double c2_constant(int k, double m0, double c1_abs);
double c3_constant(int k, double m0, double c1_abs);

/// Leading behaviour of kbar_b near eta*. Contributions of the maximizers with
/// the largest exponent are summed; boundary ones count half. Throws
/// NonpositiveMax when M0 <= 0 and InvalidInput for b outside {1, 2}.
RateModel asymptotic_rates(const CriticalProfile& profile, int b);

/// Coefficient A of the logarithmic law kbar0 ~ -A ln(eta* - eta) when the
/// dominant exponent is 1.
double log_law_coefficient(const CriticalProfile& profile);

}  // namespace stagpoint
