#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace stagpoint {

enum class Bc { Periodic, Dirichlet };

std::string_view to_string(Bc bc);

/// u0(a) = sum_i coefficients[i] * a^i.
struct Polynomial {
  std::vector<double> coefficients;
};

/// u0(a) = constant + sum_j sine[j-1] sin(2 pi j a) + cosine[j-1] cos(2 pi j a).
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<double> sine;
  std::vector<double> cosine;
};

/// Data whose slope has a prescribed power-law peak at `anchor`:
///
///   u0'(a) = peak + c1 |a - anchor|^q + background'(a)
///   u0(a)  = background(a) + peak (a - anchor) + c1 sgn(a - anchor) |a - anchor|^(q+1) / (q+1)
///
/// For non-integer q the derivatives of order > q + 1 do not exist at the anchor.
struct PowerProfile {
  double anchor = 0.0;
  double peak = 1.0;
  double c1 = -1.0;
  double q = 1.0;
  Polynomial background;
};

/// Initial datum u0 on [0, 1] stored in a form with closed-form derivatives of
/// every order, plus its boundary-condition tag. Immutable.
class InitialDatum {
 public:
  using Form = std::variant<Polynomial, TrigPolynomial, PowerProfile>;

  InitialDatum(Form form, Bc bc);

  const Form& form() const { return form_; }
  Bc bc() const { return bc_; }

  /// Exact derivative u0^(order)(alpha). Throws DerivativeUnavailable where the
  /// stored form is not differentiable to that order.
  double derivative(double alpha, int order) const;

  double value(double alpha) const { return derivative(alpha, 0); }
  double slope(double alpha) const { return derivative(alpha, 1); }

  /// u0'(anchor) - u0'(anchor + offset), evaluated without cancellation for
  /// small offsets (Taylor shift for polynomials, product formulas for trig).
  /// The offset is taken as given, so it keeps full relative precision.
  double slope_drop(double anchor, double offset) const;

  /// True when every derivative of u0' vanishes identically (u0 constant).
  bool is_trivial() const;

  /// Odd symmetry u0(a) = -u0(1 - a), which pins a stagnation point at 0 for
  /// periodic data.
  bool has_odd_symmetry(double tol = 1e-12) const;

  /// Whether positions gamma(alpha, t) can be reported absolutely.
  bool anchored() const { return bc_ == Bc::Dirichlet || has_odd_symmetry(); }

  /// Smooth forms admit derivatives of every order everywhere.
  bool is_smooth() const;

 private:
  Form form_;
  Bc bc_;
};

double eval_deriv(const InitialDatum& datum, double alpha, int order);

/// Returns the datum iff its boundary conditions hold to 1e-12; throws
/// BcViolation naming the failed endpoint condition otherwise.
InitialDatum validate(const InitialDatum& datum);

enum class MaximizerKind { BoundaryLinear, InteriorOrder, Fractional };

std::string_view to_string(MaximizerKind kind);

struct Maximizer {
  double alpha_bar = 0.0;
  MaximizerKind kind = MaximizerKind::InteriorOrder;
  int order = 0;      // k, zero order of u0'' (InteriorOrder only)
  double q = 1.0;     // local exponent (Fractional only)
  double c1 = -1.0;   // u0'(a) ~ M0 + c1 |a - alpha_bar|^p
  double radius = 0.0;

  /// Exponent p of the local model: 1, k + 1 or q.
  double exponent() const;
  bool on_boundary() const { return alpha_bar == 0.0 || alpha_bar == 1.0; }
  /// Boundary maximizers see a one-sided neighbourhood.
  double weight() const { return on_boundary() ? 0.5 : 1.0; }
  bool second_derivative_vanishes() const { return kind != MaximizerKind::BoundaryLinear; }
};

struct CriticalProfile {
  double m0 = 0.0;
  double eta_star = 0.0;  // 1 / m0, +inf when m0 <= 0
  std::vector<Maximizer> maximizers;
  double min_slope = 0.0;
  std::vector<double> minimizers;

  bool positive() const { return m0 > 0.0; }
  /// Largest local exponent; these maximizers govern the asymptotics.
  double dominant_exponent() const;
  std::vector<const Maximizer*> dominant() const;
};

struct ProfileOptions {
  double tol = 1e-9;
  int grid = 10000;
  std::size_t max_maximizers = 64;
  double merge_distance = 1e-7;
  double model_tolerance = 0.1;
  int max_order = 15;
};

CriticalProfile critical_profile(const InitialDatum& datum, const ProfileOptions& options = {});

/// u0'(anchor) - u0'(anchor + h) next to one maximizer. For an InteriorOrder
/// maximizer the Taylor coefficients that order detection found to vanish are
/// dropped, so the drop keeps full relative precision as h -> 0 where the
/// mode-by-mode trig formula loses it to cancellation.
class LocalDrop {
 public:
  LocalDrop(const InitialDatum& datum, const Maximizer& mx);
  double operator()(double h) const;

 private:
  InitialDatum datum_;
  double anchor_;
  std::vector<double> coeff_;  // coeff_[i] multiplies h^(first_ + i)
  int first_ = 0;
  double taylor_reach_ = 0.0;
};

}  // namespace stagpoint
