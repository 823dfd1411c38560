#include "stagpoint/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stagpoint/error.hpp"

namespace stagpoint {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::BcViolation: return "BcViolation";
    case ErrorCode::NonpositiveMax: return "NonpositiveMax";
    case ErrorCode::TooManyMaximizers: return "TooManyMaximizers";
    case ErrorCode::FlatMaximum: return "FlatMaximum";
    case ErrorCode::SingularEta: return "SingularEta";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BeyondBlowup: return "BeyondBlowup";
    case ErrorCode::UnanchoredFlow: return "UnanchoredFlow";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::InsufficientAsymptoticDepth: return "InsufficientAsymptoticDepth";
    case ErrorCode::ApproachingSingularity: return "ApproachingSingularity";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

std::string_view to_string(Bc bc) { return bc == Bc::Periodic ? "periodic" : "dirichlet"; }

std::string_view to_string(MaximizerKind kind) {
  switch (kind) {
    case MaximizerKind::BoundaryLinear: return "boundary_linear";
    case MaximizerKind::InteriorOrder: return "interior_order";
    case MaximizerKind::Fractional: return "fractional";
  }
  return "unknown";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin and cos of 2 pi x, exact at multiples of 1/4.
struct SinCos {
  double s;
  double c;
};

SinCos sincos_2pi(double x) {
  const double quarter = std::nearbyint(4.0 * x);
  const double r = x - 0.25 * quarter;
  const double theta = kTwoPi * r;
  const double s = r == 0.0 ? 0.0 : std::sin(theta);
  const double c = r == 0.0 ? 1.0 : std::cos(theta);
  long q = static_cast<long>(std::fmod(quarter, 4.0));
  if (q < 0) q += 4;
  switch (q) {
    case 0: return {s, c};
    case 1: return {c, -s};
    case 2: return {-s, -c};
    default: return {-c, s};
  }
}

double falling_factorial(double x, int n) {
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= x - i;
  return p;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double poly_derivative(const std::vector<double>& c, double x, int order) {
  const int deg = static_cast<int>(c.size()) - 1;
  if (order > deg) return 0.0;
  double acc = 0.0;
  for (int i = deg; i >= order; --i) {
    acc = acc * x + c[i] * falling_factorial(i, order);
  }
  return acc;
}

// p'(anchor) - p'(anchor + h) via the Taylor expansion of p' about anchor.
double poly_slope_drop(const std::vector<double>& c, double anchor, double h) {
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 2) return 0.0;
  // sum_{m=1}^{deg-1} p^(m+1)(anchor) h^m / m!
  double acc = 0.0;
  for (int m = deg - 1; m >= 1; --m) {
    acc = acc * h + poly_derivative(c, anchor, m + 1) / factorial(m);
  }
  return -acc * h;
}

double trig_derivative(const TrigPolynomial& f, double x, int order) {
  double acc = order == 0 ? f.constant : 0.0;
  const std::size_t n = std::max(f.sine.size(), f.cosine.size());
  const int phase = order % 4;
  for (std::size_t j = 1; j <= n; ++j) {
    const double s = j <= f.sine.size() ? f.sine[j - 1] : 0.0;
    const double c = j <= f.cosine.size() ? f.cosine[j - 1] : 0.0;
    if (s == 0.0 && c == 0.0) continue;
    const auto [sn, cs] = sincos_2pi(static_cast<double>(j) * x);
    // d^n sin = sin(x + n pi/2), d^n cos = cos(x + n pi/2)
    double ds = 0.0, dc = 0.0;
    switch (phase) {
      case 0: ds = sn; dc = cs; break;
      case 1: ds = cs; dc = -sn; break;
      case 2: ds = -sn; dc = -cs; break;
      default: ds = -cs; dc = sn; break;
    }
    const double w = std::pow(kTwoPi * static_cast<double>(j), order);
    acc += w * (s * ds + c * dc);
  }
  return acc;
}

double trig_slope_drop(const TrigPolynomial& f, double anchor, double h) {
  // u0' = sum w_j (s_j cos(w_j a) - c_j sin(w_j a)),
  // cos A - cos B = -2 sin((A+B)/2) sin((A-B)/2),
  // sin A - sin B =  2 cos((A+B)/2) sin((A-B)/2), with A = anchor, B = anchor + h.
  const std::size_t n = std::max(f.sine.size(), f.cosine.size());
  double acc = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double s = j <= f.sine.size() ? f.sine[j - 1] : 0.0;
    const double c = j <= f.cosine.size() ? f.cosine[j - 1] : 0.0;
    if (s == 0.0 && c == 0.0) continue;
    const double jd = static_cast<double>(j);
    // (A+B)/2 = A + h/2; expanding keeps full precision in h when A sits on
    // a quarter point, where sincos_2pi is exact.
    const auto a = sincos_2pi(jd * anchor);
    const auto half_diff = sincos_2pi(-0.5 * jd * h);
    const double half_sum_s = a.s * half_diff.c - a.c * half_diff.s;
    const double half_sum_c = a.c * half_diff.c + a.s * half_diff.s;
    const double dcos = -2.0 * half_sum_s * half_diff.s;
    const double dsin = 2.0 * half_sum_c * half_diff.s;
    acc += kTwoPi * jd * (s * dcos - c * dsin);
  }
  return acc;
}

bool is_even_integer(double q) { return q >= 0.0 && std::floor(q) == q && std::fmod(q, 2.0) == 0.0; }

// Derivative of order n >= 1 of sgn(h)|h|^(q+1)/(q+1).
double power_part_derivative(double h, double q, int n) {
  if (n == 0) {
    const double a = std::pow(std::abs(h), q + 1.0) / (q + 1.0);
    return h < 0.0 ? -a : a;
  }
  const double e = q - n + 1;
  const double coeff = falling_factorial(q, n - 1);
  if (h != 0.0) {
    const double sign = (n % 2 == 0 && h < 0.0) ? -1.0 : 1.0;
    return coeff * sign * std::pow(std::abs(h), e);
  }
  if (e > 0.0) return 0.0;
  if (is_even_integer(q)) return e == 0.0 ? coeff : 0.0;
  throw Error(ErrorCode::DerivativeUnavailable,
              "power profile with q = " + std::to_string(q) + " has no derivative of order " +
                  std::to_string(n) + " at its anchor");
}

double power_derivative(const PowerProfile& f, double x, int order) {
  const double h = x - f.anchor;
  double v = poly_derivative(f.background.coefficients, x, order);
  if (order == 0) v += f.peak * h;
  if (order == 1) v += f.peak;
  return v + f.c1 * power_part_derivative(h, f.q, order);
}

double power_slope_drop(const PowerProfile& f, double anchor, double h) {
  const double bg = poly_slope_drop(f.background.coefficients, anchor, h);
  const double ha = std::abs(anchor - f.anchor);
  const double hx = anchor == f.anchor ? std::abs(h) : std::abs(anchor + h - f.anchor);
  return bg + f.c1 * (std::pow(ha, f.q) - std::pow(hx, f.q));
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

InitialDatum::InitialDatum(Form form, Bc bc) : form_(std::move(form)), bc_(bc) {
  if (const auto* p = std::get_if<PowerProfile>(&form_)) {
    if (!(p->q > 0.0) || !(p->c1 < 0.0) || p->anchor < 0.0 || p->anchor > 1.0) {
      throw Error(ErrorCode::InvalidInput, "power profile needs q > 0, c1 < 0, anchor in [0, 1]");
    }
  }
}

double InitialDatum::derivative(double alpha, int order) const {
  if (order < 0) throw Error(ErrorCode::InvalidInput, "negative derivative order");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "label outside [0, 1]: " + std::to_string(alpha));
  }
  return std::visit(Overloaded{
                        [&](const Polynomial& p) { return poly_derivative(p.coefficients, alpha, order); },
                        [&](const TrigPolynomial& t) { return trig_derivative(t, alpha, order); },
                        [&](const PowerProfile& p) { return power_derivative(p, alpha, order); },
                    },
                    form_);
}

double InitialDatum::slope_drop(double anchor, double offset) const {
  return std::visit(Overloaded{
                        [&](const Polynomial& p) { return poly_slope_drop(p.coefficients, anchor, offset); },
                        [&](const TrigPolynomial& t) { return trig_slope_drop(t, anchor, offset); },
                        [&](const PowerProfile& p) { return power_slope_drop(p, anchor, offset); },
                    },
                    form_);
}

bool InitialDatum::is_trivial() const {
  return std::visit(Overloaded{
                        [](const Polynomial& p) {
                          for (std::size_t i = 1; i < p.coefficients.size(); ++i)
                            if (p.coefficients[i] != 0.0) return false;
                          return true;
                        },
                        [](const TrigPolynomial& t) {
                          return std::all_of(t.sine.begin(), t.sine.end(), [](double v) { return v == 0.0; }) &&
                                 std::all_of(t.cosine.begin(), t.cosine.end(), [](double v) { return v == 0.0; });
                        },
                        [](const PowerProfile&) { return false; },
                    },
                    form_);
}

bool InitialDatum::is_smooth() const { return !std::holds_alternative<PowerProfile>(form_); }

bool InitialDatum::has_odd_symmetry(double tol) const {
  double scale = 0.0;
  constexpr int n = 256;
  for (int i = 0; i <= n; ++i) scale = std::max(scale, std::abs(value(static_cast<double>(i) / n)));
  for (int i = 0; i <= n; ++i) {
    const double a = static_cast<double>(i) / n;
    if (std::abs(value(a) + value(1.0 - a)) > tol * std::max(1.0, scale)) return false;
  }
  return true;
}

double eval_deriv(const InitialDatum& datum, double alpha, int order) {
  return datum.derivative(alpha, order);
}

InitialDatum validate(const InitialDatum& datum) {
  constexpr double tol = 1e-12;
  if (datum.bc() == Bc::Dirichlet) {
    const double left = datum.value(0.0);
    const double right = datum.value(1.0);
    if (std::abs(left) > tol) {
      throw BcViolation("Dirichlet condition fails at 0: u0(0) = " + std::to_string(left), left, 0.0);
    }
    if (std::abs(right) > tol) {
      throw BcViolation("Dirichlet condition fails at 1: u0(1) = " + std::to_string(right), right, 0.0);
    }
  } else {
    const double dv = datum.value(1.0) - datum.value(0.0);
    const double ds = datum.slope(1.0) - datum.slope(0.0);
    if (std::abs(dv) > tol) {
      throw BcViolation("periodic condition fails: u0(1) - u0(0) = " + std::to_string(dv), dv, ds);
    }
    if (std::abs(ds) > tol) {
      throw BcViolation("periodic condition fails: u0'(1) - u0'(0) = " + std::to_string(ds), dv, ds);
    }
  }
  return datum;
}

double Maximizer::exponent() const {
  switch (kind) {
    case MaximizerKind::BoundaryLinear: return 1.0;
    case MaximizerKind::InteriorOrder: return order + 1.0;
    case MaximizerKind::Fractional: return q;
  }
  return 1.0;
}

double CriticalProfile::dominant_exponent() const {
  double p = 0.0;
  for (const auto& m : maximizers) p = std::max(p, m.exponent());
  return p;
}

std::vector<const Maximizer*> CriticalProfile::dominant() const {
  const double p = dominant_exponent();
  std::vector<const Maximizer*> out;
  for (const auto& m : maximizers)
    if (m.exponent() == p) out.push_back(&m);
  return out;
}

namespace {

// Bisection for a sign change of f on [lo, hi]; returns the midpoint of the
// final bracket.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct OrderTest {
  int first_nonzero = -1;  // derivative index j >= 2 of u0, -1 if none
  double value = 0.0;
};

// First derivative index j in [2, max] with a non-negligible Taylor coefficient
// u0^(j)(a)/j!, relative to the largest coefficient in that range.
OrderTest first_nonvanishing(const InitialDatum& datum, double a, int max_index, double tol) {
  std::vector<double> coeff;
  double scale = 1.0;
  for (int j = 2; j <= max_index; ++j) {
    double d = 0.0;
    try {
      d = datum.derivative(a, j);
    } catch (const Error&) {
      break;
    }
    coeff.push_back(d);
    scale = std::max(scale, std::abs(d) / factorial(j));
  }
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const int j = static_cast<int>(i) + 2;
    if (std::abs(coeff[i]) / factorial(j) >= tol * scale) return {j, coeff[i]};
  }
  return {};
}

struct Candidate {
  double alpha;
  double value;
};

}  // namespace

CriticalProfile critical_profile(const InitialDatum& datum, const ProfileOptions& options) {
  const int n = std::max(options.grid, 16);
  const double h = 1.0 / n;
  std::vector<double> slope(n + 1);
  for (int i = 0; i <= n; ++i) slope[i] = datum.slope(static_cast<double>(i) * h);

  const double grid_max = *std::max_element(slope.begin(), slope.end());
  const double grid_min = *std::min_element(slope.begin(), slope.end());
  const double spread = grid_max - grid_min;

  CriticalProfile profile;

  const PowerProfile* power = std::get_if<PowerProfile>(&datum.form());
  const auto near_anchor = [&](double a) { return power && std::abs(a - power->anchor) <= 2.0 * h; };
  const auto second = [&](double a) { return datum.derivative(a, 2); };

  // Minimizers first: m(t) is tracked along their labels.
  {
    std::vector<Candidate> mins;
    for (int i = 0; i <= n; ++i) {
      const bool left_ok = i == 0 || slope[i] <= slope[i - 1];
      const bool right_ok = i == n || slope[i] <= slope[i + 1];
      if (!(left_ok && right_ok) || slope[i] > grid_min + 1e-2 * spread) continue;
      double a = static_cast<double>(i) * h;
      if (i > 0 && i < n && !near_anchor(a)) {
        const double lo = a - h, hi = a + h;
        if (second(lo) < 0.0 && second(hi) > 0.0) a = bisect(second, lo, hi);
      }
      mins.push_back({a, datum.slope(a)});
    }
    double best = grid_min;
    for (const auto& c : mins) best = std::min(best, c.value);
    profile.min_slope = best;
    for (const auto& c : mins) {
      if (c.value > best + options.tol * std::max(1.0, std::abs(best))) continue;
      if (!profile.minimizers.empty() && c.alpha - profile.minimizers.back() < options.merge_distance) continue;
      profile.minimizers.push_back(c.alpha);
    }
  }

  if (datum.is_trivial() || grid_max <= options.tol) {
    profile.m0 = std::max(grid_max, 0.0);
    if (datum.is_trivial()) {
      profile.m0 = 0.0;
      profile.minimizers.clear();
    }
    profile.eta_star = std::numeric_limits<double>::infinity();
    return profile;
  }

  // Maximizer candidates: grid local maxima near the top. Near a high-order
  // maximum u0' is flat to rounding, so neighbouring grid maxima joined by a
  // plateau are grouped and polished as one.
  std::vector<int> tops;
  for (int i = 0; i <= n; ++i) {
    const bool left_ok = i == 0 || slope[i] >= slope[i - 1];
    const bool right_ok = i == n || slope[i] >= slope[i + 1];
    if (left_ok && right_ok && slope[i] >= grid_max - 1e-2 * spread) tops.push_back(i);
  }
  const double plateau = 1e-12 * std::max(1.0, std::abs(grid_max));
  std::vector<std::pair<int, int>> groups;
  for (const int i : tops) {
    if (!groups.empty()) {
      const int from = groups.back().second;
      const double floor = *std::min_element(slope.begin() + from, slope.begin() + i + 1);
      if (floor >= std::max(slope[from], slope[i]) - plateau) {
        groups.back().second = i;
        continue;
      }
    }
    groups.emplace_back(i, i);
  }

  std::vector<Candidate> cands;
  for (const auto& [il, ir] : groups) {
    const int i = il == 0 ? 0 : (ir == n ? n : (il + ir) / 2);
    double a = static_cast<double>(i) * h;
    if (near_anchor(a)) {
      a = power->anchor;
    } else if (i > 0 && i < n) {
      const double lo = static_cast<double>(il - 1) * h, hi = static_cast<double>(ir + 1) * h;
      if (second(lo) > 0.0 && second(hi) < 0.0) {
        // Root of u0'' of odd order k. The even derivatives u0^(2), u0^(4),
        // ..., u0^(k+1) all change sign at the maximizer and the last one has a
        // simple root, so refine along that chain and keep every stage.
        a = bisect(second, lo, hi);
        std::vector<std::pair<int, double>> chain{{2, a}};
        for (int j = 4; j <= options.max_order + 1; j += 2) {
          const auto dj = [&](double x) { return datum.derivative(x, j); };
          const double l = std::max(0.0, std::min(a, lo) - h), r = std::min(1.0, std::max(a, hi) + h);
          const double fl = dj(l), fr = dj(r);
          if (fl == 0.0 || fr == 0.0 || (fl > 0.0) == (fr > 0.0)) break;
          a = bisect(dj, l, r);
          chain.emplace_back(j, a);
        }
        const auto test = first_nonvanishing(datum, a, options.max_order + 2, options.tol);
        if (test.first_nonzero > 2) {
          for (const auto& [j, x] : chain)
            if (j == test.first_nonzero - 1) a = x;
        }
      }
    }
    cands.push_back({a, datum.slope(a)});
  }

  double m0 = grid_max;
  for (const auto& c : cands) m0 = std::max(m0, c.value);

  std::vector<Candidate> kept;
  for (const auto& c : cands) {
    if (c.value < m0 - options.tol * std::max(1.0, std::abs(m0))) continue;
    if (!kept.empty() && std::abs(c.alpha - kept.back().alpha) < options.merge_distance) continue;
    kept.push_back(c);
  }
  if (kept.size() > options.max_maximizers) {
    throw Error(ErrorCode::TooManyMaximizers,
                std::to_string(kept.size()) + " maximizers exceed the cap of " +
                    std::to_string(options.max_maximizers));
  }

  profile.m0 = m0;
  profile.eta_star = 1.0 / m0;

  for (const auto& c : kept) {
    Maximizer mx;
    mx.alpha_bar = c.alpha;
    const bool boundary = c.alpha == 0.0 || c.alpha == 1.0;
    if (power && c.alpha == power->anchor) {
      mx.kind = MaximizerKind::Fractional;
      mx.q = power->q;
      mx.c1 = power->c1;
    } else {
      const auto test = first_nonvanishing(datum, c.alpha, options.max_order + 2, options.tol);
      if (test.first_nonzero < 0) {
        throw Error(ErrorCode::FlatMaximum, "u0' is flat to order " + std::to_string(options.max_order) +
                                                " at " + std::to_string(c.alpha) +
                                                " (infinitely many maximizers are not supported)");
      }
      if (test.first_nonzero == 2) {
        if (!boundary) {
          throw Error(ErrorCode::InternalInconsistency,
                      "interior maximizer with u0'' != 0 at " + std::to_string(c.alpha));
        }
        mx.kind = MaximizerKind::BoundaryLinear;
        mx.c1 = -std::abs(test.value);
      } else {
        mx.kind = MaximizerKind::InteriorOrder;
        mx.order = test.first_nonzero - 2;
        const double coeff = test.value / factorial(mx.order + 1);
        if (!boundary && (mx.order % 2 == 0 || coeff >= 0.0)) {
          throw Error(ErrorCode::InternalInconsistency,
                      "critical point at " + std::to_string(c.alpha) + " is not a strict maximum");
        }
        mx.c1 = -std::abs(coeff);
      }
    }
    profile.maximizers.push_back(mx);
  }

  // Radius of validity of the local model |D(h) - |c1| h^p| <= tol |c1| h^p.
  for (std::size_t i = 0; i < profile.maximizers.size(); ++i) {
    auto& mx = profile.maximizers[i];
    double hmax = 0.5;
    for (std::size_t j = 0; j < profile.maximizers.size(); ++j) {
      if (j != i) hmax = std::min(hmax, 0.5 * std::abs(profile.maximizers[j].alpha_bar - mx.alpha_bar));
    }
    const bool can_left = mx.alpha_bar > 0.0;
    const bool can_right = mx.alpha_bar < 1.0;
    if (can_left) hmax = std::min(hmax, mx.alpha_bar);
    if (can_right) hmax = std::min(hmax, 1.0 - mx.alpha_bar);
    const double p = mx.exponent();
    const double a1 = std::abs(mx.c1);
    const LocalDrop drop(datum, mx);
    const auto ok = [&](double hh) {
      const double model = a1 * std::pow(hh, p);
      if (can_right) {
        const double d = drop(hh);
        if (std::abs(d - model) > options.model_tolerance * model) return false;
      }
      if (can_left) {
        const double d = drop(-hh);
        if (std::abs(d - model) > options.model_tolerance * model) return false;
      }
      return true;
    };
    constexpr int steps = 600;
    const double ratio = std::pow(1e-6, 1.0 / steps);
    double r = hmax * std::pow(ratio, steps);
    for (int s = steps; s >= 0; --s) {
      const double hh = hmax * std::pow(ratio, s);
      if (!ok(hh)) break;
      r = hh;
    }
    mx.radius = r;
  }
  return profile;
}

LocalDrop::LocalDrop(const InitialDatum& datum, const Maximizer& mx) : datum_(datum), anchor_(mx.alpha_bar) {
  if (mx.kind != MaximizerKind::InteriorOrder) return;
  first_ = mx.order + 1;
  int last = first_;
  if (const auto* poly = std::get_if<Polynomial>(&datum.form())) {
    last = std::max(first_, static_cast<int>(poly->coefficients.size()) - 2);
    taylor_reach_ = std::numeric_limits<double>::infinity();
  } else if (const auto* trig = std::get_if<TrigPolynomial>(&datum.form())) {
    const std::size_t modes = std::max(trig->sine.size(), trig->cosine.size());
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(std::max<std::size_t>(modes, 1));
    // Terms (omega h)^j / j! with omega h <= 1/2 are below rounding after 40 more.
    taylor_reach_ = 0.5 / omega;
    last = first_ + 40;
  } else {
    return;
  }
  for (int j = first_; j <= last; ++j) coeff_.push_back(-datum.derivative(anchor_, j + 1) / factorial(j));
}

double LocalDrop::operator()(double h) const {
  if (coeff_.empty() || std::abs(h) > taylor_reach_) return datum_.slope_drop(anchor_, h);
  double acc = 0.0;
  for (std::size_t i = coeff_.size(); i-- > 0;) acc = acc * h + coeff_[i];
  return acc * std::pow(h, first_);
}

}  // namespace stagpoint
