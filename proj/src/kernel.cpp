#include "stagpoint/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stagpoint/error.hpp"
#include "stagpoint/quadrature.hpp"

namespace stagpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kMaxPanel = 0.125;

// Integrand pieces shared by all parameterisations: given J and u0', the four
// moment densities scaled by the Jacobian of the change of variables.
quad::Vec<4> densities(double j, double slope, double dalpha) {
  const double inv = 1.0 / j;
  const double inv2 = inv * inv;
  return {dalpha * inv, dalpha * inv2, dalpha * slope * inv2, dalpha * slope * slope * inv2 * inv};
}

}  // namespace

double jacobian(const InitialDatum& datum, double alpha, double eta) { return 1.0 - eta * datum.slope(alpha); }

Kernel::Kernel(InitialDatum datum, CriticalProfile profile, KernelOptions options)
    : datum_(std::move(datum)), profile_(std::move(profile)), options_(options) {
  options_.rel_tol = std::max(options_.rel_tol, 2e-14);
  for (const auto& mx : profile_.maximizers) drops_.emplace_back(datum_, mx);
}

EtaPoint Kernel::at_eta(double eta) const {
  if (!(eta >= 0.0)) throw Error(ErrorCode::DomainError, "eta must be nonnegative, got " + std::to_string(eta));
  if (!profile_.positive()) return {eta, kInf};
  const double gap = profile_.eta_star - eta;
  if (!(gap > 0.0)) throw Error(ErrorCode::SingularEta, "eta = " + std::to_string(eta) + " is not below eta*");
  return {eta, gap};
}

EtaPoint Kernel::at_gap(double gap) const {
  if (!profile_.positive()) throw Error(ErrorCode::DomainError, "gap parameterisation needs M0 > 0");
  if (!(gap > 0.0) || gap > profile_.eta_star)
    throw Error(ErrorCode::DomainError, "gap must lie in (0, eta*], got " + std::to_string(gap));
  return {profile_.eta_star - gap, gap};
}

double Kernel::jacobian(double alpha, const EtaPoint& p) const {
  if (!profile_.positive()) return 1.0 - p.eta * datum_.slope(alpha);
  double j = profile_.m0 * p.gap + p.eta * (profile_.m0 - datum_.slope(alpha));
  for (std::size_t i = 0; i < profile_.maximizers.size(); ++i) {
    const auto& mx = profile_.maximizers[i];
    const double h = alpha - mx.alpha_bar;
    if (std::abs(h) <= mx.radius) {
      j = profile_.m0 * p.gap + p.eta * drops_[i](h);
      break;
    }
  }
  return j;
}

std::vector<Kernel::Segment> Kernel::segments(const EtaPoint& p, double a, double b) const {
  std::vector<Segment> out;
  struct Hole {
    double lo, hi;
  };
  std::vector<Hole> holes;

  if (profile_.positive()) {
    const double eps = profile_.m0 * p.gap;
    for (std::size_t which = 0; which < profile_.maximizers.size(); ++which) {
      const auto& mx = profile_.maximizers[which];
      const double r = mx.radius;
      const double pe = mx.exponent();
      for (const double side : {-1.0, 1.0}) {
        // Clip the one-sided neighbourhood to [a, b] in the offset variable.
        double h0, h1;
        if (side > 0) {
          h0 = std::max(0.0, a - mx.alpha_bar);
          h1 = std::min({r, 1.0 - mx.alpha_bar, b - mx.alpha_bar});
        } else {
          h0 = std::max(0.0, mx.alpha_bar - b);
          h1 = std::min({r, mx.alpha_bar, mx.alpha_bar - a});
        }
        if (!(h1 > h0)) continue;
        holes.push_back(side > 0 ? Hole{mx.alpha_bar + h0, mx.alpha_bar + h1} : Hole{mx.alpha_bar - h1, mx.alpha_bar - h0});

        Segment s;
        s.alpha_bar = mx.alpha_bar;
        s.which = which;
        s.side = side;
        s.p = pe;
        s.m = std::max(1.0, pe / 2.0);
        s.lambda = p.eta > 0.0 ? std::pow(eps / (p.eta * std::abs(mx.c1)), 1.0 / pe) : kInf;
        if (!(s.lambda < 0.25 * h1)) {
          s.kind = Segment::Kind::Offset;
          s.lo = h0;
          s.hi = h1;
          out.push_back(s);
          continue;
        }
        // tan(theta) = (h / lambda)^(p/2); split at theta = pi/4.
        const double theta0 = std::atan(std::pow(h0 / s.lambda, pe / 2.0));
        if (theta0 < kQuarterPi) {
          Segment lower = s;
          lower.kind = Segment::Kind::Angle;
          lower.lo = std::pow(theta0, 1.0 / s.m);
          lower.hi = std::pow(std::min(kQuarterPi, std::atan(std::pow(h1 / s.lambda, pe / 2.0))), 1.0 / s.m);
          if (lower.hi > lower.lo) out.push_back(lower);
        }
        // Upper piece in s = ln w, w = pi/2 - theta = atan((lambda / h)^(p/2)).
        const double w_min = std::atan(std::pow(s.lambda / h1, pe / 2.0));
        const double w_max = h0 > 0.0 ? std::min(kQuarterPi, std::atan(std::pow(s.lambda / h0, pe / 2.0))) : kQuarterPi;
        if (w_max > w_min) {
          Segment upper = s;
          upper.kind = Segment::Kind::LogCoangle;
          upper.lo = std::log(w_min);
          upper.hi = std::log(w_max);
          out.push_back(upper);
        }
      }
    }
  }

  std::sort(holes.begin(), holes.end(), [](const Hole& x, const Hole& y) { return x.lo < y.lo; });
  double cursor = a;
  const auto plain = [&](double lo, double hi) {
    if (!(hi > lo)) return;
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / kMaxPanel)));
    for (int i = 0; i < n; ++i) {
      Segment s;
      s.kind = Segment::Kind::Plain;
      s.lo = lo + (hi - lo) * i / n;
      s.hi = i + 1 == n ? hi : lo + (hi - lo) * (i + 1) / n;
      out.push_back(s);
    }
  };
  for (const auto& h : holes) {
    plain(cursor, std::min(h.lo, b));
    cursor = std::max(cursor, h.hi);
  }
  plain(cursor, b);
  return out;
}

Moments Kernel::moments(const EtaPoint& p, double a, double b) const {
  if (!(a >= 0.0 && b <= 1.0 && a <= b))
    throw Error(ErrorCode::DomainError, "label interval must lie in [0, 1]");
  Moments m;
  if (a == b) return m;

  const bool positive = profile_.positive();
  const double m0 = profile_.m0;
  const double eps = positive ? m0 * p.gap : 0.0;
  const double eta = p.eta;

  quad::Options qo;
  qo.rel_tol = options_.rel_tol;
  qo.max_evals = options_.max_evals;

  quad::Vec<4> value{}, error{};
  bool converged = true;

  for (const auto& seg : segments(p, a, b)) {
    const auto from_offset = [&](double h, double dh) {
      const double drop = drops_[seg.which](seg.side * h);
      return densities(eps + eta * drop, m0 - drop, dh);
    };
    const auto f = [&](double x) -> quad::Vec<4> {
      switch (seg.kind) {
        case Segment::Kind::Plain: {
          const double slope = datum_.slope(x);
          const double j = positive ? eps + eta * (m0 - slope) : 1.0 - eta * slope;
          return densities(j, slope, 1.0);
        }
        case Segment::Kind::Offset:
          return from_offset(x, 1.0);
        case Segment::Kind::Angle: {
          // theta = v^m, h = lambda tan(theta)^(2/p).
          const double theta = std::pow(x, seg.m);
          const double t = std::tan(theta);
          const double h = seg.lambda * std::pow(t, 2.0 / seg.p);
          const double dh = seg.lambda * (2.0 / seg.p) * std::pow(t, 2.0 / seg.p - 1.0) * (1.0 + t * t) * seg.m *
                            std::pow(x, seg.m - 1.0);
          return from_offset(h, dh);
        }
        case Segment::Kind::LogCoangle: {
          // w = e^x, h = lambda tan(w)^(-2/p); orientation folded into the sign.
          const double w = std::exp(x);
          const double t = std::tan(w);
          const double c = std::cos(w);
          const double h = seg.lambda * std::pow(t, -2.0 / seg.p);
          const double dh = seg.lambda * (2.0 / seg.p) * std::pow(t, -2.0 / seg.p - 1.0) / (c * c) * w;
          return from_offset(h, dh);
        }
      }
      return {};
    };
    const quad::Interval iv{seg.lo, seg.hi};
    const auto r = quad::integrate<4>(f, std::span<const quad::Interval>(&iv, 1), qo);
    for (std::size_t c = 0; c < 4; ++c) {
      value[c] += r.value[c];
      error[c] += r.error[c];
    }
    m.evals += r.evals;
    converged = converged && r.converged;
  }

  m.k0 = value[0];
  m.k1 = value[1];
  m.l = value[2];
  m.q = value[3];
  m.error = error;
  if (!converged) {
    throw QuadratureBudgetExceeded("label integrals at eta = " + std::to_string(eta) + " did not converge", m.k0,
                                   error[0]);
  }
  return m;
}

KernelValue Kernel::value(const EtaPoint& p) const {
  const Moments m = moments(p);
  return {p.eta, m.k0, m.k1, std::max(m.error[0], m.error[1])};
}

double kbar(const InitialDatum& datum, const CriticalProfile& profile, double eta, int b, double tol) {
  if (b != 1 && b != 2) throw Error(ErrorCode::InvalidInput, "kbar order must be 1 or 2");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  KernelOptions opt;
  opt.rel_tol = std::min(tol, 1e-12);
  const Kernel kernel(datum, profile, opt);
  const Moments m = kernel.moments(kernel.at_eta(eta));
  return b == 1 ? m.k0 : m.k1;
}

double beta_integral(double p, double s) {
  if (!(p > 0.0) || !(s > 0.0))
    throw Error(ErrorCode::DomainError, "beta_integral needs positive arguments");
  if (p + s < 100.0) return std::tgamma(p) * std::tgamma(s) / std::tgamma(p + s);
  return std::exp(std::lgamma(p) + std::lgamma(s) - std::lgamma(p + s));
}

double RateModel::evaluate(double gap) const {
  double v = constant * std::pow(gap, exponent);
  if (log_power != 0) v *= std::pow(std::abs(std::log(gap)), log_power);
  return v;
}

double rate_constant(double m0, double c1_abs, double p, int b) {
  const double s = b - 1.0 / p;
  if (!(s > 0.0)) throw Error(ErrorCode::DomainError, "integral stays bounded; no power law");
  return (2.0 / p) * std::pow(m0, 2.0 / p - b) * std::pow(c1_abs, -1.0 / p) * beta_integral(1.0 / p, s);
}

double c2_constant(int k, double m0, double c1_abs) {
  const double kp = 1.0 + k;
  return (2.0 / kp) * std::tgamma(1.0 / kp) * std::tgamma(k / kp) * std::pow(std::pow(m0, 1.0 - k) / c1_abs, 1.0 / kp);
}

double c3_constant(int k, double m0, double c1_abs) {
  const double kp = 1.0 + k;
  return (2.0 / kp) * std::tgamma(1.0 / kp) * std::tgamma((1.0 + 2.0 * k) / kp) *
         std::pow(std::pow(m0, -2.0 * k) / c1_abs, 1.0 / kp);
}

double log_law_coefficient(const CriticalProfile& profile) {
  double a = 0.0;
  for (const auto* mx : profile.dominant())
    if (mx->exponent() == 1.0) a += mx->weight() * 2.0 * profile.m0 / std::abs(mx->c1);
  return a;
}

RateModel asymptotic_rates(const CriticalProfile& profile, int b) {
  if (b != 1 && b != 2) throw Error(ErrorCode::InvalidInput, "rate order must be 1 or 2");
  if (!profile.positive()) throw Error(ErrorCode::NonpositiveMax, "no blowup of the kernel when M0 <= 0");
  if (profile.maximizers.empty()) throw Error(ErrorCode::InvalidInput, "profile lists no maximizers");

  RateModel rate;
  const double p = profile.dominant_exponent();
  for (const auto& mx : profile.maximizers)
    if (mx.kind == MaximizerKind::Fractional) rate.extension = true;

  if (b == 1 && p == 1.0) {
    rate.exponent = 0.0;
    rate.log_power = 1;
    rate.constant = log_law_coefficient(profile);
    return rate;
  }
  if (!(b - 1.0 / p > 0.0)) {
    // The integral converges at eta*; its limit is global, not local.
    rate.exponent = 0.0;
    rate.constant = std::numeric_limits<double>::quiet_NaN();
    return rate;
  }
  rate.exponent = 1.0 / p - b;
  for (const auto* mx : profile.dominant())
    rate.constant += mx->weight() * rate_constant(profile.m0, std::abs(mx->c1), p, b);
  return rate;
}

}  // namespace stagpoint
