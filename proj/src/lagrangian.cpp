#include "stagpoint/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stagpoint/error.hpp"
#include "stagpoint/parallel.hpp"

namespace stagpoint {

TimeSlice time_slice(const EtaTimeMap& map, double t) {
  const EtaPoint p = map.point_of_t(t);
  return {t, p, map.kernel().moments(p)};
}

TimeSlice time_slice_at(const EtaTimeMap& map, const EtaPoint& point) {
  return {map.t_of(point), point, map.kernel().moments(point)};
}

double ux_along(const EtaTimeMap& map, const TimeSlice& s, double alpha) {
  const auto& datum = map.kernel().datum();
  const double j = map.kernel().jacobian(alpha, s.point);
  const double k0 = s.moments.k0;
  return (datum.slope(alpha) / j - s.moments.l / k0) / (k0 * k0);
}

double uxx_along(const EtaTimeMap& map, const TimeSlice& s, double alpha) {
  const double j = map.kernel().jacobian(alpha, s.point);
  return map.kernel().datum().derivative(alpha, 2) / (j * s.moments.k0);
}

double uxxx_along(const EtaTimeMap& map, const TimeSlice& s, double alpha) {
  const auto& datum = map.kernel().datum();
  const double d2 = datum.derivative(alpha, 2);
  const double d3 = datum.derivative(alpha, 3);
  if (d2 == 0.0) return d3;
  return d3 + s.point.eta * d2 * d2 / map.kernel().jacobian(alpha, s.point);
}

FlowPoint flow_map(const EtaTimeMap& map, const TimeSlice& s, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::DomainError, "label must lie in [0, 1]");
  const auto& kernel = map.kernel();
  FlowPoint f;
  f.label_relative = !kernel.datum().anchored();
  f.gamma_alpha = 1.0 / (kernel.jacobian(alpha, s.point) * s.moments.k0);
  if (alpha == 1.0) {
    f.gamma = 1.0;
  } else if (alpha > 0.0) {
    f.gamma = kernel.moments(s.point, 0.0, alpha).k0 / s.moments.k0;
  }
  return f;
}

LagrangianSample sample(const EtaTimeMap& map, const TimeSlice& s, double alpha) {
  LagrangianSample out;
  const FlowPoint f = flow_map(map, s, alpha);
  out.alpha = alpha;
  out.t = s.t;
  out.eta = s.point.eta;
  out.gamma = f.gamma;
  out.gamma_alpha = f.gamma_alpha;
  out.label_relative = f.label_relative;
  out.ux = ux_along(map, s, alpha);
  out.uxx = uxx_along(map, s, alpha);
  out.uxxx = uxxx_along(map, s, alpha);
  return out;
}

double ux_along(const EtaTimeMap& map, double alpha, double t) { return ux_along(map, time_slice(map, t), alpha); }
double uxx_along(const EtaTimeMap& map, double alpha, double t) { return uxx_along(map, time_slice(map, t), alpha); }
double uxxx_along(const EtaTimeMap& map, double alpha, double t) {
  return uxxx_along(map, time_slice(map, t), alpha);
}
FlowPoint flow_map(const EtaTimeMap& map, double alpha, double t) { return flow_map(map, time_slice(map, t), alpha); }
LagrangianSample sample(const EtaTimeMap& map, double alpha, double t) {
  return sample(map, time_slice(map, t), alpha);
}

Extrema extrema(const EtaTimeMap& map, const TimeSlice& s, int scan_points) {
  const auto& profile = map.profile();
  Extrema e;
  e.M_scan = -std::numeric_limits<double>::infinity();
  e.m_scan = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    const double a = scan_points > 1 ? static_cast<double>(i) / (scan_points - 1) : 0.0;
    const double v = ux_along(map, s, a);
    e.M_scan = std::max(e.M_scan, v);
    e.m_scan = std::min(e.m_scan, v);
  }
  e.M = e.M_scan;
  if (!profile.maximizers.empty()) {
    e.M = ux_along(map, s, profile.maximizers.front().alpha_bar);
    for (const auto& mx : profile.maximizers) e.M = std::max(e.M, ux_along(map, s, mx.alpha_bar));
  }
  e.m = e.m_scan;
  if (!profile.minimizers.empty()) {
    e.m = ux_along(map, s, profile.minimizers.front());
    for (const double a : profile.minimizers) e.m = std::min(e.m, ux_along(map, s, a));
  }
  return e;
}

Extrema extrema(const EtaTimeMap& map, double t, int scan_points) {
  return extrema(map, time_slice(map, t), scan_points);
}

double nonlocal_term(const TimeSlice& s) {
  // -2 int (u_x o gamma)^2 gamma_alpha = -2 (Q - L^2/K0) / K0^5
  const double k0 = s.moments.k0;
  const double l = s.moments.l;
  const double i = -2.0 * (s.moments.q - l * l / k0) / std::pow(k0, 5);
  return i == 0.0 ? 0.0 : i;
}

double nonlocal_term(const EtaTimeMap& map, double t) { return nonlocal_term(time_slice(map, t)); }

double label_of_position(const EtaTimeMap& map, const TimeSlice& s, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::DomainError, "position must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const auto& kernel = map.kernel();
  double lo = 0.0, hi = 1.0;
  double a = x;
  // Safeguarded Newton; gamma is strictly increasing with gamma_alpha known exactly.
  for (int it = 0; it < 200; ++it) {
    const double g = kernel.moments(s.point, 0.0, a).k0 / s.moments.k0;
    const double f = g - x;
    if (f == 0.0) return a;
    if (f < 0.0) lo = a; else hi = a;
    if (std::abs(f) <= 1e-15 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(a, 1e-300))
      return a;
    const double ga = 1.0 / (kernel.jacobian(a, s.point) * s.moments.k0);
    double next = a - f / ga;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == a) return a;
    a = next;
  }
  return a;
}

FieldSlice eulerian_slice(const EtaTimeMap& map, const TimeSlice& s, const std::vector<double>& x_grid) {
  if (!map.kernel().datum().anchored())
    throw Error(ErrorCode::UnanchoredFlow, "periodic datum without odd symmetry has no absolute positions");
  FieldSlice out;
  out.t = s.t;
  out.eta = s.point.eta;
  out.x_grid = x_grid;
  out.labels.resize(x_grid.size());
  out.ux_values.resize(x_grid.size());
  parallel_for(x_grid.size(), [&](std::size_t i) {
    out.labels[i] = label_of_position(map, s, x_grid[i]);
    out.ux_values[i] = ux_along(map, s, out.labels[i]);
  });
  out.M = -std::numeric_limits<double>::infinity();
  out.m = std::numeric_limits<double>::infinity();
  for (const double v : out.ux_values) {
    out.M = std::max(out.M, v);
    out.m = std::min(out.m, v);
  }
  out.I = nonlocal_term(s);
  return out;
}

FieldSlice eulerian_slice(const EtaTimeMap& map, double t, std::size_t n_points) {
  if (n_points < 2) throw Error(ErrorCode::InvalidInput, "a slice needs at least two points");
  std::vector<double> x(n_points);
  for (std::size_t i = 0; i < n_points; ++i) x[i] = static_cast<double>(i) / (n_points - 1);
  return eulerian_slice(map, time_slice(map, t), x);
}

}  // namespace stagpoint
