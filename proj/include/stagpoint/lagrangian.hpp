#pragma once

#include <cstddef>
#include <vector>

#include "stagpoint/time_map.hpp"

namespace stagpoint {

/// Kernel integrals frozen at one time; everything per-label is cheap after this.
struct TimeSlice {
  double t = 0.0;
  EtaPoint point;
  Moments moments;
};

TimeSlice time_slice(const EtaTimeMap& map, double t);
TimeSlice time_slice_at(const EtaTimeMap& map, const EtaPoint& point);

struct LagrangianSample {
  double alpha = 0.0;
  double t = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  double gamma_alpha = 0.0;
  double ux = 0.0;
  double uxx = 0.0;
  double uxxx = 0.0;
  bool label_relative = false;  // periodic data without a pinned stagnation point
};

struct FlowPoint {
  double gamma = 0.0;
  double gamma_alpha = 0.0;
  bool label_relative = false;
};

double ux_along(const EtaTimeMap& map, const TimeSlice& slice, double alpha);
double uxx_along(const EtaTimeMap& map, const TimeSlice& slice, double alpha);
double uxxx_along(const EtaTimeMap& map, const TimeSlice& slice, double alpha);
FlowPoint flow_map(const EtaTimeMap& map, const TimeSlice& slice, double alpha);
LagrangianSample sample(const EtaTimeMap& map, const TimeSlice& slice, double alpha);

// Single-shot forms; each solves for eta(t) first and throws BeyondBlowup for t >= t*.
double ux_along(const EtaTimeMap& map, double alpha, double t);
double uxx_along(const EtaTimeMap& map, double alpha, double t);
double uxxx_along(const EtaTimeMap& map, double alpha, double t);
FlowPoint flow_map(const EtaTimeMap& map, double alpha, double t);
LagrangianSample sample(const EtaTimeMap& map, double alpha, double t);

struct Extrema {
  double M = 0.0;  // u_x at the maximizer labels
  double m = 0.0;  // u_x at the minimizer labels of u0'
  double M_scan = 0.0;  // grid-scan cross-check over labels
  double m_scan = 0.0;
};

Extrema extrema(const EtaTimeMap& map, const TimeSlice& slice, int scan_points = 1001);
Extrema extrema(const EtaTimeMap& map, double t, int scan_points = 1001);

/// -2 int u_x^2 dx, evaluated in labels.
double nonlocal_term(const TimeSlice& slice);
double nonlocal_term(const EtaTimeMap& map, double t);

struct FieldSlice {
  double t = 0.0;
  double eta = 0.0;
  std::vector<double> x_grid;
  std::vector<double> labels;
  std::vector<double> ux_values;
  double M = 0.0;
  double m = 0.0;
  double I = 0.0;
};

/// u_x on a uniform grid of n_points in [0, 1] by inverting x = gamma(alpha, t).
/// Throws UnanchoredFlow for periodic data without odd symmetry.
FieldSlice eulerian_slice(const EtaTimeMap& map, double t, std::size_t n_points);
FieldSlice eulerian_slice(const EtaTimeMap& map, const TimeSlice& slice, const std::vector<double>& x_grid);

/// Label alpha with gamma(alpha, t) = x.
double label_of_position(const EtaTimeMap& map, const TimeSlice& slice, double x);

}  // namespace stagpoint
