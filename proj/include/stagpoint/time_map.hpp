#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "stagpoint/kernel.hpp"

namespace stagpoint {

struct MapSample {
  double eta = 0.0;
  double gap = 0.0;
  double t = 0.0;
  double kbar0 = 0.0;
  double kbar1 = 0.0;
};

struct TimeMapOptions {
  double quad_tol = 1e-12;
  double eta_gap = 1e-10;     // closest tabulated approach, relative to eta*
  int nodes_per_octave = 4;
};

/// Tabulation of t(eta) = int_0^eta kbar0^2 and its inverse. Nodes are
/// geometric in eta* - eta; off-node values are recomputed by quadrature from
/// the nearest node, so interpolation only supplies starting guesses.
class EtaTimeMap {
 public:
  EtaTimeMap(const InitialDatum& datum, const CriticalProfile& profile, const TimeMapOptions& options = {});

  const std::vector<MapSample>& samples() const { return samples_; }
  const Kernel& kernel() const { return *kernel_; }
  const CriticalProfile& profile() const { return kernel_->profile(); }
  const TimeMapOptions& options() const { return options_; }

  double eta_star() const { return profile().eta_star; }
  /// +inf when the integral for t diverges at eta*.
  double t_star() const { return t_star_; }
  bool finite_blowup() const { return finite_; }
  /// Leading law of kbar0 near eta*, used for the tail; default-constructed when M0 <= 0.
  const RateModel& rate() const { return rate_; }

  double kbar0(const EtaPoint& p) const;
  double t_of(const EtaPoint& p) const;
  double t_of_eta(double eta) const { return t_of(kernel_->at_eta(eta)); }

  /// Inverse map; throws BeyondBlowup for t >= t*. Residual |t(eta) - t| is
  /// driven below 1e-13 max(1, t) unless the gap underflows.
  EtaPoint point_of_t(double t) const;
  double eta_of_t(double t) const { return point_of_t(t).eta; }

  /// Columns eta,t,kbar0,kbar1.
  void write_csv(std::ostream& out) const;

 private:
  // Increment of t between two gaps (or two etas when M0 <= 0).
  double t_between(double from, double to) const;
  double tail_below(double gap) const;
  EtaPoint refine(double t, double s_guess, double s_lo, double s_hi) const;

  std::shared_ptr<const Kernel> kernel_;
  TimeMapOptions options_;
  std::vector<MapSample> samples_;
  std::vector<double> log_gap_;  // ln(gap) per sample, decreasing; eta per sample when M0 <= 0
  double t_star_;
  bool finite_ = false;
  RateModel rate_;
  bool trivial_ = false;
};

EtaTimeMap build_map(const InitialDatum& datum, const CriticalProfile& profile, double quad_tol = 1e-12,
                     double eta_gap = 1e-10);

/// Finite t* iff the dominant exponent is below 2 (the integral of kbar0^2 converges).
double blowup_time(const EtaTimeMap& map, const CriticalProfile& profile);

double eta_of_t(const EtaTimeMap& map, double t);

}  // namespace stagpoint
