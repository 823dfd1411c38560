#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "stagpoint/time_map.hpp"

namespace stagpoint {

enum class Outcome { FiniteTimeBlowup, Global };
enum class Governing { Thm3_1, Thm3_2, Remark3_3, OutsideHypotheses };

std::string_view to_string(Outcome o);
std::string_view to_string(Governing g);

struct RegularityVerdict {
  Outcome outcome = Outcome::Global;
  Governing governing = Governing::OutsideHypotheses;
  double m0 = 0.0;
  double eta_star = 0.0;
  double exponent = 0.0;  // dominant local exponent p (1, k + 1 or q)

  // FiniteTimeBlowup
  double t_star = 0.0;       // NaN until a map supplies it
  RateModel max_rate;        // M(t) in powers of eta* - eta
  RateModel min_rate;        // m(t)
  RateModel tail_rate;       // t* - t
  double time_rate_constant = 0.0;  // 2 (M0/C1)^2, first maximizer

  // Global
  int k = 0;                 // dominant order, 0 when not an InteriorOrder case
  double q = 0.0;            // Fractional exponent when governing is Remark3_3
  double limit_M = 0.0;
  double limit_off = 0.0;
  RateModel decay_rate;      // M(t) approach to its limit for k >= 3 or q > 2

  // Single-maximizer constants, per listed maximizer.
  std::vector<double> c2;
  std::vector<double> c3;

  bool extension = false;    // non-smooth exponent, beyond the theorems
  bool threshold = false;    // q = 2
  std::vector<std::string> notes;
};

/// Decision table over the profile. t_star, when given, is copied into a
/// blowup verdict. Throws InternalInconsistency for smooth periodic data whose
/// maximizers all have u0'' != 0.
RegularityVerdict classify(const CriticalProfile& profile, Bc bc, std::optional<double> t_star = std::nullopt);

/// Classifies and fills t* from the map.
RegularityVerdict classify(const EtaTimeMap& map, Bc bc);

struct RateCheck {
  std::string quantity;
  double predicted_exponent = 0.0;
  double fitted_exponent = 0.0;
  double predicted_constant = 0.0;
  double fitted_constant = 0.0;
  int log_power = 0;
  double exponent_rel_error = 0.0;
  double constant_rel_error = 0.0;
};

struct RateReport {
  double gap_lo = 0.0;
  double gap_hi = 0.0;
  std::vector<double> gaps;
  std::vector<RateCheck> checks;
  double max_deviation_from_limit = 0.0;  // |M - limit_M| over the window (global k = 1 / q = 2)

  const RateCheck* find(std::string_view quantity) const;
};

/// Fits kbar0, kbar1, M, m and (for blowup) t* - t over eta* - eta in
/// [gap_lo, gap_hi]. Throws InsufficientAsymptoticDepth when the window does
/// not reach below 1e-3 eta* or spans less than a decade.
RateReport verify_rates(const RegularityVerdict& verdict, const EtaTimeMap& map, double gap_lo, double gap_hi,
                        int samples = 25);

nlohmann::json to_json(const RateModel& r);
nlohmann::json to_json(const RegularityVerdict& v);
nlohmann::json to_json(const RateReport& r);

}  // namespace stagpoint
