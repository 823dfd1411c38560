#include "stagpoint/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stagpoint/error.hpp"
#include "stagpoint/fit.hpp"
#include "stagpoint/lagrangian.hpp"
#include "stagpoint/parallel.hpp"

namespace stagpoint {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rel_error(double fitted, double predicted) {
  if (predicted == 0.0) return std::abs(fitted);
  return std::abs(fitted - predicted) / std::abs(predicted);
}

void set_blowup_rates(RegularityVerdict& v, const CriticalProfile& profile) {
  const double p = v.exponent;
  if (p == 1.0) {
    const double a = log_law_coefficient(profile);
    v.max_rate = {-1.0, 1.0 / (a * a), -2, v.extension};
    v.min_rate = {-1.0, -1.0 / (a * a), -3, v.extension};
    v.tail_rate = {1.0, a * a, 2, v.extension};
  } else if (p > 1.0) {
    const double c = asymptotic_rates(profile, 1).constant;
    const double e = 1.0 - 2.0 / p;
    v.max_rate = {e, 1.0 / (p * c * c), 0, v.extension};
    v.min_rate = {e, -(1.0 - 1.0 / p) / (c * c), 0, v.extension};
    v.tail_rate = {2.0 / p - 1.0, c * c / (2.0 / p - 1.0), 0, v.extension};
  } else {
    // kbar0 stays bounded; the constants involve kbar0(eta*) and are not tabulated.
    v.max_rate = {-1.0, kNaN, 0, true};
    v.min_rate = {kNaN, kNaN, 0, true};
    v.tail_rate = {1.0, kNaN, 0, true};
    v.notes.push_back("exponent below 1: kbar0 stays bounded, rate constants not tabulated");
  }
  const auto& first = profile.maximizers.front();
  v.time_rate_constant = 2.0 * std::pow(profile.m0 / first.c1, 2);
}

void set_global_limits(RegularityVerdict& v, const CriticalProfile& profile) {
  const double p = v.exponent;
  const double c = asymptotic_rates(profile, 1).constant;
  if (p == 2.0) {
    v.limit_M = 1.0 / (2.0 * c * c);
    v.limit_off = -v.limit_M;
    v.decay_rate = {0.0, v.limit_M, 0, v.extension};
  } else {
    v.limit_M = 0.0;
    v.limit_off = 0.0;
    v.decay_rate = {1.0 - 2.0 / p, 1.0 / (p * c * c), 0, v.extension};
  }
}

}  // namespace

std::string_view to_string(Outcome o) { return o == Outcome::FiniteTimeBlowup ? "FiniteTimeBlowup" : "Global"; }

std::string_view to_string(Governing g) {
  switch (g) {
    case Governing::Thm3_1: return "Thm3_1";
    case Governing::Thm3_2: return "Thm3_2";
    case Governing::Remark3_3: return "Remark3_3";
    case Governing::OutsideHypotheses: return "OutsideHypotheses";
  }
  return "?";
}

RegularityVerdict classify(const CriticalProfile& profile, Bc bc, std::optional<double> t_star) {
  RegularityVerdict v;
  v.m0 = profile.m0;
  v.eta_star = profile.eta_star;
  v.t_star = std::numeric_limits<double>::infinity();

  if (!profile.positive()) {
    v.outcome = Outcome::Global;
    v.governing = Governing::OutsideHypotheses;
    v.notes.push_back("M0 <= 0: J >= 1 for all eta, outside the M0 > 0 hypothesis");
    return v;
  }
  if (profile.maximizers.empty()) throw Error(ErrorCode::InvalidInput, "profile with M0 > 0 lists no maximizers");

  bool fractional = false, interior = false;
  for (const auto& mx : profile.maximizers) {
    fractional = fractional || mx.kind == MaximizerKind::Fractional;
    interior = interior || mx.kind == MaximizerKind::InteriorOrder;
    if (mx.kind == MaximizerKind::InteriorOrder) {
      v.c2.push_back(c2_constant(mx.order, profile.m0, std::abs(mx.c1)));
      v.c3.push_back(c3_constant(mx.order, profile.m0, std::abs(mx.c1)));
      v.k = std::max(v.k, mx.order);
    }
  }
  v.exponent = profile.dominant_exponent();

  if (fractional) {
    v.governing = Governing::Remark3_3;
    v.extension = true;
    v.q = v.exponent;
    v.threshold = v.q == 2.0;
    v.outcome = v.q < 2.0 ? Outcome::FiniteTimeBlowup : Outcome::Global;
    v.notes.push_back("non-smooth exponent q: conclusions stated without proof, checked numerically");
    if (v.threshold) v.notes.push_back("q = 2 is the threshold case: global with a nontrivial steady limit");
  } else if (interior) {
    v.governing = Governing::Thm3_2;
    v.outcome = Outcome::Global;
    if (bc == Bc::Dirichlet) v.notes.push_back("Dirichlet data with vanishing u0'' at a maximizer");
    if (profile.maximizers.size() > 1 || v.exponent != v.k + 1.0)
      v.notes.push_back("several maximizers: the largest exponent governs, boundary ones weigh half");
  } else {
    if (bc == Bc::Periodic)
      throw Error(ErrorCode::InternalInconsistency,
                  "smooth periodic datum whose maximizers all have u0'' != 0 cannot occur");
    v.governing = Governing::Thm3_1;
    v.outcome = Outcome::FiniteTimeBlowup;
  }

  if (v.outcome == Outcome::FiniteTimeBlowup) {
    set_blowup_rates(v, profile);
    v.t_star = t_star ? *t_star : kNaN;
  } else {
    set_global_limits(v, profile);
    if (v.k == 1 && v.exponent == 2.0 && profile.maximizers.size() == 1) {
      // Single interior maximizer: |u0'''| / (2 pi)^2 with |u0'''| = 2 |C1|.
      const double single = 2.0 * std::abs(profile.maximizers.front().c1) / std::pow(2.0 * M_PI, 2);
      if (std::abs(single - v.limit_M) > 1e-12 * single) v.notes.push_back("limit differs from single-maximizer form");
    }
  }
  return v;
}

RegularityVerdict classify(const EtaTimeMap& map, Bc bc) {
  return classify(map.profile(), bc, blowup_time(map, map.profile()));
}

const RateCheck* RateReport::find(std::string_view quantity) const {
  for (const auto& c : checks)
    if (c.quantity == quantity) return &c;
  return nullptr;
}

RateReport verify_rates(const RegularityVerdict& verdict, const EtaTimeMap& map, double gap_lo, double gap_hi,
                        int samples) {
  const auto& profile = map.profile();
  if (!profile.positive()) throw Error(ErrorCode::NonpositiveMax, "no asymptotic regime when M0 <= 0");
  if (!(gap_lo > 0.0 && gap_hi > gap_lo) || samples < 3)
    throw Error(ErrorCode::InvalidInput, "window needs 0 < gap_lo < gap_hi and three samples");
  if (gap_hi > 1e-3 * profile.eta_star || gap_hi < 10.0 * gap_lo)
    throw Error(ErrorCode::InsufficientAsymptoticDepth,
                "window must lie below 1e-3 eta* and span at least a decade");

  RateReport rep;
  rep.gap_lo = gap_lo;
  rep.gap_hi = gap_hi;
  rep.gaps.resize(samples);
  for (int i = 0; i < samples; ++i)
    rep.gaps[i] = gap_lo * std::pow(gap_hi / gap_lo, static_cast<double>(i) / (samples - 1));

  const bool blowup = verdict.outcome == Outcome::FiniteTimeBlowup;
  const bool finite_t = blowup && std::isfinite(map.t_star());
  std::vector<double> k0(samples), k1(samples), big(samples), small(samples), tail(samples);
  parallel_for(samples, [&](std::size_t i) {
    const EtaPoint p = map.kernel().at_gap(rep.gaps[i]);
    TimeSlice s;
    s.point = p;
    s.moments = map.kernel().moments(p);
    k0[i] = s.moments.k0;
    k1[i] = s.moments.k1;
    const Extrema e = extrema(map, s, 2);
    big[i] = e.M;
    small[i] = e.m;
    if (finite_t) tail[i] = map.t_star() - map.t_of(p);
  });

  const auto add = [&](std::string name, const RateModel& pred, std::span<const double> y) {
    RateCheck c;
    c.quantity = std::move(name);
    c.log_power = pred.log_power;
    c.predicted_exponent = pred.exponent;
    c.predicted_constant = pred.constant;
    const PowerFit f = fit_power_law(rep.gaps, y, pred.log_power);
    c.fitted_exponent = f.exponent;
    c.fitted_constant = fit_constant(rep.gaps, y, pred.exponent, pred.log_power);
    c.exponent_rel_error = rel_error(c.fitted_exponent, c.predicted_exponent);
    c.constant_rel_error = rel_error(c.fitted_constant, std::abs(c.predicted_constant));
    rep.checks.push_back(c);
  };

  const RateModel r0 = asymptotic_rates(profile, 1);
  const RateModel r1 = asymptotic_rates(profile, 2);
  if (r0.log_correction()) {
    // kbar0 = A |ln g| + B: the offset B would bias a multiplicative fit.
    std::vector<double> lg(samples);
    for (int i = 0; i < samples; ++i) lg[i] = -std::log(rep.gaps[i]);
    RateCheck c;
    c.quantity = "kbar0";
    c.log_power = 1;
    c.predicted_constant = r0.constant;
    c.fitted_constant = fit_line(lg, k0).slope;
    c.fitted_exponent = fit_power_law(rep.gaps, k0, 1).exponent;
    c.constant_rel_error = rel_error(c.fitted_constant, c.predicted_constant);
    c.exponent_rel_error = std::abs(c.fitted_exponent);
    rep.checks.push_back(c);
  } else if (std::isfinite(r0.constant)) {
    add("kbar0", r0, k0);
  }
  if (std::isfinite(r1.constant)) add("kbar1", r1, k1);

  std::vector<double> neg(samples);
  for (int i = 0; i < samples; ++i) neg[i] = -small[i];
  if (blowup) {
    if (std::isfinite(verdict.max_rate.constant)) {
      add("M", verdict.max_rate, big);
      if (verdict.exponent == 1.0) {
        // The single-maximizer constant (C1/M0)^2 alongside the summed one.
        RateModel single = verdict.max_rate;
        single.constant = std::pow(profile.maximizers.front().c1 / profile.m0, 2);
        add("M_single_maximizer", single, big);
      }
    }
    if (std::isfinite(verdict.min_rate.constant)) add("m", verdict.min_rate, neg);
    if (finite_t && std::isfinite(verdict.tail_rate.constant)) {
      add("t_star_minus_t", verdict.tail_rate, tail);
      if (verdict.exponent == 1.0)
        add("t_star_minus_t_linear", RateModel{1.0, verdict.time_rate_constant, 0, verdict.extension}, tail);
    }
  } else {
    if (verdict.limit_M != 0.0) {
      for (int i = 0; i < samples; ++i)
        rep.max_deviation_from_limit = std::max(rep.max_deviation_from_limit, std::abs(big[i] - verdict.limit_M));
      add("M", verdict.decay_rate, big);
      add("m", RateModel{0.0, verdict.limit_off, 0, verdict.extension}, neg);
    } else {
      add("M", verdict.decay_rate, big);
      const double p = verdict.exponent;
      RateModel off = verdict.decay_rate;
      off.constant = (p - 1.0) * verdict.decay_rate.constant;
      add("m", off, neg);
    }
  }
  return rep;
}

nlohmann::json to_json(const RateModel& r) {
  return {{"exponent", r.exponent},
          {"constant", r.constant},
          {"log_power", r.log_power},
          {"log_correction", r.log_correction()},
          {"extension", r.extension}};
}

nlohmann::json to_json(const RegularityVerdict& v) {
  nlohmann::json j;
  j["outcome"] = to_string(v.outcome);
  j["governing"] = to_string(v.governing);
  j["m0"] = v.m0;
  j["eta_star"] = std::isfinite(v.eta_star) ? nlohmann::json(v.eta_star) : nlohmann::json("inf");
  j["exponent"] = v.exponent;
  if (v.outcome == Outcome::FiniteTimeBlowup) {
    j["t_star"] = v.t_star;
    j["max_rate"] = to_json(v.max_rate);
    j["min_rate"] = to_json(v.min_rate);
    j["tail_rate"] = to_json(v.tail_rate);
    j["time_rate_constant"] = v.time_rate_constant;
  } else {
    j["t_star"] = "inf";
    j["k"] = v.k;
    if (v.governing == Governing::Remark3_3) j["q"] = v.q;
    j["limit_M"] = v.limit_M;
    j["limit_off"] = v.limit_off;
    if (v.governing != Governing::OutsideHypotheses) j["decay_rate"] = to_json(v.decay_rate);
  }
  j["c2"] = v.c2;
  j["c3"] = v.c3;
  j["extension"] = v.extension;
  j["threshold"] = v.threshold;
  j["notes"] = v.notes;
  return j;
}

nlohmann::json to_json(const RateReport& r) {
  nlohmann::json j;
  j["gap_lo"] = r.gap_lo;
  j["gap_hi"] = r.gap_hi;
  j["samples"] = r.gaps.size();
  j["max_deviation_from_limit"] = r.max_deviation_from_limit;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"quantity", c.quantity},
                           {"log_power", c.log_power},
                           {"predicted_exponent", c.predicted_exponent},
                           {"fitted_exponent", c.fitted_exponent},
                           {"exponent_rel_error", c.exponent_rel_error},
                           {"predicted_constant", c.predicted_constant},
                           {"fitted_constant", c.fitted_constant},
                           {"constant_rel_error", c.constant_rel_error}});
  }
  return j;
}

}  // namespace stagpoint
