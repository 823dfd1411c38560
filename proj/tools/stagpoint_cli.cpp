// stagpoint: analyze, evolve, blowup, rates and xval subcommands.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stagpoint/classifier.hpp"
#include "stagpoint/datum_json.hpp"
#include "stagpoint/lagrangian.hpp"
#include "stagpoint/pde.hpp"
#include "stagpoint/presets.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stagpoint;

namespace {

struct RunConfig {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  double tol = 1e-12;
  double eta_gap = 1e-10;
  int grid = 0;  // 0: per-command default
  std::string times;
  std::string window;
  int samples = 25;
  std::uint64_t seed = 20240101;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json finite_or_inf(double x) { return std::isfinite(x) ? json(x) : json(x > 0 ? "inf" : "-inf"); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw Error(ErrorCode::InvalidInput, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// Fills unset fields of cfg from the JSON config file; command-line flags win.
InitialDatum resolve(RunConfig& cfg, const CLI::App& cmd) {
  json file;
  if (!cfg.config_path.empty()) {
    std::ifstream in(cfg.config_path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open config " + cfg.config_path);
    try {
      in >> file;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidInput, std::string("config is not valid JSON: ") + e.what());
    }
  }
  const auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  if (file.is_object()) {
    if (!given("--out") && file.contains("out")) cfg.out_dir = file["out"].get<std::string>();
    if (!given("--tol") && file.contains("tol")) cfg.tol = file["tol"].get<double>();
    if (!given("--eta-gap") && file.contains("eta_gap")) cfg.eta_gap = file["eta_gap"].get<double>();
    if (!given("--grid") && file.contains("grid")) cfg.grid = file["grid"].get<int>();
    if (!given("--samples") && file.contains("samples")) cfg.samples = file["samples"].get<int>();
    if (!given("--seed") && file.contains("seed")) cfg.seed = file["seed"].get<std::uint64_t>();
    const auto list = [](const json& j) {
      if (j.is_string()) return j.get<std::string>();
      std::string s;
      for (const auto& v : j) s += (s.empty() ? "" : ",") + num(v.get<double>());
      return s;
    };
    if (!given("--times") && file.contains("times")) cfg.times = list(file["times"]);
    if (!given("--window") && file.contains("window")) cfg.window = list(file["window"]);
  }
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidInput, "--tol must be positive");
  if (!(cfg.eta_gap > 0.0 && cfg.eta_gap < 1.0)) throw Error(ErrorCode::InvalidInput, "--eta-gap must lie in (0, 1)");
  if (cfg.grid < 0) throw Error(ErrorCode::InvalidInput, "--grid must be positive");

  std::optional<InitialDatum> datum;
  if (!cfg.preset.empty()) {
    datum = preset(cfg.preset);
  } else if (file.is_object()) {
    datum = datum_from_json(file.contains("datum") ? file["datum"] : file);
  } else {
    throw Error(ErrorCode::InvalidInput, "give --preset or --config");
  }
  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir))
      throw Error(ErrorCode::InvalidInput, "output directory " + cfg.out_dir + " is not writable");
  }
  return validate(*datum);
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& text) {
  std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + name);
  out << text;
}

EtaTimeMap make_map(const InitialDatum& datum, const CriticalProfile& profile, const RunConfig& cfg) {
  TimeMapOptions o;
  o.quad_tol = cfg.tol;
  o.eta_gap = cfg.eta_gap;
  return EtaTimeMap(datum, profile, o);
}

json profile_json(const CriticalProfile& p) {
  json j;
  j["m0"] = p.m0;
  j["eta_star"] = finite_or_inf(p.eta_star);
  j["min_slope"] = p.min_slope;
  j["minimizers"] = p.minimizers;
  j["maximizers"] = json::array();
  for (const auto& m : p.maximizers) {
    json e{{"alpha_bar", m.alpha_bar}, {"kind", to_string(m.kind)}, {"c1", m.c1}, {"radius", m.radius}};
    if (m.kind == MaximizerKind::InteriorOrder) e["k"] = m.order;
    if (m.kind == MaximizerKind::Fractional) e["q"] = m.q;
    j["maximizers"].push_back(e);
  }
  return j;
}

std::string profile_csv(const CriticalProfile& p) {
  std::string s = "alpha_bar,kind,k,q,c1,radius\n";
  for (const auto& m : p.maximizers)
    s += num(m.alpha_bar) + "," + std::string(to_string(m.kind)) + "," + std::to_string(m.order) + "," +
         num(m.exponent()) + "," + num(m.c1) + "," + num(m.radius) + "\n";
  return s;
}

int cmd_analyze(RunConfig& cfg, const CLI::App& cmd) {
  const InitialDatum datum = resolve(cfg, cmd);
  const CriticalProfile profile = critical_profile(datum);
  const EtaTimeMap map = make_map(datum, profile, cfg);
  const RegularityVerdict verdict = classify(map, datum.bc());

  // Sampled check that no label beats the reported maximum.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10000; ++i) excess = std::max(excess, datum.slope(unif(rng)) - profile.m0);

  json j;
  j["datum"] = datum_to_json(datum);
  j["profile"] = profile_json(profile);
  j["verdict"] = to_json(verdict);
  j["sampled_max_excess"] = excess;
  j["seed"] = cfg.seed;
  std::cout << j.dump(2) << "\n";

  std::cout << "\n" << profile_csv(profile);
  if (!cfg.out_dir.empty()) {
    write_file(cfg, "verdict.json", j.dump(2) + "\n");
    write_file(cfg, "profile.csv", profile_csv(profile));
  }
  return 0;
}

std::vector<double> default_times(const EtaTimeMap& map) {
  const double end = std::isfinite(map.t_star()) ? 0.95 * map.t_star() : 5.0;
  std::vector<double> t;
  for (int i = 0; i <= 10; ++i) t.push_back(end * i / 10.0);
  return t;
}

int cmd_evolve(RunConfig& cfg, const CLI::App& cmd) {
  const InitialDatum datum = resolve(cfg, cmd);
  const CriticalProfile profile = critical_profile(datum);
  const EtaTimeMap map = make_map(datum, profile, cfg);
  const std::vector<double> times = cfg.times.empty() ? default_times(map) : parse_list(cfg.times);
  const int points = cfg.grid > 0 ? cfg.grid : 101;

  std::string csv = "t,eta,M,m,I\n";
  int index = 0;
  for (const double t : times) {
    const TimeSlice s = time_slice(map, t);
    const Extrema e = extrema(map, s);
    csv += num(t) + "," + num(s.point.eta) + "," + num(e.M) + "," + num(e.m) + "," + num(nonlocal_term(s)) + "\n";
    if (!cfg.out_dir.empty() && datum.anchored()) {
      std::vector<double> x(points);
      for (int i = 0; i < points; ++i) x[i] = static_cast<double>(i) / (points - 1);
      const FieldSlice f = eulerian_slice(map, s, x);
      std::string slice = "x,ux\n";
      for (int i = 0; i < points; ++i) slice += num(f.x_grid[i]) + "," + num(f.ux_values[i]) + "\n";
      char name[32];
      std::snprintf(name, sizeof name, "slice_%03d.csv", index);
      write_file(cfg, name, slice);
    }
    ++index;
  }
  std::cout << csv;
  if (!cfg.out_dir.empty()) write_file(cfg, "extrema.csv", csv);
  return 0;
}

int cmd_blowup(RunConfig& cfg, const CLI::App& cmd) {
  const InitialDatum datum = resolve(cfg, cmd);
  const CriticalProfile profile = critical_profile(datum);
  const EtaTimeMap map = make_map(datum, profile, cfg);
  const RegularityVerdict verdict = classify(map, datum.bc());

  json j;
  j["outcome"] = to_string(verdict.outcome);
  j["governing"] = to_string(verdict.governing);
  j["eta_star"] = finite_or_inf(map.eta_star());
  j["t_star"] = finite_or_inf(map.t_star());
  j["finite_blowup"] = map.finite_blowup();
  j["kbar0_tail"] = to_json(map.rate());
  j["map_nodes"] = map.samples().size();

  std::string approach = "gap,eta,t,M,m\n";
  if (profile.positive()) {
    for (int e = 1; e <= 10; ++e) {
      const double gap = map.eta_star() * std::pow(10.0, -e);
      if (gap < cfg.eta_gap * map.eta_star()) break;
      const TimeSlice s = time_slice_at(map, map.kernel().at_gap(gap));
      const Extrema x = extrema(map, s, 2);
      approach += num(gap) + "," + num(s.point.eta) + "," + num(s.t) + "," + num(x.M) + "," + num(x.m) + "\n";
    }
  }
  std::cout << j.dump(2) << "\n\n" << approach;
  if (!cfg.out_dir.empty()) {
    std::ostringstream m;
    map.write_csv(m);
    write_file(cfg, "map.csv", m.str());
    write_file(cfg, "approach.csv", approach);
    write_file(cfg, "blowup.json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_rates(RunConfig& cfg, const CLI::App& cmd) {
  const InitialDatum datum = resolve(cfg, cmd);
  const CriticalProfile profile = critical_profile(datum);
  const EtaTimeMap map = make_map(datum, profile, cfg);
  const RegularityVerdict verdict = classify(map, datum.bc());
  if (!profile.positive()) throw Error(ErrorCode::NonpositiveMax, "M0 <= 0: there is no asymptotic regime to verify");

  double lo = verdict.outcome == Outcome::FiniteTimeBlowup ? 1e-10 : 1e-8;
  double hi = verdict.outcome == Outcome::FiniteTimeBlowup ? 1e-6 : 1e-4;
  if (!cfg.window.empty()) {
    const auto w = parse_list(cfg.window);
    if (w.size() != 2) throw Error(ErrorCode::InvalidInput, "--window takes lo,hi");
    lo = w[0];
    hi = w[1];
  }
  const RateReport report =
      verify_rates(verdict, map, lo * profile.eta_star, hi * profile.eta_star, cfg.samples);

  json j;
  j["verdict"] = to_json(verdict);
  j["window_relative"] = {lo, hi};
  j["report"] = to_json(report);
  json ratios = json::array();
  for (std::size_t i = 0; i < verdict.c2.size(); ++i) {
    const auto& mx = profile.maximizers[i];
    ratios.push_back({{"alpha_bar", mx.alpha_bar},
                      {"c3_over_c2", verdict.c3[i] / verdict.c2[i]},
                      {"k_over_m0_k_plus_1", mx.order / (profile.m0 * (1.0 + mx.order))}});
  }
  j["constant_ratios"] = ratios;
  std::cout << j.dump(2) << "\n";
  if (!cfg.out_dir.empty()) write_file(cfg, "rates.json", j.dump(2) + "\n");
  return 0;
}

int cmd_xval(RunConfig& cfg, const CLI::App& cmd) {
  const InitialDatum datum = resolve(cfg, cmd);
  const CriticalProfile profile = critical_profile(datum);
  const EtaTimeMap map = make_map(datum, profile, cfg);
  const std::vector<double> times = cfg.times.empty() ? std::vector<double>{1.0} : parse_list(cfg.times);
  const std::size_t n = cfg.grid > 0 ? cfg.grid : (datum.bc() == Bc::Periodic ? 256 : 512);

  DirectOptions o;
  o.n_grid = n;
  o.T = 0.0;
  for (const double t : times) o.T = std::max(o.T, t);
  o.store_times = times;
  const DirectSolution coarse = evolve_direct(datum, o);
  o.n_grid = 2 * n;
  const DirectSolution fine = evolve_direct(datum, o);

  json j;
  j["n_grid"] = n;
  j["scheme"] = coarse.spectral ? "pseudospectral" : "upwind finite differences";
  j["steps"] = coarse.dt_history.size();
  j["comparisons"] = json::array();
  for (const double t : times) {
    const CompareReport r = compare(coarse, fine, map, t);
    json c = to_json(r);
    for (std::size_t k = 0; k < coarse.times.size(); ++k)
      if (coarse.times[k] == t) c["mean"] = grid_integral(coarse, coarse.v_fields[k]);
    j["comparisons"].push_back(c);
  }
  std::cout << j.dump(2) << "\n";
  if (!cfg.out_dir.empty()) {
    write_file(cfg, "xval.json", j.dump(2) + "\n");
    for (std::size_t k = 0; k < coarse.times.size(); ++k) {
      std::string field = "x,v\n";
      for (std::size_t i = 0; i < coarse.x_grid.size(); ++i)
        field += num(coarse.x_grid[i]) + "," + num(coarse.v_fields[k][i]) + "\n";
      char name[40];
      std::snprintf(name, sizeof name, "field_%03zu.csv", k);
      write_file(cfg, name, field);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian representation-formula solver for u_xt + u u_xx - u_x^2 = -2 int u_x^2"};
  app.require_subcommand(1);
  RunConfig cfg;

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(RunConfig&, const CLI::App&);
  };
  const Entry entries[] = {
      {"analyze", "classify a datum and print its critical profile", cmd_analyze},
      {"evolve", "extrema time series and field slices", cmd_evolve},
      {"blowup", "blowup time, eta-time map and approach table", cmd_blowup},
      {"rates", "fit asymptotic rates against the predicted laws", cmd_rates},
      {"xval", "compare a direct PDE solve with the representation formula", cmd_xval},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", cfg.config_path, "JSON run config (datum plus parameters)");
    sub->add_option("--preset", cfg.preset, "named datum")->check(CLI::IsMember(preset_names()));
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--tol", cfg.tol, "quadrature relative tolerance");
    sub->add_option("--eta-gap", cfg.eta_gap, "closest tabulated approach to eta*, relative");
    sub->add_option("--grid", cfg.grid, "slice points (evolve) or PDE grid (xval)");
    sub->add_option("--times", cfg.times, "comma-separated times");
    sub->add_option("--window", cfg.window, "rates window lo,hi relative to eta*");
    sub->add_option("--samples", cfg.samples, "rates window samples");
    sub->add_option("--seed", cfg.seed, "seed for sampled checks");
    subs.emplace_back(sub, &e);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, entry] : subs)
      if (sub->parsed()) return entry->run(cfg, *sub);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
