#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "stagpoint/error.hpp"
#include "stagpoint/time_map.hpp"

namespace stagpoint {

/// Method-of-lines solution of v_t + u v_x = v^2 - 2 int v^2, u = int_0^x v.
struct DirectSolution {
  std::vector<double> x_grid;  // periodic: j/n, j < n; Dirichlet: i/n, i <= n
  std::vector<double> times;
  std::vector<std::vector<double>> v_fields;
  std::vector<double> dt_history;
  bool spectral = false;
};

struct DirectOptions {
  double T = 1.0;
  std::size_t n_grid = 256;
  double cfl = 0.4;
  std::vector<double> store_times;  // T is always stored
  double dt_floor = 1e-9;
};

/// Raised when the step size collapses; carries everything computed so far.
class ApproachingSingularity : public Error {
 public:
  ApproachingSingularity(const std::string& what, DirectSolution partial, double time_reached, double v_max)
      : Error(ErrorCode::ApproachingSingularity, what),
        partial(std::move(partial)),
        time_reached(time_reached),
        v_max(v_max) {}

  DirectSolution partial;
  double time_reached;
  double v_max;  // grid max |u_x| when the step collapsed
};

/// Dirichlet data or periodic data with odd symmetry; UnanchoredFlow otherwise.
DirectSolution evolve_direct(const InitialDatum& datum, const DirectOptions& options);
DirectSolution evolve_direct(const InitialDatum& datum, double T, std::size_t n_grid, double cfl = 0.4);

struct CompareReport {
  double t = 0.0;
  std::size_t n_grid = 0;
  double max_norm = 0.0;
  double rms = 0.0;
  double refinement_ratio = 0.0;  // coarse error / fine error when two resolutions are given
  double fine_max_norm = 0.0;
};

/// Difference between the stored field at t and the representation formula on the same grid.
CompareReport compare(const DirectSolution& direct, const EtaTimeMap& map, double t);
/// Same, plus the error ratio against a second solution on a finer grid.
CompareReport compare(const DirectSolution& coarse, const DirectSolution& fine, const EtaTimeMap& map, double t);

/// Grid quadrature of int_0^1 f, consistent with the solver's rule.
double grid_integral(const DirectSolution& sol, const std::vector<double>& f);

nlohmann::json to_json(const CompareReport& r);

}  // namespace stagpoint
