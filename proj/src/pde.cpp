#include "stagpoint/pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

#include "stagpoint/lagrangian.hpp"

namespace stagpoint {

namespace {

// FFTW planning is not thread safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

using Field = std::vector<double>;

class SpectralRhs {
 public:
  explicit SpectralRhs(std::size_t n) : n_(n), modes_(n / 2 + 1), buf_(n), spec_(modes_), work_(modes_) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf_.data(),
                                    reinterpret_cast<fftw_complex*>(spec_.data()), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(work_.data()),
                                     buf_.data(), FFTW_ESTIMATE);
    cutoff_ = n / 3;
  }
  ~SpectralRhs() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  SpectralRhs(const SpectralRhs&) = delete;
  SpectralRhs& operator=(const SpectralRhs&) = delete;

  // Returns max|u| through u_max for the step size rule.
  void operator()(const Field& v, Field& rhs, double& u_max) {
    const double inv_n = 1.0 / static_cast<double>(n_);
    std::copy(v.begin(), v.end(), buf_.begin());
    fftw_execute(forward_);
    for (std::size_t m = 0; m < modes_; ++m)
      if (m > cutoff_ || (n_ % 2 == 0 && m == n_ / 2)) spec_[m] = 0.0;
    spec_[0] = std::complex<double>(spec_[0].real(), 0.0);

    const auto inverse = [&](auto&& coeff, Field& out) {
      for (std::size_t m = 0; m < modes_; ++m) work_[m] = coeff(m) * inv_n;
      fftw_execute(backward_);
      out.assign(buf_.begin(), buf_.end());
    };
    const double two_pi = 2.0 * std::numbers::pi;
    inverse([&](std::size_t m) { return spec_[m]; }, vf_);
    inverse([&](std::size_t m) { return std::complex<double>(0.0, two_pi * m) * spec_[m]; }, vx_);
    inverse(
        [&](std::size_t m) {
          if (m == 0) return std::complex<double>(0.0, 0.0);
          return spec_[m] / std::complex<double>(0.0, two_pi * m);
        },
        u_);
    const double u0 = u_[0];
    u_max = 0.0;
    double sq = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      u_[j] -= u0;
      u_max = std::max(u_max, std::abs(u_[j]));
      sq += vf_[j] * vf_[j];
    }
    const double nonlocal = 2.0 * sq * inv_n;
    rhs.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) buf_[j] = -u_[j] * vx_[j] + vf_[j] * vf_[j] - nonlocal;
    fftw_execute(forward_);
    for (std::size_t m = 0; m < modes_; ++m) work_[m] = (m > cutoff_ || (n_ % 2 == 0 && m == n_ / 2)) ? 0.0 : spec_[m] * inv_n;
    fftw_execute(backward_);
    std::copy(buf_.begin(), buf_.end(), rhs.begin());
  }

 private:
  std::size_t n_;
  std::size_t modes_;
  std::size_t cutoff_ = 0;
  std::vector<double> buf_;
  std::vector<std::complex<double>> spec_;
  std::vector<std::complex<double>> work_;
  Field vf_, vx_, u_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// Cubic-interpolation interval weights; fourth order.
double interval_integral(const Field& f, std::size_t i, double h) {
  const std::size_t n = f.size() - 1;
  if (i == 0) return h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  if (i == n - 1) return h / 24.0 * (9.0 * f[n] + 19.0 * f[n - 1] - 5.0 * f[n - 2] + f[n - 3]);
  return h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
}

double node_integral(const Field& f, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) s += interval_integral(f, i, h);
  return s;
}

class FiniteDifferenceRhs {
 public:
  explicit FiniteDifferenceRhs(std::size_t n) : n_(n), h_(1.0 / static_cast<double>(n)), u_(n + 1), sq_(n + 1) {}

  void operator()(const Field& v, Field& rhs, double& u_max) {
    u_[0] = 0.0;
    for (std::size_t i = 0; i < n_; ++i) u_[i + 1] = u_[i] + interval_integral(v, i, h_);
    u_[n_] = 0.0;
    for (std::size_t i = 0; i <= n_; ++i) sq_[i] = v[i] * v[i];
    const double nonlocal = 2.0 * node_integral(sq_, h_);
    u_max = 0.0;
    rhs.resize(n_ + 1);
    const double c = 1.0 / (6.0 * h_);
    for (std::size_t i = 0; i <= n_; ++i) {
      double transport = 0.0;
      if (i > 0 && i < n_) {
        double vx;
        // Third-order stencils biased upwind; one-sided closures next to the walls.
        const bool from_left = (u_[i] > 0.0 && i >= 2) || i + 2 > n_;
        if (from_left)
          vx = c * (v[i - 2] - 6.0 * v[i - 1] + 3.0 * v[i] + 2.0 * v[i + 1]);
        else
          vx = c * (-2.0 * v[i - 1] - 3.0 * v[i] + 6.0 * v[i + 1] - v[i + 2]);
        transport = u_[i] * vx;
      }
      u_max = std::max(u_max, std::abs(u_[i]));
      rhs[i] = -transport + sq_[i] - nonlocal;
    }
  }

 private:
  std::size_t n_;
  double h_;
  Field u_, sq_;
};

void store(DirectSolution& sol, double t, const Field& v) {
  sol.times.push_back(t);
  sol.v_fields.push_back(v);
}

double max_abs(const Field& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

DirectSolution evolve_direct(const InitialDatum& datum, const DirectOptions& opt) {
  if (!(opt.T >= 0.0) || !std::isfinite(opt.T)) throw Error(ErrorCode::InvalidInput, "T must be finite and non-negative");
  if (!(opt.cfl > 0.0 && opt.cfl <= 1.0)) throw Error(ErrorCode::InvalidInput, "cfl must lie in (0, 1]");
  const bool periodic = datum.bc() == Bc::Periodic;
  if (periodic && !datum.has_odd_symmetry())
    throw Error(ErrorCode::UnanchoredFlow, "periodic datum without odd symmetry has no fixed stagnation point");
  const std::size_t n = opt.n_grid;
  if (n < 8) throw Error(ErrorCode::InvalidInput, "grid needs at least 8 intervals");

  DirectSolution sol;
  sol.spectral = periodic;
  const std::size_t points = periodic ? n : n + 1;
  sol.x_grid.resize(points);
  for (std::size_t i = 0; i < points; ++i) sol.x_grid[i] = static_cast<double>(i) / static_cast<double>(n);
  Field v(points);
  for (std::size_t i = 0; i < points; ++i) v[i] = datum.slope(sol.x_grid[i]);

  std::vector<double> marks;
  for (const double t : opt.store_times)
    if (t > 0.0 && t < opt.T) marks.push_back(t);
  marks.push_back(opt.T);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  std::function<void(const Field&, Field&, double&)> rhs;
  std::unique_ptr<SpectralRhs> spectral;
  std::unique_ptr<FiniteDifferenceRhs> fd;
  if (periodic) {
    spectral = std::make_unique<SpectralRhs>(n);
    rhs = [&](const Field& a, Field& b, double& um) { (*spectral)(a, b, um); };
  } else {
    fd = std::make_unique<FiniteDifferenceRhs>(n);
    rhs = [&](const Field& a, Field& b, double& um) { (*fd)(a, b, um); };
  }

  store(sol, 0.0, v);
  if (opt.T == 0.0) return sol;

  const double dx = 1.0 / static_cast<double>(n);
  Field k1, k2, k3, k4, tmp(points);
  double t = 0.0;
  std::size_t next_mark = 0;
  const auto stage = [&](const Field& k, double c) {
    for (std::size_t i = 0; i < points; ++i) tmp[i] = v[i] + c * k[i];
  };
  while (next_mark < marks.size()) {
    double u_max = 0.0;
    rhs(v, k1, u_max);
    const double v_max = max_abs(v);
    double dt = std::numeric_limits<double>::infinity();
    if (u_max > 0.0) dt = std::min(dt, opt.cfl * dx / u_max);
    if (v_max > 0.0) dt = std::min(dt, opt.cfl / v_max);
    if (!std::isfinite(dt)) dt = marks[next_mark] - t;
    if (dt < opt.dt_floor || !std::isfinite(v_max)) {
      throw ApproachingSingularity("step size collapsed at t = " + std::to_string(t) + ", max|u_x| = " +
                                       std::to_string(v_max),
                                   std::move(sol), t, v_max);
    }
    const double target = marks[next_mark];
    bool hit = false;
    if (t + dt >= target * (1.0 - 1e-15)) {
      dt = target - t;
      hit = true;
    }
    double ignored;
    stage(k1, 0.5 * dt);
    rhs(tmp, k2, ignored);
    stage(k2, 0.5 * dt);
    rhs(tmp, k3, ignored);
    stage(k3, dt);
    rhs(tmp, k4, ignored);
    for (std::size_t i = 0; i < points; ++i) v[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    sol.dt_history.push_back(dt);
    if (hit) {
      t = target;
      store(sol, t, v);
      ++next_mark;
    } else {
      t += dt;
    }
  }
  return sol;
}

DirectSolution evolve_direct(const InitialDatum& datum, double T, std::size_t n_grid, double cfl) {
  DirectOptions opt;
  opt.T = T;
  opt.n_grid = n_grid;
  opt.cfl = cfl;
  return evolve_direct(datum, opt);
}

double grid_integral(const DirectSolution& sol, const std::vector<double>& f) {
  if (f.size() != sol.x_grid.size()) throw Error(ErrorCode::InvalidInput, "field size does not match the grid");
  if (sol.spectral) {
    double s = 0.0;
    for (const double x : f) s += x;
    return s / static_cast<double>(f.size());
  }
  return node_integral(f, 1.0 / static_cast<double>(f.size() - 1));
}

namespace {

std::size_t time_index(const DirectSolution& d, double t) {
  for (std::size_t i = 0; i < d.times.size(); ++i)
    if (std::abs(d.times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  throw Error(ErrorCode::InvalidInput, "time " + std::to_string(t) + " was not stored by the direct solver");
}

CompareReport compare_one(const DirectSolution& d, const EtaTimeMap& map, double t) {
  const std::size_t k = time_index(d, t);
  const FieldSlice slice = eulerian_slice(map, time_slice(map, t), d.x_grid);
  CompareReport r;
  r.t = t;
  r.n_grid = d.spectral ? d.x_grid.size() : d.x_grid.size() - 1;
  std::vector<double> sq(d.x_grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double e = d.v_fields[k][i] - slice.ux_values[i];
    r.max_norm = std::max(r.max_norm, std::abs(e));
    sq[i] = e * e;
  }
  r.rms = std::sqrt(std::max(0.0, grid_integral(d, sq)));
  return r;
}

}  // namespace

CompareReport compare(const DirectSolution& direct, const EtaTimeMap& map, double t) {
  return compare_one(direct, map, t);
}

CompareReport compare(const DirectSolution& coarse, const DirectSolution& fine, const EtaTimeMap& map, double t) {
  CompareReport r = compare_one(coarse, map, t);
  const CompareReport f = compare_one(fine, map, t);
  r.fine_max_norm = f.max_norm;
  r.refinement_ratio = f.max_norm > 0.0 ? r.max_norm / f.max_norm : std::numeric_limits<double>::infinity();
  return r;
}

nlohmann::json to_json(const CompareReport& r) {
  return {{"t", r.t},
          {"n_grid", r.n_grid},
          {"max_norm", r.max_norm},
          {"rms", r.rms},
          {"fine_max_norm", r.fine_max_norm},
          {"refinement_ratio", r.refinement_ratio}};
}

}  // namespace stagpoint
