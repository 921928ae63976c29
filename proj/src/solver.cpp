#include "hyqmom/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#ifdef HYQMOM_HAVE_OPENMP
#include <omp.h>
#endif

#include "hyqmom/error.hpp"
#include "hyqmom/orthopoly.hpp"
#include "numeric_util.hpp"

namespace hyqmom {

void SolverConfig::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "closure order n must be at least 1");
  if (cells < 2) throw Error(ErrorCode::InvalidArgument, "need at least two cells");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw Error(ErrorCode::InvalidArgument, "CFL number must lie in (0, 1]");
  if (!(x_min < x_max)) throw Error(ErrorCode::InvalidArgument, "domain must satisfy x_min < x_max");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidArgument, "t_end must be >= 0");
  if (closure == ClosureKind::Gamma && n != 2)
    throw Error(ErrorCode::InvalidArgument, "the gamma closure family exists only for n = 2");
  if (2 * n + 1 > kMaxExactOrder)
    throw Error(ErrorCode::InvalidArgument, "n is limited to 20");
  initial.validate();
}

std::size_t SolverConfig::moment_count() const { return closure == ClosureKind::QMOM ? 2 * n : 2 * n + 1; }

SolverGrid initialize(const SolverConfig& config) {
  config.validate();
  SolverGrid grid;
  grid.dim = config.moment_count();
  grid.x_min = config.x_min;
  grid.dx = (config.x_max - config.x_min) / static_cast<double>(config.cells);
  grid.data.resize(config.cells * grid.dim);
  const RiemannSetup& s = config.initial;
  const MomentVector left = maxwellian_moments(s.density, s.mean_left, s.variance, grid.dim - 1);
  const MomentVector right = maxwellian_moments(s.density, s.mean_right, s.variance, grid.dim - 1);
  for (std::size_t i = 0; i < config.cells; ++i) {
    const MomentVector& m = grid.center(i) < 0.0 ? left : right;
    std::copy(m.values().begin(), m.values().end(), grid.cell(i).begin());
  }
  return grid;
}

CellCloser::CellCloser(const SolverConfig& config) : kind_(config.closure), gamma_(config.gamma) {}

CellClosure CellCloser::close(std::span<const double> m) {
  CellClosure out;
  if (kind_ == ClosureKind::HyQMOM) {
    ClosureOptions opts;
    opts.compute_eigenvalues = false;
    const FluxClosure fc = workspace_.close(m, opts);
    out.m_next = fc.m_next;
    out.lambda_min = fc.lambda_min;
    out.lambda_max = fc.lambda_max;
    out.min_relative_pivot = fc.min_relative_pivot;
    return out;
  }

  const MomentVector mv({m.begin(), m.end()});
  if (!(mv[0] > 0.0)) throw Error(ErrorCode::Unrealizable, "non-positive density");
  const ChebyshevTable table = chebyshev_table(mv.values());
  out.min_relative_pivot = *std::min_element(table.relative_pivot.begin(), table.relative_pivot.end());
  if (table.breakdown != 0)
    throw Error(ErrorCode::Unrealizable, "Chebyshev pivot vanished at k = " + std::to_string(table.breakdown),
                table.breakdown);

  if (kind_ == ClosureKind::QMOM) {
    out.m_next = qmom_close(mv);
    const std::size_t n = m.size() / 2;
    const EigenResult eig = tridiagonal_eigen(jacobi_matrix(table.rc, n), false);
    out.lambda_min = eig.values.front();
    out.lambda_max = eig.values.back();
    return out;
  }

  const StandardizedState st = raw_to_standardized(mv);
  const double sd = std::sqrt(st.variance);
  const double s5 = gamma_family_close_n2(st.s[0], st.s[1], gamma_).s5;
  const double s_k[6] = {1.0, 0.0, 1.0, st.s[0], st.s[1], s5};
  // M_5 = M_0 sum_i binom(5, i) mean^(5-i) sd^i S_i
  double m5 = 0.0;
  for (std::size_t i = 0; i <= 5; ++i)
    m5 += detail::binomial(5, i) * std::pow(st.mean, static_cast<double>(5 - i)) *
          std::pow(sd, static_cast<double>(i)) * s_k[i];
  out.m_next = st.m0 * m5;
  const auto roots = gamma_family_r3_roots(st.s[0], st.s[1], gamma_);
  out.lambda_min = st.mean + sd * roots.front();
  out.lambda_max = st.mean + sd * roots.back();
  return out;
}

void physical_flux(std::span<const double> m, double m_next, std::span<double> out) {
  const std::size_t dim = m.size();
  for (std::size_t k = 0; k + 1 < dim; ++k) out[k] = m[k + 1];
  out[dim - 1] = m_next;
}

void hll_flux(std::span<const double> left, std::span<const double> right, std::span<const double> flux_left,
              std::span<const double> flux_right, double lambda_min, double lambda_max, std::span<double> out) {
  const std::size_t dim = left.size();
  if (!(lambda_max > lambda_min))
    throw Error(ErrorCode::DegenerateWaveFan, "HLL wave fan needs lambda_min < lambda_max");
  if (lambda_min >= 0.0) {
    std::copy(flux_left.begin(), flux_left.end(), out.begin());
    return;
  }
  if (lambda_max <= 0.0) {
    std::copy(flux_right.begin(), flux_right.end(), out.begin());
    return;
  }
  const double inv = 1.0 / (lambda_max - lambda_min);
  const double jump = lambda_min * lambda_max;
  for (std::size_t k = 0; k < dim; ++k)
    out[k] = (lambda_max * flux_left[k] - lambda_min * flux_right[k] + jump * (right[k] - left[k])) * inv;
}

namespace {

bool is_realizability_error(const Error& e) {
  return e.code() == ErrorCode::Unrealizable || e.code() == ErrorCode::NotStrictlyRealizable ||
         e.code() == ErrorCode::BoundaryBreakdown || e.code() == ErrorCode::NonPositiveDensity;
}

class Stepper {
 public:
  explicit Stepper(const SolverConfig& config) : config_(config) {
    int threads = 1;
#ifdef HYQMOM_HAVE_OPENMP
    threads = omp_get_max_threads();
#endif
    closers_.assign(static_cast<std::size_t>(threads), CellCloser(config));
  }

  /// Closes every cell. Returns the lowest failing cell index, if any.
  std::optional<std::size_t> close_all(const SolverGrid& grid) {
    const std::size_t cells = grid.cells();
    const std::size_t dim = grid.dim;
    closures_.resize(cells);
    flux_.resize(cells * dim);
    failed_.assign(cells, 0);
    const auto count = static_cast<std::ptrdiff_t>(cells);
#ifdef HYQMOM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      std::size_t thread = 0;
#ifdef HYQMOM_HAVE_OPENMP
      thread = static_cast<std::size_t>(omp_get_thread_num());
#endif
      try {
        closures_[i] = closers_[thread].close(grid.cell(i));
        physical_flux(grid.cell(i), closures_[i].m_next, {flux_.data() + i * dim, dim});
      } catch (const Error& e) {
        failed_[i] = is_realizability_error(e) ? 1 : 2;
      }
    }
    for (std::size_t i = 0; i < cells; ++i) {
      if (failed_[i] == 1) return i;
      if (failed_[i] == 2) closers_[0].close(grid.cell(i));  // rethrows the original error serially
    }
    lambda_min_ = std::numeric_limits<double>::infinity();
    lambda_max_ = -std::numeric_limits<double>::infinity();
    min_pivot_ = 1.0;
    for (const CellClosure& c : closures_) {
      lambda_min_ = std::min(lambda_min_, c.lambda_min);
      lambda_max_ = std::max(lambda_max_, c.lambda_max);
      min_pivot_ = std::min(min_pivot_, c.min_relative_pivot);
    }
    return std::nullopt;
  }

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  double min_pivot() const { return min_pivot_; }

  /// Time step the CFL condition allows, clipped to t_end.
  double time_step(const SolverGrid& grid) const {
    const double speed = std::max(std::abs(lambda_min_), std::abs(lambda_max_));
    const double remaining = config_.t_end - grid.time;
    if (!(speed > 0.0)) return remaining;
    return std::min(config_.cfl * grid.dx / speed, remaining);
  }

  /// Forward-Euler update with the closures from the last close_all.
  /// Returns the boundary fluxes used at x_min and x_max (mass, momentum).
  std::array<double, 4> update(SolverGrid& grid, double dt) {
    const std::size_t cells = grid.cells();
    const std::size_t dim = grid.dim;
    iface_.resize((cells + 1) * dim);
    // Zero-gradient ghosts: the boundary interfaces carry the cell flux.
    std::copy_n(flux_.begin(), dim, iface_.begin());
    std::copy_n(flux_.begin() + static_cast<std::ptrdiff_t>((cells - 1) * dim), dim,
                iface_.begin() + static_cast<std::ptrdiff_t>(cells * dim));
    const auto count = static_cast<std::ptrdiff_t>(cells);
#ifdef HYQMOM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ii = 1; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double lo = lambda_min_;
      double hi = lambda_max_;
      if (config_.local_speeds) {
        lo = std::min(closures_[i - 1].lambda_min, closures_[i].lambda_min);
        hi = std::max(closures_[i - 1].lambda_max, closures_[i].lambda_max);
      }
      hll_flux(grid.cell(i - 1), grid.cell(i), {flux_.data() + (i - 1) * dim, dim}, {flux_.data() + i * dim, dim},
               lo, hi, {iface_.data() + i * dim, dim});
    }
    const double ratio = dt / grid.dx;
#ifdef HYQMOM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double* m = grid.data.data() + i * dim;
      const double* west = iface_.data() + i * dim;
      const double* east = west + dim;
      for (std::size_t k = 0; k < dim; ++k) m[k] -= ratio * (east[k] - west[k]);
    }
    const double* west = iface_.data();
    const double* east = iface_.data() + cells * dim;
    return {west[0], dim > 1 ? west[1] : 0.0, east[0], dim > 1 ? east[1] : 0.0};
  }

 private:
  const SolverConfig& config_;
  std::vector<CellCloser> closers_;
  std::vector<CellClosure> closures_;
  std::vector<double> flux_, iface_;
  std::vector<char> failed_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  double min_pivot_ = 1.0;
};

[[noreturn]] void throw_loss(std::size_t cell, double time) {
  throw Error(ErrorCode::RealizabilityLoss,
              "cell " + std::to_string(cell) + " left moment space at t = " + std::to_string(time), cell);
}

RealizabilityEvent make_event(const SolverGrid& grid, std::size_t cell, std::size_t step) {
  RealizabilityEvent ev;
  ev.step = step;
  ev.cell = cell;
  ev.time = grid.time;
  ev.moments.assign(grid.cell(cell).begin(), grid.cell(cell).end());
  try {
    const StandardizedState st = raw_to_standardized(MomentVector(ev.moments));
    if (!st.degenerate_variance && st.order >= 4) ev.hankel = hankel_determinants(st);
  } catch (const Error&) {
    // moments too far gone for a standardized view; keep the raw vector
  }
  return ev;
}

double sum_component(const SolverGrid& grid, std::size_t k, bool absolute) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    const double v = grid.cell(i)[k];
    acc += absolute ? std::abs(v) : v;
  }
  return acc * grid.dx;
}

double antisymmetry_error(const SolverGrid& grid) {
  const std::size_t cells = grid.cells();
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.dim; ++k) {
    double scale = 0.0;
    for (std::size_t i = 0; i < cells; ++i) scale = std::max(scale, std::abs(grid.cell(i)[k]));
    if (scale == 0.0) continue;
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < cells / 2; ++i) {
      const double diff = grid.cell(i)[k] - sign * grid.cell(cells - 1 - i)[k];
      worst = std::max(worst, std::abs(diff) / scale);
    }
  }
  return worst;
}

double boundary_change(const SolverGrid& grid, const SolverGrid& initial) {
  const std::size_t last = grid.cells() - 1;
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.dim; ++k) {
    const double scale = std::max({std::abs(initial.cell(0)[k]), std::abs(initial.cell(last)[k]), 1.0});
    worst = std::max(worst, std::abs(grid.cell(0)[k] - initial.cell(0)[k]) / scale);
    worst = std::max(worst, std::abs(grid.cell(last)[k] - initial.cell(last)[k]) / scale);
  }
  return worst;
}

}  // namespace

std::pair<double, double> wave_speeds(const SolverGrid& grid, const SolverConfig& config) {
  Stepper stepper(config);
  if (auto bad = stepper.close_all(grid)) throw_loss(*bad, grid.time);
  return {stepper.lambda_min(), stepper.lambda_max()};
}

void advance(SolverGrid& grid, const SolverConfig& config) {
  config.validate();
  Stepper stepper(config);
  if (auto bad = stepper.close_all(grid)) throw_loss(*bad, grid.time);
  const double dt = stepper.time_step(grid);
  if (!(dt > 0.0)) return;
  const bool last = dt >= config.t_end - grid.time;
  stepper.update(grid, dt);
  grid.time = last ? config.t_end : grid.time + dt;
  if (auto bad = stepper.close_all(grid)) throw_loss(*bad, grid.time);
}

RunResult run(const SolverConfig& config, const StepObserver& observer) {
  return run(config, initialize(config), observer);
}

RunResult run(const SolverConfig& config, SolverGrid start_grid, const StepObserver& observer) {
  config.validate();
  if (start_grid.dim != config.moment_count() || start_grid.cells() < 2)
    throw Error(ErrorCode::InvalidArgument, "grid does not match the solver configuration");
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.grid = std::move(start_grid);
  SolverGrid& grid = result.grid;
  const SolverGrid initial = grid;
  Stepper stepper(config);

  const double mass0 = sum_component(grid, 0, false);
  const double mass_scale = std::abs(mass0) > 0.0 ? std::abs(mass0) : 1.0;
  double momentum0 = 0.0;
  double momentum_scale = 1.0;
  if (grid.dim > 1) {
    momentum0 = sum_component(grid, 1, false);
    const double abs_momentum = sum_component(grid, 1, true);
    momentum_scale = abs_momentum > 0.0 ? abs_momentum : 1.0;
  }
  double mass_inflow = 0.0;
  double momentum_inflow = 0.0;

  while (true) {
    if (auto bad = stepper.close_all(grid)) {
      if (!config.diagnostic) throw_loss(*bad, grid.time);
      result.realizability_loss = make_event(grid, *bad, result.steps);
      break;
    }
    result.min_relative_pivot = std::min(result.min_relative_pivot, stepper.min_pivot());
    result.lambda_min = stepper.lambda_min();
    result.lambda_max = stepper.lambda_max();
    if (grid.time >= config.t_end) break;

    const double dt = stepper.time_step(grid);
    const bool last = dt >= config.t_end - grid.time;
    const auto boundary = stepper.update(grid, dt);
    grid.time = last ? config.t_end : grid.time + dt;
    ++result.steps;
    mass_inflow += dt * (boundary[0] - boundary[2]);
    momentum_inflow += dt * (boundary[1] - boundary[3]);

    StepStats stats;
    stats.step = result.steps;
    stats.time = grid.time;
    stats.dt = dt;
    stats.lambda_min = stepper.lambda_min();
    stats.lambda_max = stepper.lambda_max();
    stats.cfl_number = std::max(std::abs(stats.lambda_min), std::abs(stats.lambda_max)) * dt / grid.dx;
    stats.min_relative_pivot = stepper.min_pivot();
    stats.mass_drift = std::abs(sum_component(grid, 0, false) - (mass0 + mass_inflow)) / mass_scale;
    if (grid.dim > 1)
      stats.momentum_drift =
          std::abs(sum_component(grid, 1, false) - (momentum0 + momentum_inflow)) / momentum_scale;
    stats.antisymmetry = antisymmetry_error(grid);

    result.max_mass_drift = std::max(result.max_mass_drift, stats.mass_drift);
    result.max_momentum_drift = std::max(result.max_momentum_drift, stats.momentum_drift);
    result.max_cfl_number = std::max(result.max_cfl_number, stats.cfl_number);
    result.max_antisymmetry = std::max(result.max_antisymmetry, stats.antisymmetry);
    if (observer) observer(stats, grid);
  }
  result.boundary_change = boundary_change(grid, initial);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<double> error_norms(const SolverGrid& grid, const RiemannSetup& setup) {
  const std::size_t dim = grid.dim;
  std::vector<double> diff(dim, 0.0), norm(dim, 0.0);
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    const MomentVector exact = exact_moments(setup, grid.time, grid.center(i), dim - 1);
    for (std::size_t k = 0; k < dim; ++k) {
      const double e = grid.cell(i)[k] - exact[k];
      diff[k] += e * e;
      norm[k] += exact[k] * exact[k];
    }
  }
  std::vector<double> out(dim);
  for (std::size_t k = 0; k < dim; ++k) out[k] = norm[k] > 0.0 ? std::sqrt(diff[k] / norm[k]) : std::sqrt(diff[k]);
  return out;
}

}  // namespace hyqmom
