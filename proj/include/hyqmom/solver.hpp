#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hyqmom/closure.hpp"
#include "hyqmom/moments.hpp"
#include "hyqmom/riemann.hpp"

namespace hyqmom {

enum class ClosureKind { HyQMOM, QMOM, Gamma };
enum class BoundaryKind { ZeroGradient };

struct SolverConfig {
  std::size_t n = 2;
  std::size_t cells = 4000;
  double x_min = -0.5;
  double x_max = 0.5;
  double cfl = 0.5;
  double t_end = 0.1;
  BoundaryKind boundary = BoundaryKind::ZeroGradient;
  ClosureKind closure = ClosureKind::HyQMOM;
  double gamma = 0.0;  // only with ClosureKind::Gamma, which requires n = 2
  /// HLL speeds from the two neighbouring cells instead of the global
  /// extrema. The time step still uses the global maximum.
  bool local_speeds = false;
  /// Record a realizability loss and stop instead of throwing.
  bool diagnostic = false;
  RiemannSetup initial;

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;
  /// Number of evolved moments: 2n + 1, or 2n for QMOM.
  std::size_t moment_count() const;
};

/// Cell averages, stored cell-major: moments of cell i are
/// data[i * dim, (i + 1) * dim).
struct SolverGrid {
  std::size_t dim = 0;
  std::vector<double> data;
  double time = 0.0;
  double dx = 0.0;
  double x_min = 0.0;

  std::size_t cells() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
  double center(std::size_t i) const noexcept { return x_min + (static_cast<double>(i) + 0.5) * dx; }
  std::span<double> cell(std::size_t i) noexcept { return {data.data() + i * dim, dim}; }
  std::span<const double> cell(std::size_t i) const noexcept { return {data.data() + i * dim, dim}; }
  MomentVector moments(std::size_t i) const { return MomentVector({cell(i).begin(), cell(i).end()}); }
};

/// Maxwellian cells with the left state for centers below zero.
SolverGrid initialize(const SolverConfig& config);

/// Closing moment and extreme characteristic speeds of one cell.
struct CellClosure {
  double m_next = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double min_relative_pivot = 1.0;
};

/// Closure for the configured family; reuses its buffers between calls.
class CellCloser {
 public:
  explicit CellCloser(const SolverConfig& config);
  /// Throws Unrealizable when the cell lies outside moment space.
  CellClosure close(std::span<const double> moments);

 private:
  ClosureKind kind_;
  double gamma_;
  ClosureWorkspace workspace_;
};

/// Global extrema over all cells of the closure's characteristic speeds.
std::pair<double, double> wave_speeds(const SolverGrid& grid, const SolverConfig& config);

/// HLL flux between two states given their physical fluxes.
/// Throws DegenerateWaveFan unless lambda_min < lambda_max.
void hll_flux(std::span<const double> left, std::span<const double> right, std::span<const double> flux_left,
              std::span<const double> flux_right, double lambda_min, double lambda_max, std::span<double> out);

/// Physical flux (M_1, ..., M_N, closed M_{N+1}) of one state.
void physical_flux(std::span<const double> moments, double m_next, std::span<double> out);

/// Per-step diagnostics handed to the observer.
struct StepStats {
  std::size_t step = 0;
  double time = 0.0;
  double dt = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double cfl_number = 0.0;  // max|lambda| dt / dx
  double min_relative_pivot = 1.0;
  double mass_drift = 0.0;      // relative, boundary fluxes accounted for
  double momentum_drift = 0.0;  // relative, boundary fluxes accounted for
  double antisymmetry = 0.0;    // max |M_k(-x) - (-1)^k M_k(x)| / max|M_k|
};

struct RealizabilityEvent {
  std::size_t step = 0;
  std::size_t cell = 0;
  double time = 0.0;
  std::vector<double> moments;
  std::vector<double> hankel;
};

struct RunResult {
  SolverGrid grid;
  std::size_t steps = 0;
  double lambda_min = 0.0;  // over the final solution
  double lambda_max = 0.0;
  double max_mass_drift = 0.0;
  double max_momentum_drift = 0.0;
  double max_cfl_number = 0.0;
  double max_antisymmetry = 0.0;
  double min_relative_pivot = 1.0;
  /// Largest change of a boundary cell from its initial state.
  double boundary_change = 0.0;
  std::optional<RealizabilityEvent> realizability_loss;
  double wall_seconds = 0.0;
};

using StepObserver = std::function<void(const StepStats&, const SolverGrid&)>;

/// Advances one forward-Euler HLL step, never past `t_end`. Throws
/// RealizabilityLoss (cell index) when an updated cell leaves moment space.
void advance(SolverGrid& grid, const SolverConfig& config);

/// Runs from the initial condition to t_end.
RunResult run(const SolverConfig& config, const StepObserver& observer = {});

/// Runs from a given grid (its time is the start time) to t_end.
RunResult run(const SolverConfig& config, SolverGrid start, const StepObserver& observer = {});

/// ||M_k - M_k,exact||_2 / ||M_k,exact||_2 over cell centers, k = 0..dim-1.
std::vector<double> error_norms(const SolverGrid& grid, const RiemannSetup& setup);

}  // namespace hyqmom
