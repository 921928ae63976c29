#include "app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <utility>

#include "hyqmom/closure.hpp"
#include "hyqmom/error.hpp"
#include "hyqmom/orthopoly.hpp"
#include "hyqmom/riemann.hpp"
#include "hyqmom/solver.hpp"

#ifndef HYQMOM_VERSION
#define HYQMOM_VERSION "unknown"
#endif

namespace hyqmom::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Manifest = std::vector<std::pair<std::string, std::string>>;

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  return fs::path(dir);
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& command, const Manifest& manifest,
            const std::string& columns_doc)
      : path_(path), file_(path) {
    if (!file_) throw IoError("cannot open " + path.string());
    file_ << "# hyqmom " << HYQMOM_VERSION << "\n# command = " << command << '\n';
    for (const auto& [key, value] : manifest) file_ << "# " << key << " = " << value << '\n';
    file_ << "# columns: " << columns_doc << '\n';
  }

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) file_ << (i ? "," : "") << names[i];
    file_ << '\n';
  }

  CsvWriter& cell(double v) {
    sep();
    file_ << format_double(v);
    return *this;
  }
  CsvWriter& blank() {
    sep();
    return *this;
  }
  void end_row() {
    file_ << '\n';
    first_ = true;
  }

  void close() {
    file_.close();
    if (!file_) throw IoError("write failed: " + path_.string());
  }

 private:
  void sep() {
    if (!first_) file_ << ',';
    first_ = false;
  }

  fs::path path_;
  std::ofstream file_;
  bool first_ = true;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  f << j.dump(2) << '\n';
  f.close();
  if (!f) throw IoError("write failed: " + path.string());
}

const char* closure_name(ClosureKind k) {
  switch (k) {
    case ClosureKind::HyQMOM: return "hyqmom";
    case ClosureKind::QMOM: return "qmom";
    case ClosureKind::Gamma: return "gamma";
  }
  return "?";
}

struct SolverArgs {
  std::size_t n = 2;
  std::size_t cells = 4000;
  double cfl = 0.5;
  double t_end = 0.1;
  std::string closure = "hyqmom";
  double gamma = 0.0;
  std::vector<double> domain{-0.5, 0.5};
  bool local_speeds = false;
  std::size_t progress = 500;
  std::string out = ".";

  SolverConfig config() const {
    SolverConfig c;
    c.n = n;
    c.cells = cells;
    c.cfl = cfl;
    c.t_end = t_end;
    c.closure = closure == "qmom" ? ClosureKind::QMOM : closure == "gamma" ? ClosureKind::Gamma : ClosureKind::HyQMOM;
    c.gamma = gamma;
    c.x_min = domain[0];
    c.x_max = domain[1];
    c.local_speeds = local_speeds;
    return c;
  }
};

void add_solver_options(CLI::App* cmd, SolverArgs& a) {
  cmd->add_option("--cells", a.cells, "Number of cells")->capture_default_str();
  cmd->add_option("--cfl", a.cfl, "CFL number in (0, 1]")->capture_default_str();
  cmd->add_option("--t-end", a.t_end, "Final time")->capture_default_str();
  cmd->add_option("--closure", a.closure, "Closure family")
      ->check(CLI::IsMember({"hyqmom", "qmom", "gamma"}))
      ->capture_default_str();
  cmd->add_option("--gamma", a.gamma, "Parameter of the gamma family (n = 2)")->capture_default_str();
  cmd->add_option("--domain", a.domain, "x_min x_max")->expected(2)->delimiter(',')->capture_default_str();
  cmd->add_flag("--local-speeds", a.local_speeds, "HLL speeds from neighbouring cells");
  cmd->add_option("--progress", a.progress, "Report every this many steps on stderr, 0 for never")
      ->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
}

Manifest solver_manifest(const SolverConfig& c) {
  return {{"n", std::to_string(c.n)},
          {"closure", closure_name(c.closure)},
          {"gamma", format_double(c.gamma)},
          {"cells", std::to_string(c.cells)},
          {"domain", format_double(c.x_min) + "," + format_double(c.x_max)},
          {"cfl", format_double(c.cfl)},
          {"t_end", format_double(c.t_end)},
          {"boundary", "zero-gradient"},
          {"speeds", c.local_speeds ? "local" : "global"},
          {"initial", "mean " + format_double(c.initial.mean_left) + " | " + format_double(c.initial.mean_right) +
                          ", density " + format_double(c.initial.density) + ", variance " +
                          format_double(c.initial.variance)}};
}

json config_json(const SolverConfig& c) {
  return {{"n", c.n},         {"closure", closure_name(c.closure)}, {"gamma", c.gamma},
          {"cells", c.cells}, {"x_min", c.x_min},                   {"x_max", c.x_max},
          {"cfl", c.cfl},     {"t_end", c.t_end},                   {"local_speeds", c.local_speeds}};
}

StepObserver progress_observer(std::ostream& err, std::size_t every, std::size_t n) {
  if (every == 0) return {};
  return [&err, every, n](const StepStats& s, const SolverGrid&) {
    if (s.step % every == 0)
      err << "n=" << n << " step " << s.step << " t=" << s.time
          << " max|lambda|=" << std::max(std::abs(s.lambda_min), std::abs(s.lambda_max)) << '\n';
  };
}

double max_abs_lambda(const RunResult& r) { return std::max(std::abs(r.lambda_min), std::abs(r.lambda_max)); }

json run_json(const RunResult& r, const SolverConfig& c) {
  json j;
  j["steps"] = r.steps;
  j["time"] = r.grid.time;
  j["wall_seconds"] = r.wall_seconds;
  j["max_abs_lambda"] = max_abs_lambda(r);
  j["lambda_min"] = r.lambda_min;
  j["lambda_max"] = r.lambda_max;
  j["error_norms"] = error_norms(r.grid, c.initial);
  j["max_mass_drift"] = r.max_mass_drift;
  j["max_momentum_drift"] = r.max_momentum_drift;
  j["max_antisymmetry"] = r.max_antisymmetry;
  j["max_cfl_number"] = r.max_cfl_number;
  j["min_relative_pivot"] = r.min_relative_pivot;
  j["boundary_change"] = r.boundary_change;
  j["hyperbolicity_postulated"] = c.closure == ClosureKind::HyQMOM && c.n > kProvenHyperbolicOrder;
  if (r.realizability_loss) {
    const auto& e = *r.realizability_loss;
    j["realizability_loss"] = {{"step", e.step}, {"cell", e.cell}, {"time", e.time}, {"moments", e.moments},
                               {"hankel", e.hankel}};
  } else {
    j["realizability_loss"] = nullptr;
  }
  return j;
}

/// Standardized tail S_3..S_N, empty when the state has no spread.
std::vector<double> standardized_tail(const MomentVector& m) {
  try {
    const StandardizedState s = raw_to_standardized(m);
    if (s.degenerate_variance) return {};
    return s.s;
  } catch (const Error&) {
    return {};
  }
}

int cmd_simulate(const SolverArgs& a, bool diagnostic, std::ostream& out, std::ostream& err) {
  SolverConfig c = a.config();
  c.diagnostic = diagnostic;
  c.validate();
  const fs::path dir = prepare_dir(a.out);
  const RunResult r = run(c, progress_observer(err, a.progress, c.n));

  const std::size_t dim = r.grid.dim;
  const std::string stem = "simulate_n" + std::to_string(c.n);
  std::vector<std::string> names{"x"};
  for (std::size_t k = 0; k < dim; ++k) names.push_back("M" + std::to_string(k));
  for (std::size_t k = 3; k < dim; ++k) names.push_back("S" + std::to_string(k));
  for (std::size_t k = 0; k < dim; ++k) names.push_back("exact_M" + std::to_string(k));
  for (std::size_t k = 3; k < dim; ++k) names.push_back("exact_S" + std::to_string(k));
  names.push_back("lambda_min");
  names.push_back("lambda_max");

  Manifest manifest = solver_manifest(c);
  manifest.emplace_back("time", format_double(r.grid.time));
  CsvWriter csv(dir / (stem + ".csv"), "simulate", manifest,
                "x cell center; M* cell averages; S* standardized moments (blank without spread); exact_* "
                "analytical solution at x; lambda_min, lambda_max extreme characteristic speeds of the cell");
  csv.header(names);
  CellCloser closer(c);
  for (std::size_t i = 0; i < r.grid.cells(); ++i) {
    const double x = r.grid.center(i);
    const MomentVector m = r.grid.moments(i);
    const MomentVector e = exact_moments(c.initial, r.grid.time, x, dim - 1);
    csv.cell(x);
    for (std::size_t k = 0; k < dim; ++k) csv.cell(m[k]);
    const auto s = standardized_tail(m);
    for (std::size_t k = 3; k < dim; ++k) s.empty() ? csv.blank() : csv.cell(s[k - 3]);
    for (std::size_t k = 0; k < dim; ++k) csv.cell(e[k]);
    const auto se = standardized_tail(e);
    for (std::size_t k = 3; k < dim; ++k) se.empty() ? csv.blank() : csv.cell(se[k - 3]);
    try {
      const CellClosure cc = closer.close(m.values());
      csv.cell(cc.lambda_min).cell(cc.lambda_max);
    } catch (const Error&) {
      csv.blank().blank();
    }
    csv.end_row();
  }
  csv.close();

  json j;
  j["command"] = "simulate";
  j["version"] = HYQMOM_VERSION;
  j["config"] = config_json(c);
  j.update(run_json(r, c));
  j["csv"] = stem + ".csv";
  write_json(dir / (stem + ".json"), j);

  if (r.realizability_loss) {
    err << "realizability lost in cell " << r.realizability_loss->cell << " at t = " << r.realizability_loss->time
        << '\n';
    return kRealizabilityLoss;
  }
  out << "n=" << c.n << " steps=" << r.steps << " max|lambda|=" << format_double(max_abs_lambda(r))
      << " wall=" << r.wall_seconds << "s -> " << (dir / (stem + ".csv")).string() << '\n';
  return kOk;
}

int cmd_convergence(const SolverArgs& a, const std::vector<std::size_t>& n_list, std::ostream& out,
                    std::ostream& err) {
  if (n_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty --n-list");
  std::vector<SolverConfig> configs;
  for (std::size_t n : n_list) {
    SolverArgs b = a;
    b.n = n;
    configs.push_back(b.config());
    configs.back().validate();
  }
  const fs::path dir = prepare_dir(a.out);

  std::vector<std::vector<double>> errors;
  json runs = json::array();
  std::size_t width = 0;
  for (const SolverConfig& c : configs) {
    const RunResult r = run(c, progress_observer(err, a.progress, c.n));
    errors.push_back(error_norms(r.grid, c.initial));
    width = std::max(width, errors.back().size());
    json j{{"n", c.n}};
    j.update(run_json(r, c));
    runs.push_back(std::move(j));
    out << "n=" << c.n << " steps=" << r.steps << " max|lambda|=" << format_double(max_abs_lambda(r))
        << " wall=" << r.wall_seconds << "s\n";
  }

  Manifest manifest = solver_manifest(configs.front());
  manifest.erase(manifest.begin());
  std::vector<double> ns(n_list.begin(), n_list.end());
  manifest.insert(manifest.begin(), {"n_list", join(ns)});
  CsvWriter csv(dir / "convergence.csv", "convergence", manifest,
                "n closure order; err_Mk = ||M_k - M_k,exact||_2 / ||M_k,exact||_2 over cell centers at t_end "
                "(blank where the run has no M_k)");
  std::vector<std::string> names{"n"};
  for (std::size_t k = 0; k < width; ++k) names.push_back("err_M" + std::to_string(k));
  csv.header(names);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    csv.cell(static_cast<double>(configs[i].n));
    for (std::size_t k = 0; k < width; ++k) k < errors[i].size() ? csv.cell(errors[i][k]) : csv.blank();
    csv.end_row();
  }
  csv.close();
  write_json(dir / "convergence.json", json{{"command", "convergence"}, {"version", HYQMOM_VERSION}, {"runs", runs}});
  return kOk;
}

int cmd_roots(const std::vector<double>& s_fixed, double h_min, double h_max, std::size_t samples,
              const std::string& out_dir, std::ostream& out) {
  const auto rows = sweep_roots(s_fixed, h_min, h_max, samples);
  const std::size_t n = (s_fixed.size() + 3) / 2;
  const fs::path dir = prepare_dir(out_dir);
  const std::string file = "roots_n" + std::to_string(n) + ".csv";
  CsvWriter csv(dir / file, "roots",
                {{"n", std::to_string(n)},
                 {"fixed S_3..S_" + std::to_string(2 * n - 1), join(s_fixed)},
                 {"h_range", format_double(h_min) + "," + format_double(h_max)},
                 {"samples", std::to_string(samples)}},
                "H_2n Hankel determinant of the standardized moments; S_2n the moment it implies; q* roots of Q_n; "
                "r* roots of R_n+1; all ascending, in standardized velocity");
  std::vector<std::string> names{"H" + std::to_string(2 * n), "S" + std::to_string(2 * n)};
  for (std::size_t k = 1; k <= n; ++k) names.push_back("q" + std::to_string(k));
  for (std::size_t k = 1; k <= n + 1; ++k) names.push_back("r" + std::to_string(k));
  csv.header(names);
  for (const RootsRow& row : rows) {
    csv.cell(row.h).cell(row.s_2n);
    for (double q : row.q) csv.cell(q);
    for (double r : row.r) csv.cell(r);
    csv.end_row();
  }
  csv.close();
  out << rows.size() << " samples -> " << (dir / file).string() << '\n';
  return kOk;
}

int cmd_reference(double t, std::size_t k_max, std::size_t points, const std::vector<double>& domain,
                  const std::string& out_dir, std::ostream& out) {
  const RiemannSetup setup;
  if (points < 1) throw Error(ErrorCode::InvalidArgument, "need at least one point");
  if (!(domain[1] > domain[0])) throw Error(ErrorCode::InvalidArgument, "domain must satisfy x_min < x_max");
  exact_moments(setup, t, 0.0, k_max);  // argument checks before touching the file system
  const fs::path dir = prepare_dir(out_dir);
  CsvWriter csv(dir / "reference.csv", "reference",
                {{"t", format_double(t)},
                 {"k_max", std::to_string(k_max)},
                 {"points", std::to_string(points)},
                 {"domain", format_double(domain[0]) + "," + format_double(domain[1])},
                 {"initial", "mean 1 | -1, density 1, variance 1/3"}},
                "x cell center of `points` equal cells; M* exact moments of the free-transport Riemann problem");
  std::vector<std::string> names{"x"};
  for (std::size_t k = 0; k <= k_max; ++k) names.push_back("M" + std::to_string(k));
  csv.header(names);
  const double dx = (domain[1] - domain[0]) / static_cast<double>(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = domain[0] + (static_cast<double>(i) + 0.5) * dx;
    const MomentVector m = exact_moments(setup, t, x, k_max);
    csv.cell(x);
    for (std::size_t k = 0; k <= k_max; ++k) csv.cell(m[k]);
    csv.end_row();
  }
  csv.close();
  out << points << " points -> " << (dir / "reference.csv").string() << '\n';
  return kOk;
}

int cmd_verify(std::uint64_t seed, std::size_t samples, std::size_t n_max, const std::string& out_dir,
               std::ostream& out) {
  const auto suites = run_verify(seed, samples, n_max);
  bool ok = true;
  json list = json::array();
  for (const SuiteResult& s : suites) {
    ok = ok && s.pass;
    out << (s.pass ? "PASS " : "FAIL ") << s.name << ": " << s.cases << " cases, worst " << format_double(s.worst)
        << ", tolerance " << format_double(s.tolerance) << '\n';
    list.push_back({{"suite", s.name}, {"cases", s.cases}, {"worst", s.worst}, {"tolerance", s.tolerance},
                    {"pass", s.pass}});
  }
  if (!out_dir.empty())
    write_json(prepare_dir(out_dir) / "verify.json", json{{"command", "verify"}, {"version", HYQMOM_VERSION},
                                                          {"seed", seed}, {"samples", samples}, {"n_max", n_max},
                                                          {"suites", list}});
  return ok ? kOk : kFailure;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::RealizabilityLoss: return kRealizabilityLoss;
    case ErrorCode::Unrealizable:
    case ErrorCode::NotStrictlyRealizable:
    case ErrorCode::NonPositiveDensity:
    case ErrorCode::BoundaryBreakdown:
    case ErrorCode::NegativeOffdiagonal:
    case ErrorCode::InvalidCoefficients: return kUnrealizable;
    default: return kFailure;
  }
}

/// Moments of a mixture of one to four normals, with the absolute scale
/// sum_i w_i E(|mu_i| + sigma_i |Z|)^k used to judge round-off.
struct MixtureSample {
  std::vector<double> m;
  std::vector<double> scale;
};

MixtureSample random_mixture(std::mt19937_64& rng, std::size_t order) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> mean(-1.5, 1.5), var(0.05, 1.0), weight(0.1, 1.0);
  std::vector<double> abs_z(order + 1);
  for (std::size_t j = 0; j <= order; ++j)
    abs_z[j] = std::pow(2.0, j / 2.0) * std::tgamma((j + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  MixtureSample s{std::vector<double>(order + 1, 0.0), std::vector<double>(order + 1, 0.0)};
  const int c = count(rng);
  for (int i = 0; i < c; ++i) {
    const double w = weight(rng), mu = mean(rng), v = var(rng), sd = std::sqrt(v);
    const MomentVector g = maxwellian_moments(w, mu, v, order);
    for (std::size_t k = 0; k <= order; ++k) {
      s.m[k] += g[k];
      double e = 0.0, binom = 1.0;
      for (std::size_t j = 0; j <= k; ++j) {
        e += binom * std::pow(std::abs(mu), static_cast<double>(k - j)) * std::pow(sd, static_cast<double>(j)) *
             abs_z[j];
        binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
      s.scale[k] += w * e;
    }
  }
  return s;
}

}  // namespace

std::vector<RootsRow> sweep_roots(const std::vector<double>& s_fixed, double h_min, double h_max,
                                  std::size_t samples) {
  if (s_fixed.empty() || s_fixed.size() % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "need S_3..S_{2n-1}: an odd number of fixed moments");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  if (!(h_max >= h_min)) throw Error(ErrorCode::InvalidArgument, "h_max must not be below h_min");
  const std::size_t n = (s_fixed.size() + 3) / 2;

  StandardizedState st;
  st.order = 2 * n;
  st.s = s_fixed;
  st.s.push_back(0.0);
  const double h0 = hankel_determinants(st).back();
  st.s.back() = 1.0;
  const double slope = hankel_determinants(st).back() - h0;  // H_2n is affine in S_2n
  if (!(slope > 0.0))
    throw Error(ErrorCode::NotStrictlyRealizable, "fixed moments S_3..S_{2n-1} are not strictly realizable");

  ClosureOptions opts;
  opts.allow_boundary_fallback = false;
  std::vector<RootsRow> rows;
  for (std::size_t i = 0; i < samples; ++i) {
    const double h = samples == 1 ? h_min
                                  : h_min + (h_max - h_min) * static_cast<double>(i) / static_cast<double>(samples - 1);
    st.s.back() = (h - h0) / slope;
    const ClosureResult r = hyqmom_close(st, opts);
    rows.push_back({h, st.s.back(), r.eigenvalues_q, r.eigenvalues_r});
  }
  return rows;
}

std::vector<SuiteResult> run_verify(std::uint64_t seed, std::size_t samples, std::size_t n_max) {
  if (n_max < 1 || n_max > 20) throw Error(ErrorCode::InvalidArgument, "n_max must lie in 1..20");
  std::mt19937_64 rng(seed);
  auto pick_n = [&](std::size_t hi) { return std::uniform_int_distribution<std::size_t>(1, hi)(rng); };

  SuiteResult trip{"round-trip", 0, 0.0, 1e-10};
  auto round_trip = [&](std::size_t n) {
    const MixtureSample s = random_mixture(rng, 2 * n);
    const MomentVector back = reverse_chebyshev(chebyshev(MomentVector(s.m)), 2 * n);
    for (std::size_t k = 0; k <= 2 * n; ++k) trip.worst = std::max(trip.worst, std::abs(back[k] - s.m[k]) / s.scale[k]);
    ++trip.cases;
  };
  for (std::size_t i = 0; i < samples; ++i) round_trip(pick_n(n_max));
  if (n_max >= 20)
    for (int i = 0; i < 5; ++i) round_trip(20);

  SuiteResult inter{"interlacing", 0, 0.0, 0.0};
  SuiteResult cons{"constraints", 0, 0.0, 1e-9};
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t n = pick_n(std::min<std::size_t>(n_max, 10));
    const StandardizedState st = raw_to_standardized(MomentVector(random_mixture(rng, 2 * n).m));
    const ClosureResult r = hyqmom_close(st);
    if (interlacing_check(r) != Interlacing::Strict) inter.worst += 1.0;
    ++inter.cases;

    StandardizedState ext = st;
    ext.s.push_back(r.m_next);
    ext.order += 1;
    double qnorm = 1.0;  // <Q_n^2> in standardized scale
    for (std::size_t k = 1; k <= n; ++k) qnorm *= r.rc.b[k];
    const auto [p0, p1, p2] = check_constraints(ext, r);
    cons.worst = std::max({cons.worst, std::abs(p0) / qnorm, std::abs(p1) / qnorm, std::abs(p2) / qnorm});
    ++cons.cases;
  }

  SuiteResult fd{"fd-factorization", 0, 0.0, 1e-5};
  for (std::size_t i = 0; i < std::max<std::size_t>(1, samples / 10); ++i) {
    const std::size_t n = pick_n(std::min<std::size_t>(n_max, 5));
    fd.worst = std::max(fd.worst, verify_factorization_fd(MomentVector(random_mixture(rng, 2 * n).m)));
    ++fd.cases;
  }

  std::vector<SuiteResult> out{trip, inter, cons, fd};
  for (SuiteResult& s : out) s.pass = s.tolerance == 0.0 ? s.worst == 0.0 : s.worst < s.tolerance;
  return out;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HyQMOM moment closure: free-transport simulations, closure roots and reference solutions"};
  app.name("hyqmom");
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags; flags win");
  app.require_subcommand(1);

  SolverArgs sim_args;
  bool diagnostic = false;
  auto* sim = app.add_subcommand("simulate", "Run the Riemann problem and write per-cell CSV plus a JSON summary");
  sim->add_option("--n", sim_args.n, "Closure order")->capture_default_str();
  add_solver_options(sim, sim_args);
  sim->add_flag("--diagnostic", diagnostic, "On realizability loss write the state reached and exit 3");

  SolverArgs conv_args;
  std::vector<std::size_t> n_list{2, 3, 4, 10};
  auto* conv = app.add_subcommand("convergence", "Error norms at t_end for several closure orders");
  conv->add_option("--n-list", n_list, "Closure orders")->delimiter(',')->capture_default_str();
  add_solver_options(conv, conv_args);

  std::vector<double> s_fixed{-1.0};
  double h_min = 0.04, h_max = 4.0;
  std::size_t roots_samples = 100;
  std::string roots_out = ".";
  auto* roots = app.add_subcommand("roots", "Roots of Q_n and R_n+1 while H_2n sweeps with S_3..S_2n-1 fixed");
  roots->add_option("--s", s_fixed, "Fixed S_3..S_2n-1 (sets n)")->delimiter(',')->capture_default_str();
  roots->add_option("--h-min", h_min, "Smallest H_2n")->capture_default_str();
  roots->add_option("--h-max", h_max, "Largest H_2n")->capture_default_str();
  roots->add_option("--samples", roots_samples, "Equally spaced H_2n values")->capture_default_str();
  roots->add_option("--out", roots_out, "Output directory")->capture_default_str();

  double ref_t = 0.1;
  std::size_t ref_k = 8, ref_points = 4000;
  std::vector<double> ref_domain{-0.5, 0.5};
  std::string ref_out = ".";
  auto* ref = app.add_subcommand("reference", "Exact moments of the Riemann problem on a grid");
  ref->add_option("--t", ref_t, "Time")->capture_default_str();
  ref->add_option("--k-max", ref_k, "Highest moment order (at most 41)")->capture_default_str();
  ref->add_option("--points", ref_points, "Number of equal cells; their centers are sampled")->capture_default_str();
  ref->add_option("--domain", ref_domain, "x_min x_max")->expected(2)->delimiter(',')->capture_default_str();
  ref->add_option("--out", ref_out, "Output directory")->capture_default_str();

  std::uint64_t seed = 20240101;
  std::size_t samples = 1000, n_max = 10;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "Randomized property suites of the closure");
  ver->add_option("--seed", seed, "Seed of the mt19937_64 stream")->capture_default_str();
  ver->add_option("--samples", samples, "Random states per suite")->capture_default_str();
  ver->add_option("--n-max", n_max, "Largest order in the round-trip suite (others stop at 10 and 5)")
      ->capture_default_str();
  ver->add_option("--out", verify_out, "Directory for verify.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (*sim) return cmd_simulate(sim_args, diagnostic, out, err);
    if (*conv) return cmd_convergence(conv_args, n_list, out, err);
    if (*roots) return cmd_roots(s_fixed, h_min, h_max, roots_samples, roots_out, out);
    if (*ref) return cmd_reference(ref_t, ref_k, ref_points, ref_domain, ref_out, out);
    if (*ver) return cmd_verify(seed, samples, n_max, verify_out, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << to_string(e.code()) << "]\n";
    return exit_code(e);
  }
  return kFailure;
}

}  // namespace hyqmom::app
