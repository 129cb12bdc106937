// dg: command-line driver for the Doebner-Goldin equation toolkit.
//
// Subcommands: invariants, gauge {apply|find|fix}, solution, residual,
// gaussian {integrate|classify}, evolve, sweep. Every command echoes its
// fully resolved configuration before computing. Exit codes: 0 success,
// 2 validation error (bad arguments, bad regime, bad files), 3 numerical
// failure (divergence, collapse outside classify).
//
// Numbers in CSV files are written with 17 significant digits and no
// timestamps, so repeated runs are byte-identical.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dg/catalog.hpp"
#include "dg/catalog_numeric.hpp"
#include "dg/evolver.hpp"
#include "dg/fields.hpp"
#include "dg/gaussian.hpp"
#include "dg/io.hpp"
#include "dg/params.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int log_level() {
  const char* env = std::getenv("DG_LOG");
  if (!env) return 0;
  const std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[dg] " << msg << "\n";
}

struct Output {
  bool machine = false;
  json config;
  json result;

  void echo_config() const {
    if (!machine) std::cout << "config: " << config.dump() << "\n";
  }
  void finish() const {
    if (machine)
      std::cout << json{{"config", config}, {"result", result}}.dump() << "\n";
  }
};

std::vector<double> parse_list(const std::string& text, size_t expect) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.size() != expect)
    dg::fail(dg::ErrorKind::InvalidArgument,
             "expected " + std::to_string(expect) + " comma-separated values");
  return out;
}

dg::Grid1D parse_grid(const std::string& text, dg::Boundary boundary) {
  std::vector<std::string> parts = dg::split_csv_line(text);
  if (parts.size() == 1) {
    parts.clear();
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
  }
  if (parts.size() != 3)
    dg::fail(dg::ErrorKind::InvalidArgument, "grid must be min:max:n");
  dg::Grid1D g;
  g.x_min = std::stod(parts[0]);
  g.x_max = std::stod(parts[1]);
  g.n = std::stoi(parts[2]);
  g.boundary = boundary;
  g.validate();
  return g;
}

struct TimeRange {
  double t0 = 0.0, t1 = 0.0, dt = 0.0;
  std::vector<double> samples() const {
    std::vector<double> out;
    if (dt <= 0.0) {
      out.push_back(t0);
      return out;
    }
    for (double t = t0; t <= t1 + 1e-12 * std::max(1.0, std::abs(t1)); t += dt)
      out.push_back(t);
    return out;
  }
};

TimeRange parse_time(const std::string& text) {
  std::stringstream ss(text);
  std::string tok;
  std::vector<double> parts;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
  if (parts.size() == 1) return {parts[0], parts[0], 0.0};
  if (parts.size() != 3)
    dg::fail(dg::ErrorKind::InvalidArgument, "time range must be t0:t1:dt");
  return {parts[0], parts[1], parts[2]};
}

dg::ParameterDocument load_params_arg(const std::string& params_file,
                                      const std::string& inv_list) {
  if (!params_file.empty()) return dg::load_parameter_document(params_file);
  if (!inv_list.empty()) {
    const auto v = parse_list(inv_list, 6);
    dg::ParameterDocument doc;
    doc.params = dg::reconstruct(
        dg::Invariants{v[0], v[1], v[2], v[3], v[4], v[5]});
    return doc;
  }
  dg::fail(dg::ErrorKind::InvalidArgument, "need --params FILE or --inv LIST");
}

json residual_json(const dg::ResidualReport& ap, const dg::ResidualReport& nse) {
  return {{"ap", ap.to_json()}, {"nse", nse.to_json()}};
}

// --- subcommand implementations -------------------------------------------------

int cmd_invariants(const std::string& params_file, Output& out) {
  const auto doc = dg::load_parameter_document(params_file);
  out.config = {{"command", "invariants"}, {"params", dg::to_json(doc.params)}};
  out.echo_config();
  const dg::Invariants v = dg::invariants_of(doc.params);
  out.result = {{"invariants", dg::to_json(v)},
                {"linearizable", dg::is_linearizable(v)}};
  if (!out.machine) {
    std::cout << "invariants: (" << dg::format_g17(v.i0) << ", " << dg::format_g17(v.i1)
              << ", " << dg::format_g17(v.i2) << ", " << dg::format_g17(v.i3) << ", "
              << dg::format_g17(v.i4) << ", " << dg::format_g17(v.i5) << ")\n"
              << "linearizable: " << (dg::is_linearizable(v) ? "yes" : "no") << "\n";
  }
  return 0;
}

int cmd_gauge(const std::string& mode, const std::string& params_file,
              const std::string& target_file, double Lambda, double gamma, Output& out) {
  const auto doc = dg::load_parameter_document(params_file);
  out.config = {{"command", "gauge " + mode}, {"params", dg::to_json(doc.params)}};
  if (mode == "apply") {
    out.config["element"] = {{"Lambda", Lambda}, {"gamma", gamma}};
    out.echo_config();
    const dg::NuMuParams q = dg::apply_gauge({Lambda, gamma}, doc.params);
    out.result = {{"params", dg::to_json(q)},
                  {"invariants", dg::to_json(dg::invariants_of(q))}};
    if (!out.machine) std::cout << "params: " << dg::to_json(q).dump() << "\n";
    return 0;
  }
  if (mode == "find") {
    const auto target = dg::load_parameter_document(target_file);
    out.config["target"] = dg::to_json(target.params);
    out.echo_config();
    const auto a = dg::find_gauge(doc.params, target.params);
    if (!a) {
      out.result = {{"equivalent", false}};
      if (!out.machine) std::cout << "not equivalent (invariants differ)\n";
      out.finish();
      return 2;
    }
    out.result = {{"equivalent", true}, {"element", dg::to_json(*a)}};
    if (!out.machine) std::cout << "element: " << dg::to_json(*a).dump() << "\n";
    return 0;
  }
  if (mode == "fix") {
    out.echo_config();
    const dg::Invariants v = dg::invariants_of(doc.params);
    const dg::NuMuParams q = dg::reconstruct(v);
    const auto a = dg::find_gauge(doc.params, q);
    out.result = {{"params", dg::to_json(q)},
                  {"invariants", dg::to_json(v)},
                  {"element", a ? dg::to_json(*a) : json()}};
    if (!out.machine) std::cout << "gauge-fixed params: " << dg::to_json(q).dump() << "\n";
    return 0;
  }
  dg::fail(dg::ErrorKind::InvalidArgument, "gauge mode must be apply, find, or fix");
}

int cmd_solution(const std::string& spec_file, const std::string& grid_arg,
                 const std::string& time_arg, const std::string& out_dir, Output& out) {
  const json spec = json::parse(dg::read_text_file(spec_file));
  const dg::AnalyticSolution sol = dg::make_solution(spec);
  const dg::Grid1D grid = parse_grid(grid_arg, dg::Boundary::Periodic);
  const TimeRange times = parse_time(time_arg);
  out.config = {{"command", "solution"}, {"spec", spec},
                {"grid", {{"min", grid.x_min}, {"max", grid.x_max}, {"n", grid.n}}},
                {"t", {{"t0", times.t0}, {"t1", times.t1}, {"dt", times.dt}}},
                {"out", out_dir}};
  out.echo_config();
  fs::create_directories(out_dir);
  const std::vector<double> V = sol.kappa > 0.0
                                    ? dg::harmonic_potential(grid, sol.kappa)
                                    : dg::zero_potential(grid);
  const dg::NuMuParams fixed = dg::reconstruct(sol.inv);
  json reports = json::array();
  double worst_ap = 0.0, worst_nse = 0.0;
  const auto ts = times.samples();
  for (size_t k = 0; k < ts.size(); ++k) {
    const dg::ThetaField f = dg::sample(sol, grid, ts[k]);
    // field CSV with the sample time prepended to every row
    std::string csv = dg::field_to_csv(f);
    std::string with_t = "t," + csv.substr(0, csv.find('\n') + 1);
    size_t pos = csv.find('\n') + 1;
    const std::string t_str = dg::format_g17(ts[k]) + ",";
    while (pos < csv.size()) {
      const size_t next = csv.find('\n', pos) + 1;
      with_t += t_str + csv.substr(pos, next - pos);
      pos = next;
    }
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%03zu.csv", k);
    dg::write_text_file((fs::path(out_dir) / name).string(), with_t);
    const auto ap = dg::ap_residual(f, sol.inv, V);
    const auto nse = dg::nse_residual(f, fixed, V);
    worst_ap = std::max(worst_ap, ap.linf);
    worst_nse = std::max(worst_nse, nse.linf);
    reports.push_back({{"t", ts[k]}, {"file", name}, {"residuals", residual_json(ap, nse)}});
  }
  const json residuals{{"snapshots", reports},
                       {"max_ap_linf", worst_ap},
                       {"max_nse_linf", worst_nse}};
  dg::write_text_file((fs::path(out_dir) / "residuals.json").string(),
                      residuals.dump(2) + "\n");
  dg::write_text_file((fs::path(out_dir) / "run.json").string(),
                      out.config.dump(2) + "\n");
  out.result = {{"snapshots", ts.size()},
                {"max_ap_linf", worst_ap},
                {"max_nse_linf", worst_nse},
                {"square_integrable", sol.square_integrable}};
  if (!out.machine)
    std::cout << ts.size() << " snapshots written to " << out_dir
              << "; max ap linf = " << dg::format_g17(worst_ap)
              << ", max nse linf = " << dg::format_g17(worst_nse) << "\n";
  return 0;
}

int cmd_residual(const std::string& spec_file, const std::string& field_file,
                 const std::string& params_file, const std::string& inv_list,
                 const std::string& grid_arg, const std::string& time_arg,
                 const std::string& boundary, bool stationary, double kappa,
                 Output& out) {
  dg::ThetaField field{{}, {}, {}, {}, {}, {}, {}};
  dg::Invariants inv;
  double kap = kappa;
  if (!spec_file.empty()) {
    const json spec = json::parse(dg::read_text_file(spec_file));
    const dg::AnalyticSolution sol = dg::make_solution(spec);
    const dg::Grid1D grid = parse_grid(grid_arg, dg::Boundary::Periodic);
    const TimeRange t = parse_time(time_arg);
    field = dg::sample(sol, grid, t.t0);
    inv = sol.inv;
    if (kap == 0.0) kap = sol.kappa;
    out.config = {{"command", "residual"}, {"spec", spec}, {"t", t.t0}};
  } else {
    const auto doc = load_params_arg(params_file, inv_list);
    inv = dg::invariants_of(doc.params);
    if (kap == 0.0) kap = doc.kappa;
    const dg::Boundary b =
        boundary == "dirichlet" ? dg::Boundary::Dirichlet : dg::Boundary::Periodic;
    field = dg::field_from_csv(dg::read_text_file(field_file), b);
    if (stationary && !field.dt_theta1) {
      field.dt_theta1 = std::vector<double>(field.grid.n, 0.0);
      field.dt_theta2 = std::vector<double>(field.grid.n, 0.0);
    }
    out.config = {{"command", "residual"},
                  {"field", field_file},
                  {"invariants", dg::to_json(inv)},
                  {"stationary", stationary}};
  }
  out.config["kappa"] = kap;
  out.echo_config();
  const std::vector<double> V = kap > 0.0 ? dg::harmonic_potential(field.grid, kap)
                                          : dg::zero_potential(field.grid);
  const auto ap = dg::ap_residual(field, inv, V);
  const auto nse = dg::nse_residual(field, dg::reconstruct(inv), V);
  out.result = residual_json(ap, nse);
  if (!out.machine)
    std::cout << "ap linf = " << dg::format_g17(ap.linf)
              << ", l2 = " << dg::format_g17(ap.l2)
              << "; nse linf = " << dg::format_g17(nse.linf) << "\n";
  return 0;
}

int cmd_gaussian(const std::string& mode, const std::string& initial_arg,
                 const std::string& params_file, const std::string& inv_list,
                 double kappa, double horizon, double t_end, double dt, int record_every,
                 const std::string& out_file, Output& out) {
  const auto doc = load_params_arg(params_file, inv_list);
  const dg::Invariants inv = dg::invariants_of(doc.params);
  const double kap = kappa >= 0.0 ? kappa : doc.kappa;
  const auto init = parse_list(initial_arg, 4);
  const dg::GaussianState y0{0.0, init[0], init[1], init[2], init[3]};
  out.config = {{"command", "gaussian " + mode},
                {"invariants", dg::to_json(inv)},
                {"kappa", kap},
                {"initial", {{"sigma", y0.sigma}, {"dsigma", y0.dsigma},
                             {"s", y0.s}, {"ds", y0.ds}}},
                {"dt", dt}};
  if (mode == "integrate") {
    out.config["t_end"] = t_end;
    out.config["record_every"] = record_every;
    out.echo_config();
    const dg::Trajectory traj = dg::integrate(y0, inv, kap, t_end, dt, record_every);
    const auto rows = dg::with_phase(traj, inv, kap);
    const std::string csv = dg::trajectory_to_csv(rows);
    if (!out_file.empty()) dg::write_text_file(out_file, csv);
    else if (!out.machine) std::cout << csv;
    const dg::GaussianState last = traj.states.back();
    out.result = {{"stopped", traj.reason == dg::StopReason::Completed
                                  ? "completed"
                                  : traj.reason == dg::StopReason::Collapse ? "collapse"
                                                                            : "spread"},
                  {"t", last.t},
                  {"sigma", last.sigma},
                  {"s", last.s}};
    if (traj.reason != dg::StopReason::Completed) {
      if (!out.machine) std::cout << "terminated early: " << out.result["stopped"] << "\n";
      out.finish();
      return 3;
    }
    if (!out.machine && !out_file.empty())
      std::cout << "trajectory written to " << out_file << "\n";
    return 0;
  }
  if (mode == "classify") {
    out.config["horizon"] = horizon;
    out.echo_config();
    const dg::AsymptoticVerdict verdict =
        dg::classify_asymptotics(y0, inv, kap, horizon, dt);
    out.result = verdict.to_json();
    if (!out.machine) {
      std::cout << "verdict: " << dg::kind_name(verdict.kind);
      if (verdict.sigma_limit)
        std::cout << ", sigma_limit = " << dg::format_g17(*verdict.sigma_limit);
      std::cout << "\n";
    }
    return 0;
  }
  dg::fail(dg::ErrorKind::InvalidArgument, "gaussian mode must be integrate or classify");
}

int cmd_evolve(const std::string& spec_file, const std::string& field_file,
               const std::string& params_file, const std::string& inv_list,
               const std::string& grid_arg, double dt, double t_end, int record_every,
               double kappa, double safety, bool dealias, const std::string& out_dir,
               Output& out) {
  dg::EvolverConfig cfg;
  dg::ThetaField initial{{}, {}, {}, {}, {}, {}, {}};
  if (!spec_file.empty()) {
    const json spec = json::parse(dg::read_text_file(spec_file));
    const dg::AnalyticSolution sol = dg::make_solution(spec);
    cfg.grid = parse_grid(grid_arg, dg::Boundary::Periodic);
    initial = dg::sample(sol, cfg.grid, 0.0);
    cfg.inv = sol.inv;
    cfg.kappa = kappa >= 0.0 ? kappa : sol.kappa;
    out.config = {{"command", "evolve"}, {"spec", spec}};
  } else {
    initial = dg::field_from_csv(dg::read_text_file(field_file), dg::Boundary::Periodic);
    cfg.grid = initial.grid;
    const auto doc = load_params_arg(params_file, inv_list);
    cfg.inv = dg::invariants_of(doc.params);
    cfg.kappa = kappa >= 0.0 ? kappa : doc.kappa;
    out.config = {{"command", "evolve"}, {"field", field_file},
                  {"invariants", dg::to_json(cfg.inv)}};
  }
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.record_every = record_every;
  cfg.safety = safety;
  cfg.dealias = dealias;
  out.config["grid"] = {{"min", cfg.grid.x_min}, {"max", cfg.grid.x_max}, {"n", cfg.grid.n}};
  out.config["dt"] = dt;
  out.config["t_end"] = t_end;
  out.config["record_every"] = record_every;
  out.config["kappa"] = cfg.kappa;
  out.config["safety"] = safety;
  out.config["dealias"] = dealias;
  out.config["invariants"] = dg::to_json(cfg.inv);
  out.config["out"] = out_dir;
  out.echo_config();
  fs::create_directories(out_dir);
  const dg::EvolutionTrace trace = dg::evolve(initial, cfg);
  json snaps = json::array();
  for (size_t k = 0; k < trace.fields.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%04zu.csv", k);
    dg::write_text_file((fs::path(out_dir) / name).string(),
                        dg::field_to_csv(trace.fields[k]));
    snaps.push_back({{"t", trace.times[k]}, {"file", name}, {"mass", trace.mass[k]}});
  }
  const dg::Observables obs = dg::observables(trace);
  dg::write_text_file((fs::path(out_dir) / "observables.csv").string(),
                      dg::observables_to_csv(obs));
  json run = out.config;
  run["snapshots"] = snaps;
  run["diverged"] = trace.diverged;
  dg::write_text_file((fs::path(out_dir) / "run.json").string(), run.dump(2) + "\n");
  out.result = {{"snapshots", trace.fields.size()},
                {"diverged", trace.diverged},
                {"final_mass", trace.mass.back()},
                {"mass_drift",
                 std::abs(trace.mass.back() - trace.mass.front()) / trace.mass.front()}};
  if (trace.diverged) {
    if (!out.machine) std::cout << "run diverged; partial trace written\n";
    out.finish();
    return 3;
  }
  if (!out.machine)
    std::cout << trace.fields.size() << " snapshots written to " << out_dir << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& out_file, int jobs,
              Output& out) {
  const json cfg = json::parse(dg::read_text_file(config_file));
  std::array<double, 6> fixed{};
  const auto fx = cfg.at("fixed");
  if (fx.size() != 6) dg::fail(dg::ErrorKind::InvalidArgument, "fixed must have 6 entries");
  for (int i = 0; i < 6; ++i) fixed[i] = fx[i].get<double>();
  struct Axis {
    int index;
    double min, max;
    int count;
  };
  std::vector<Axis> axes;
  static const std::array<std::string, 6> names{"i0", "i1", "i2", "i3", "i4", "i5"};
  for (const auto& aj : cfg.at("axes")) {
    Axis ax;
    if (aj.contains("name")) {
      const std::string nm = aj.at("name").get<std::string>();
      ax.index = -1;
      for (int i = 0; i < 6; ++i)
        if (names[i] == nm) ax.index = i;
      if (ax.index < 0) dg::fail(dg::ErrorKind::InvalidArgument, "unknown axis " + nm);
    } else {
      ax.index = aj.at("index").get<int>();
    }
    ax.min = aj.at("min").get<double>();
    ax.max = aj.at("max").get<double>();
    ax.count = aj.at("count").get<int>();
    if (ax.count < 0) dg::fail(dg::ErrorKind::InvalidArgument, "axis count must be >= 0");
    axes.push_back(ax);
  }
  if (axes.empty() || axes.size() > 2)
    dg::fail(dg::ErrorKind::InvalidArgument, "sweep needs 1 or 2 axes");
  const double kappa = cfg.value("kappa", 0.0);
  const double horizon = cfg.value("horizon", 100.0);
  const double dt = cfg.value("dt", 1e-3);
  dg::GaussianState y0;
  if (cfg.contains("initial")) {
    const auto& in = cfg.at("initial");
    y0.sigma = in.value("sigma", 1.0);
    y0.dsigma = in.value("dsigma", 0.0);
    y0.s = in.value("s", 0.0);
    y0.ds = in.value("ds", 0.0);
  }
  out.config = {{"command", "sweep"}, {"config", cfg}, {"out", out_file}, {"jobs", jobs}};
  out.echo_config();

  const long n0 = axes[0].count;
  const long n1 = axes.size() == 2 ? axes[1].count : 1;
  const long total = n0 * n1;
  auto value_at = [](const Axis& ax, long i) {
    return ax.count == 1 ? ax.min
                         : ax.min + (ax.max - ax.min) * double(i) / double(ax.count - 1);
  };
  auto cell_invariants = [&](long cell) {
    std::array<double, 6> a = fixed;
    a[axes[0].index] = value_at(axes[0], cell / n1);
    if (axes.size() == 2) a[axes[1].index] = value_at(axes[1], cell % n1);
    return dg::Invariants::from_array(a);
  };

  const std::string header = "i0,i1,i2,i3,i4,i5,kind,sigma_limit,note\n";
  long done = 0;  // resume: count existing data rows and skip that many cells
  std::string existing;
  if (fs::exists(out_file)) {
    existing = dg::read_text_file(out_file);
    if (existing.rfind(header, 0) != 0) existing = header;
    for (size_t p = header.size(); p < existing.size(); ++done)
      p = existing.find('\n', p) + 1;
  } else {
    existing = header;
  }
  log_info("sweep: " + std::to_string(total) + " cells, resuming after " +
           std::to_string(done));

  std::vector<std::string> rows(total - done);
  std::atomic<long> next(done);
  auto worker = [&]() {
    for (;;) {
      const long cell = next.fetch_add(1);
      if (cell >= total) return;
      const dg::Invariants inv = cell_invariants(cell);
      const auto ia = inv.as_array();
      std::string row;
      for (double x : ia) row += dg::format_g17(x) + ",";
      try {
        const dg::AsymptoticVerdict v = dg::classify_asymptotics(y0, inv, kappa, horizon, dt);
        row += std::string(dg::kind_name(v.kind)) + ",";
        row += v.sigma_limit ? dg::format_g17(*v.sigma_limit) : "";
        row += ",";
      } catch (const dg::Error& e) {
        row += "Undetermined,,";
        row += e.what();
      }
      rows[cell - done] = row + "\n";
    }
  };
  const int nthreads = std::max(1, std::min<int>(jobs, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& row : rows) existing += row;
  dg::write_text_file(out_file, existing);
  out.result = {{"cells", total}, {"computed", total - done}};
  if (!out.machine)
    std::cout << "sweep complete: " << total << " cells in " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doebner-Goldin nonlinear Schroedinger equation toolkit"};
  app.require_subcommand(1);
  Output out;
  app.add_flag("--json", out.machine, "machine-readable JSON on stdout");

  std::string params_file, target_file, inv_list, spec_file, field_file, grid_arg,
      time_arg, out_path, initial_arg = "1,0,0,0", boundary = "periodic", gauge_mode,
      gaussian_mode;
  double Lambda = 1.0, gamma = 0.0, kappa = -1.0, horizon = 100.0, t_end = 1.0,
         dt = 1e-3, safety = 0.1;
  int record_every = 1, jobs = 1;
  bool stationary = false, dealias = false;

  auto* c_inv = app.add_subcommand("invariants", "gauge invariants of a parameter set");
  c_inv->add_option("--params", params_file, "parameter document")->required();

  auto* c_gauge = app.add_subcommand("gauge", "apply/find/fix gauge transformations");
  c_gauge->add_option("mode", gauge_mode, "apply|find|fix")->required();
  c_gauge->add_option("--params", params_file)->required();
  c_gauge->add_option("--target", target_file, "target parameters (find)");
  c_gauge->add_option("--Lambda", Lambda);
  c_gauge->add_option("--gamma", gamma);

  auto* c_sol = app.add_subcommand("solution", "sample a catalog solution");
  c_sol->add_option("--spec", spec_file)->required();
  c_sol->add_option("--grid", grid_arg)->required();
  c_sol->add_option("--t", time_arg)->required();
  c_sol->add_option("--out", out_path)->required();

  auto* c_res = app.add_subcommand("residual", "residuals of a field or solution spec");
  c_res->add_option("--spec", spec_file);
  c_res->add_option("--field", field_file);
  c_res->add_option("--params", params_file);
  c_res->add_option("--inv", inv_list);
  c_res->add_option("--grid", grid_arg);
  c_res->add_option("--t", time_arg, "sample time (spec input)");
  c_res->add_option("--boundary", boundary, "periodic|dirichlet (field input)");
  c_res->add_flag("--stationary", stationary, "treat the field as stationary");
  c_res->add_option("--kappa", kappa);

  auto* c_gauss = app.add_subcommand("gaussian", "moment-ODE integration/classification");
  c_gauss->add_option("mode", gaussian_mode, "integrate|classify")->required();
  c_gauss->add_option("--initial", initial_arg, "sigma,dsigma,s,ds");
  c_gauss->add_option("--params", params_file);
  c_gauss->add_option("--inv", inv_list);
  c_gauss->add_option("--kappa", kappa);
  c_gauss->add_option("--horizon", horizon);
  c_gauss->add_option("--t-end", t_end);
  c_gauss->add_option("--dt", dt);
  c_gauss->add_option("--record-every", record_every);
  c_gauss->add_option("--out", out_path);

  auto* c_evo = app.add_subcommand("evolve", "time-integrate the amplitude/phase system");
  c_evo->add_option("--spec", spec_file);
  c_evo->add_option("--field", field_file);
  c_evo->add_option("--params", params_file);
  c_evo->add_option("--inv", inv_list);
  c_evo->add_option("--grid", grid_arg);
  c_evo->add_option("--dt", dt)->required();
  c_evo->add_option("--t-end", t_end)->required();
  c_evo->add_option("--record-every", record_every);
  c_evo->add_option("--kappa", kappa);
  c_evo->add_option("--safety", safety);
  c_evo->add_flag("--dealias", dealias);
  c_evo->add_option("--out", out_path)->required();

  auto* c_sweep = app.add_subcommand("sweep", "phase-diagram sweep over invariants");
  c_sweep->add_option("--config", spec_file)->required();
  c_sweep->add_option("--out", out_path)->required();
  c_sweep->add_option("--jobs", jobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    int rc = 0;
    if (c_inv->parsed()) rc = cmd_invariants(params_file, out);
    else if (c_gauge->parsed())
      rc = cmd_gauge(gauge_mode, params_file, target_file, Lambda, gamma, out);
    else if (c_sol->parsed())
      rc = cmd_solution(spec_file, grid_arg, time_arg, out_path, out);
    else if (c_res->parsed())
      rc = cmd_residual(spec_file, field_file, params_file, inv_list, grid_arg, time_arg,
                        boundary, stationary, std::max(kappa, 0.0), out);
    else if (c_gauss->parsed())
      rc = cmd_gaussian(gaussian_mode, initial_arg, params_file, inv_list, kappa, horizon,
                        t_end, dt, record_every, out_path, out);
    else if (c_evo->parsed())
      rc = cmd_evolve(spec_file, field_file, params_file, inv_list, grid_arg, dt, t_end,
                      record_every, kappa, safety, dealias, out_path, out);
    else if (c_sweep->parsed())
      rc = cmd_sweep(spec_file, out_path, jobs, out);
    if (rc == 0) out.finish();
    return rc;
  } catch (const dg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_numerical() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
