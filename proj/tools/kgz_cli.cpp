// Command-line driver: soliton, evolve, spectrum, modulate, construct.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "kgz/config.hpp"
#include "kgz/construction.hpp"
#include "kgz/errors.hpp"
#include "kgz/evolution.hpp"
#include "kgz/io.hpp"
#include "kgz/linearized.hpp"
#include "kgz/modulation.hpp"
#include "kgz/observables.hpp"
#include "kgz/soliton.hpp"

namespace fs = std::filesystem;
using namespace kgz;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  if (cfg.out_dir.empty()) return "";
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

void require_solitons(const RunConfig& cfg, std::size_t at_least) {
  if (cfg.solitons.size() < at_least)
    throw ConfigError("solitons", at_least == 1 ? "at least one soliton is required"
                                                : "at least two solitons are required (c* undefined)");
}

FieldState initial_state(const RunConfig& cfg, const GridPtr& grid) {
  if (!cfg.initial.empty()) {
    FieldState s;
    try {
      s = snapshot_read(cfg.initial);
    } catch (const NumericalError& e) {
      throw ConfigError("time.initial", e.what());
    }
    if (!s.grid()->same_as(*grid)) throw ConfigError("time.initial", "snapshot grid differs from grid section");
    return s;
  }
  return multisoliton_state(cfg.solitons, cfg.system, grid, cfg.t0);
}

int cmd_soliton(const RunConfig& cfg, std::size_t index) {
  require_solitons(cfg, 1);
  if (index >= cfg.solitons.size()) throw ConfigError("--index", "no soliton with this index");
  const SolitonSpec& spec = cfg.solitons[index];
  GridPtr grid = make_grid(cfg.grid_n, cfg.grid_length);
  RealField phi = phi_profile(spec, cfg.system, grid);
  SecondaryProfiles sec = secondary_profiles(spec, cfg.system, grid);
  {
    CsvWriter csv(out_path(cfg, "soliton.csv"), {"x", "phi", "psi", "varphi", "re_rho", "im_rho"});
    for (std::size_t j = 0; j < grid->size(); ++j)
      csv.row({grid->x()[j], phi[j], sec.psi[j], sec.varphi[j], sec.rho_profile[j].real(),
               sec.rho_profile[j].imag()});
  }
  double res = stationary_residual(spec, cfg.system, grid);
  std::string line = "stationary_residual," + format_double(res);
  if (cfg.out_dir.empty()) {
    std::cerr << line << '\n';
  } else {
    CsvWriter rep(out_path(cfg, "residual.csv"), {"stationary_residual"});
    rep.row({res});
  }
  return 0;
}

int cmd_evolve(const RunConfig& cfg) {
  if (cfg.t1 == cfg.t0 && cfg.initial.empty() && cfg.solitons.empty())
    std::cerr << "note: t0 == t1, nothing to integrate\n";
  GridPtr grid = make_grid(cfg.grid_n, cfg.grid_length);
  FieldState start = initial_state(cfg, grid);
  const double e0 = energy(start, cfg.system);
  CsvWriter csv(out_path(cfg, "observables.csv"), {"t", "E", "Q1", "Q2", "E_drift"});
  EvolveOptions opt;
  opt.scheme = cfg.scheme;
  opt.dealias = cfg.dealias;
  opt.stride = cfg.stride;
  opt.observer = [&](std::size_t, double t, const FieldState& s) {
    ConservedSnapshot c = conserved(s, cfg.system);
    double drift = e0 != 0.0 ? std::abs(c.energy - e0) / std::abs(e0) : std::abs(c.energy - e0);
    csv.row({t, c.energy, c.momentum1, c.momentum2, drift});
    return true;
  };
  EvolveResult res = evolve(start, cfg.system, cfg.t1, cfg.dt, opt);
  csv.flush();
  if (!cfg.out_dir.empty()) snapshot_write(res.state, out_path(cfg, "final.kgz"));
  return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
  require_solitons(cfg, 1);
  if (cfg.spectrum_soliton >= cfg.solitons.size())
    throw ConfigError("spectrum.soliton", "no soliton with this index");
  const SolitonSpec& spec = cfg.solitons[cfg.spectrum_soliton];
  GridPtr grid = make_grid(cfg.grid_n, cfg.grid_length);
  SchroedingerOperator op = cfg.spectrum_operator == "L1" ? assemble_L1(spec, cfg.system, grid)
                                                          : assemble_L2(spec, cfg.system, grid);
  EigenMethod method = cfg.spectrum_method == "dense"       ? EigenMethod::Dense
                       : cfg.spectrum_method == "iterative" ? EigenMethod::Iterative
                                                            : EigenMethod::Auto;
  auto pairs = eigs_lowest(op, cfg.spectrum_count, method);
  CsvWriter csv(out_path(cfg, "spectrum.csv"), {"index", "eigenvalue", "residual"});
  for (std::size_t i = 0; i < pairs.size(); ++i)
    csv.row({static_cast<double>(i), pairs[i].value, pairs[i].residual});
  return 0;
}

int cmd_modulate(const RunConfig& cfg) {
  require_solitons(cfg, 1);
  GridPtr grid = make_grid(cfg.grid_n, cfg.grid_length);
  FieldState start = initial_state(cfg, grid);
  ModulationTracker tracker(cfg.solitons, cfg.system, modulation_truth(cfg.solitons, cfg.t0),
                            cfg.modulation_tol, cfg.modulation_max_iter);
  EvolveOptions opt;
  opt.scheme = cfg.scheme;
  opt.dealias = cfg.dealias;
  opt.stride = cfg.stride;
  opt.observer = [&](std::size_t i, double t, const FieldState& s) { return tracker(i, t, s); };
  try {
    evolve(start, cfg.system, cfg.t1, cfg.dt, opt);
  } catch (...) {
    // Keep the fits gathered so far.
    CsvWriter csv(out_path(cfg, "modulation.csv"),
                  {"t", "j", "omega_t", "x_t", "gamma_t", "residual_norm", "eps_xnorm"});
    for (const auto& s : tracker.samples())
      for (std::size_t j = 0; j < s.params.size(); ++j)
        csv.row({s.t, static_cast<double>(j), s.params[j].omega, s.params[j].x, s.params[j].gamma,
                 s.residual_norm, s.eps_xnorm});
    throw;
  }
  CsvWriter csv(out_path(cfg, "modulation.csv"),
                {"t", "j", "omega_t", "x_t", "gamma_t", "residual_norm", "eps_xnorm"});
  for (const auto& s : tracker.samples())
    for (std::size_t j = 0; j < s.params.size(); ++j)
      csv.row({s.t, static_cast<double>(j), s.params[j].omega, s.params[j].x, s.params[j].gamma,
               s.residual_norm, s.eps_xnorm});
  return 0;
}

int cmd_construct(const RunConfig& cfg) {
  require_solitons(cfg, 2);
  if (cfg.out_dir.empty()) throw ConfigError("output.dir", "construct writes several files; set an output directory");
  if (cfg.tn_list.empty()) throw ConfigError("construction.tn_list", "missing required field");
  ConstructionConfig cc;
  cc.specs = cfg.solitons;
  cc.params = cfg.system;
  cc.n_points = cfg.grid_n;
  cc.length = cfg.grid_length;
  cc.t0 = cfg.construction_t0;
  cc.tn_list = cfg.tn_list;
  cc.dt = std::abs(cfg.dt);
  cc.scheme = cfg.scheme;
  cc.sample_stride = cfg.stride;
  cc.dealias = cfg.dealias;
  try {
    validate(cc);
  } catch (const ParameterError& e) {
    throw ConfigError("construction", e.what());
  }
  ConstructionReport rep = run_construction(cc);
  std::vector<BootstrapVerdict> verdicts = bootstrap_probe(rep, 1.0);

  CsvWriter summary(out_path(cfg, "summary.csv"),
                    {"n", "Tn", "t_sharp", "envelope_const", "fitted_rate", "max_drift", "completed"});
  for (std::size_t i = 0; i < rep.runs.size(); ++i) {
    const ConstructionRun& run = rep.runs[i];
    std::string name = "construction_n" + std::to_string(i) + ".csv";
    CsvWriter csv(out_path(cfg, name),
                  {"t", "x_err", "bound", "E", "Q1", "Q2", "bound_modulation", "bound_modulation_c"});
    for (const auto& s : run.samples)
      csv.row({s.t, s.x_err, s.bound, s.conserved.energy, s.conserved.momentum1, s.conserved.momentum2,
               s.bound_modulation, s.bound_modulation_c});
    if (run.completed) snapshot_write(run.final_state, out_path(cfg, "u_n" + std::to_string(i) + "_T0.kgz"));
    else std::cerr << "run n=" << i << " (Tn=" << run.tn << ") failed: " << run.failure << '\n';
    summary.row({static_cast<double>(i), run.tn, verdicts[i].t_sharp, run.envelope_const, run.fitted_rate,
                 run.max_drift, run.completed ? 1.0 : 0.0});
  }
  CsvWriter cauchy(out_path(cfg, "cauchy.csv"), {"n", "m", "x_norm"});
  for (std::size_t i = 0; i < rep.cauchy_table.size(); ++i)
    for (std::size_t j = i + 1; j < rep.cauchy_table.size(); ++j)
      cauchy.row({static_cast<double>(i), static_cast<double>(j), rep.cauchy_table[i][j]});
  std::cerr << "omega_star=" << format_double(rep.constants.omega_star)
            << " c_star=" << format_double(rep.constants.c_star) << '\n';
  for (const auto& run : rep.runs)
    if (!run.completed) return kExitNumerical;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon-Zakharov soliton toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::size_t index = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
    sub->add_option("--set", overrides, "override a config value, e.g. grid.n=1024");
    sub->add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
  };
  CLI::App* soliton = app.add_subcommand("soliton", "soliton profiles and stationary residual");
  soliton->add_option("--index", index, "which soliton of the list");
  CLI::App* evolve_cmd = app.add_subcommand("evolve", "time evolution with conserved quantities");
  CLI::App* spectrum = app.add_subcommand("spectrum", "lowest eigenpairs of L1 or L2");
  CLI::App* modulate = app.add_subcommand("modulate", "modulation parameters along a trajectory");
  CLI::App* construct = app.add_subcommand("construct", "backward multi-soliton construction");
  for (CLI::App* sub : {soliton, evolve_cmd, spectrum, modulate, construct}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (!out_dir.empty()) overrides.push_back("output.dir=\"" + out_dir + "\"");
    RunConfig cfg = load_config(config_path, overrides);
    if (soliton->parsed()) return cmd_soliton(cfg, index);
    if (evolve_cmd->parsed()) return cmd_evolve(cfg);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (modulate->parsed()) return cmd_modulate(cfg);
    if (construct->parsed()) return cmd_construct(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BlowupError& e) {
    std::cerr << "numerical failure: " << e.what() << " (t reached " << e.t_reached() << ")\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
