#pragma once

#include <string>
#include <vector>

#include "kgz/evolution.hpp"
#include "kgz/observables.hpp"
#include "kgz/soliton.hpp"

namespace kgz {

struct TheoremConstants {
  double omega_star = 0.0;  // min_j I_j / 256
  double c_star = 0.0;      // min pairwise speed gap
  /// sqrt(omega_star) c_star, the exponential rate of the error bound.
  double rate() const;
};

TheoremConstants theorem_constants(const std::vector<SolitonSpec>& specs);

struct ConstructionConfig {
  std::vector<SolitonSpec> specs;
  SystemParams params;
  std::size_t n_points = 4096;
  double length = 200.0;
  double t0 = 20.0;
  std::vector<double> tn_list;
  double dt = 1e-3;  // magnitude; the backward sign is applied internally
  Scheme scheme = Scheme::Lawson;
  std::size_t sample_stride = 100;
  bool dealias = true;
  /// Single-soliton backward check before the runs.
  bool self_check = true;
};

/// Throws ParameterError on invalid configurations,
/// including a domain too short to keep the solitons off the seam.
void validate(const ConstructionConfig& config);

struct ConstructionSample {
  double t = 0.0;
  double x_err = 0.0;
  double bound = 0.0;            // e^{-sqrt(omega*) c* t}
  double bound_modulation = 0.0;  // e^{-omega*^{3/2} t}
  double bound_modulation_c = 0.0;  // e^{-omega*^{3/2} c* t}
  ConservedSnapshot conserved;
};

struct ConstructionRun {
  double tn = 0.0;
  std::vector<ConstructionSample> samples;  // ordered from t = tn down to t0
  FieldState final_state;                   // u^n(T0)
  bool completed = false;
  std::string failure;
  double max_drift = 0.0;  // relative drift of E, Q1, Q2
  bool drift_ok = false;
  double envelope_const = 0.0;  // max x_err / bound
  double fitted_rate = 0.0;     // decay rate of x_err over the final half
  double rate_envelope = 0.0;   // max x_err e^{fitted_rate t}
};

struct ConstructionReport {
  TheoremConstants constants;
  std::vector<ConstructionRun> runs;
  /// cauchy[i][j] = |u^i(T0) - u^j(T0)|_X, infinite when a run failed.
  std::vector<std::vector<double>> cauchy_table;
  double self_check_error = 0.0;
};

/// Integrates R(tn) backward to t0 and logs the error against R(t).
ConstructionRun backward_run(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                             const GridPtr& grid, double tn, double t0, double dt, Scheme scheme,
                             std::size_t stride, double bound_rate, double omega_star = 0.0,
                             double c_star = 0.0, bool dealias = true);

ConstructionReport run_construction(const ConstructionConfig& config);

struct BootstrapVerdict {
  double tn = 0.0;
  double t_sharp = 0.0;  // left end of the largest window [t_sharp, tn]
  bool pass = false;     // t_sharp reaches t0
};

std::vector<BootstrapVerdict> bootstrap_probe(const ConstructionReport& report,
                                              double threshold_scale);

}  // namespace kgz
