#include "kgz/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgz/errors.hpp"

namespace kgz {

double TheoremConstants::rate() const { return std::sqrt(omega_star) * c_star; }

TheoremConstants theorem_constants(const std::vector<SolitonSpec>& specs) {
  if (specs.size() < 2) throw ParameterError("theorem_constants: need at least two solitons (c* undefined)");
  TheoremConstants tc{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < specs.size(); ++j) {
    tc.omega_star = std::min(tc.omega_star, specs[j].big_i() / 256.0);
    for (std::size_t k = j + 1; k < specs.size(); ++k)
      tc.c_star = std::min(tc.c_star, std::abs(specs[j].c - specs[k].c));
  }
  if (!(tc.c_star > 0.0)) throw ParameterError("theorem_constants: speeds must be pairwise distinct");
  return tc;
}

void validate(const ConstructionConfig& cfg) {
  if (cfg.specs.size() < 2) throw ParameterError("construction: need at least two solitons");
  for (const auto& s : cfg.specs) check_admissible(s, cfg.params);
  theorem_constants(cfg.specs);
  if (cfg.tn_list.empty()) throw ParameterError("construction: tn_list is empty");
  for (std::size_t i = 0; i < cfg.tn_list.size(); ++i) {
    if (!(cfg.tn_list[i] > cfg.t0)) throw ParameterError("construction: every Tn must exceed T0");
    if (i > 0 && !(cfg.tn_list[i] > cfg.tn_list[i - 1]))
      throw ParameterError("construction: tn_list must be increasing");
  }
  if (!(cfg.t0 > 0.0)) throw ParameterError("construction: T0 must be positive");
  if (!(std::abs(cfg.dt) > 0.0)) throw ParameterError("construction: dt must be nonzero");
  if (cfg.sample_stride == 0) throw ParameterError("construction: sample_stride must be positive");
  double t_max = cfg.tn_list.back();
  double reach = 0.0;
  for (const auto& s : cfg.specs) {
    double far = std::max(std::abs(s.x0 + s.c * t_max), std::abs(s.x0 + s.c * cfg.t0));
    reach = std::max(reach, far + 10.0 / s.k());
  }
  if (!(cfg.length > 2.0 * reach)) {
    std::ostringstream os;
    os << "construction: domain length " << cfg.length << " must exceed " << 2.0 * reach
       << " to keep solitons 10 decay lengths off the periodic seam";
    throw ParameterError(os.str());
  }
}

namespace {

struct Scales {
  double e, q1, q2;
};

Scales magnitude_scales(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                        const GridPtr& grid, double t, const FieldState& total) {
  Scales s{std::abs(energy(total, params)), std::abs(momentum1(total, params)),
           std::abs(momentum2(total))};
  Scales sum{0.0, 0.0, 0.0};
  for (const auto& spec : specs) {
    FieldState r = soliton_state(spec, params, grid, t);
    sum.e += std::abs(energy(r, params));
    sum.q1 += std::abs(momentum1(r, params));
    sum.q2 += std::abs(momentum2(r));
  }
  return {std::max(s.e, sum.e), std::max(s.q1, sum.q1), std::max(s.q2, sum.q2)};
}

double drift_of(double now, double ref, double scale) {
  return scale > 0.0 ? std::abs(now - ref) / scale : std::abs(now - ref);
}

void summarize(ConstructionRun& run, double t0) {
  const double mid = 0.5 * (t0 + run.tn);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& s : run.samples) {
    if (s.bound > 0.0) run.envelope_const = std::max(run.envelope_const, s.x_err / s.bound);
    if (s.t >= mid && s.t <= run.tn - 1.0 && s.x_err > 0.0) {
      double y = std::log(s.x_err);
      sx += s.t;
      sy += y;
      sxx += s.t * s.t;
      sxy += s.t * y;
      ++m;
    }
  }
  if (m >= 2) {
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    run.fitted_rate = -slope;
  }
  for (const auto& s : run.samples)
    run.rate_envelope = std::max(run.rate_envelope, s.x_err * std::exp(run.fitted_rate * s.t));
}

}  // namespace

ConstructionRun backward_run(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                             const GridPtr& grid, double tn, double t0, double dt, Scheme scheme,
                             std::size_t stride, double bound_rate, double omega_star,
                             double c_star, bool dealias) {
  ConstructionRun run;
  run.tn = tn;
  FieldState start = multisoliton_state(specs, params, grid, tn);
  ConservedSnapshot ref = conserved(start, params);
  Scales scale = magnitude_scales(specs, params, grid, tn, start);
  const double w32 = std::pow(omega_star, 1.5);

  EvolveOptions opt;
  opt.scheme = scheme;
  opt.dealias = dealias;
  opt.stride = stride;
  opt.observer = [&](std::size_t, double t, const FieldState& s) {
    FieldState exact = multisoliton_state(specs, params, grid, t);
    ConstructionSample row;
    row.t = t;
    row.x_err = x_norm(s - exact);
    row.bound = std::exp(-bound_rate * t);
    row.bound_modulation = std::exp(-w32 * t);
    row.bound_modulation_c = std::exp(-w32 * c_star * t);
    row.conserved = conserved(s, params);
    row.conserved.x_norm_sq = row.x_err * row.x_err;
    run.max_drift = std::max({run.max_drift, drift_of(row.conserved.energy, ref.energy, scale.e),
                              drift_of(row.conserved.momentum1, ref.momentum1, scale.q1),
                              drift_of(row.conserved.momentum2, ref.momentum2, scale.q2)});
    run.samples.push_back(row);
    return true;
  };
  try {
    EvolveResult res = evolve(start, params, t0, -std::abs(dt), opt);
    run.final_state = res.state;
    run.completed = true;
  } catch (const BlowupError& e) {
    run.failure = e.what();
    run.completed = false;
  }
  run.drift_ok = run.completed && run.max_drift < 1e-7;
  summarize(run, t0);
  return run;
}

ConstructionReport run_construction(const ConstructionConfig& cfg) {
  validate(cfg);
  ConstructionReport rep;
  rep.constants = theorem_constants(cfg.specs);
  GridPtr grid = make_grid(cfg.n_points, cfg.length);
  const double rate = rep.constants.rate();
  const double t_max = cfg.tn_list.back();

  if (cfg.self_check) {
    const double span = std::min(1.0, t_max - cfg.t0);
    ConstructionRun check = backward_run({cfg.specs.front()}, cfg.params, grid, t_max, t_max - span,
                                         cfg.dt, cfg.scheme, 0, rate, 0.0, 0.0, cfg.dealias);
    rep.self_check_error = check.samples.empty() ? INFINITY : check.samples.back().x_err;
    if (!check.completed || !(rep.self_check_error < 1e-6)) {
      std::ostringstream os;
      os << "construction self-check failed: single-soliton backward error " << rep.self_check_error
         << " at dt=" << cfg.dt;
      throw NumericalError(os.str());
    }
  }

  for (double tn : cfg.tn_list)
    rep.runs.push_back(backward_run(cfg.specs, cfg.params, grid, tn, cfg.t0, cfg.dt, cfg.scheme,
                                    cfg.sample_stride, rate, rep.constants.omega_star,
                                    rep.constants.c_star, cfg.dealias));

  const std::size_t n = rep.runs.size();
  rep.cauchy_table.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = std::numeric_limits<double>::infinity();
      if (rep.runs[i].completed && rep.runs[j].completed)
        d = x_norm(rep.runs[i].final_state - rep.runs[j].final_state);
      rep.cauchy_table[i][j] = rep.cauchy_table[j][i] = d;
    }
  return rep;
}

std::vector<BootstrapVerdict> bootstrap_probe(const ConstructionReport& report,
                                              double threshold_scale) {
  std::vector<BootstrapVerdict> out;
  for (const auto& run : report.runs) {
    BootstrapVerdict v{run.tn, run.tn, false};
    if (threshold_scale > 0.0 && !run.samples.empty()) {
      for (const auto& s : run.samples) {
        if (!(s.x_err <= threshold_scale * s.bound)) break;
        v.t_sharp = s.t;
      }
      double t_end = run.samples.back().t;
      v.pass = run.completed && v.t_sharp == t_end;
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace kgz
