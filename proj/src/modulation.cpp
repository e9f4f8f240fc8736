#include "kgz/modulation.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kgz/errors.hpp"
#include "kgz/observables.hpp"

namespace kgz {

namespace {

double sech2(double z) {
  double s = 1.0 / std::cosh(z);
  return s * s;
}

SolitonSpec modulated_spec(const SolitonSpec& ref, const ModParams& p) {
  return {p.omega, ref.c, p.x, p.gamma};
}

void check_candidate(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                     const std::vector<ModParams>& candidate) {
  if (candidate.size() != specs.size())
    throw ParameterError("modulation: candidate size does not match soliton count");
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto& p = candidate[j];
    if (!std::isfinite(p.omega) || !std::isfinite(p.x) || !std::isfinite(p.gamma))
      throw ParameterError("modulation: non-finite candidate for soliton " + std::to_string(j));
    check_admissible(modulated_spec(specs[j], p), params);
  }
}

bool candidate_admissible(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                          const std::vector<ModParams>& candidate) {
  for (std::size_t j = 0; j < specs.size(); ++j)
    if (!is_admissible(modulated_spec(specs[j], candidate[j]), params)) return false;
  return true;
}

// Adds template j (first component only when `full` is false) into `out`.
void add_template(const SolitonSpec& ref, const SystemParams& params, const ModParams& p,
                  FieldSet& out, bool full) {
  SechProfile prof = sech_profile(modulated_spec(ref, p), params);
  const GridPtr& g = out.grid();
  const auto& x = g->x();
  const double theta = ref.theta(), a = ref.a(), s = p.omega / a, c = ref.c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double y = periodic_offset(x[i], p.x, g->length());
    double phi = prof.phi(y);
    cplx e = std::polar(1.0, theta * (y + p.x) + p.gamma);
    out.u[i] += e * phi;
    if (!full) continue;
    out.rho[i] += e * cplx(c * prof.dphi(y), s * phi);
    out.v[i] += -phi * phi / a;
    out.n[i] += c * phi * phi / a;
  }
}

std::vector<double> residuals_impl(const FieldSet& state, const SystemParams& params,
                                   const std::vector<SolitonSpec>& specs,
                                   const std::vector<ModParams>& cand) {
  const GridPtr& g = state.grid();
  FieldSet tmpl = FieldSet::zeros(g);
  for (std::size_t j = 0; j < specs.size(); ++j) add_template(specs[j], params, cand[j], tmpl, false);
  std::vector<cplx> eps(g->size());
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = state.u[i] - tmpl.u[i];

  const auto& x = g->x();
  std::vector<double> r;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const SolitonSpec& ref = specs[j];
    const ModParams& p = cand[j];
    SechProfile prof = sech_profile(modulated_spec(ref, p), params);
    const double theta = ref.theta(), k_ref = ref.k();
    double r_gauge = 0.0, r_trans = 0.0, r_psi = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double y = periodic_offset(x[i], p.x, g->length());
      double phi = prof.phi(y);
      cplx e = std::polar(1.0, theta * (y + p.x) + p.gamma);
      cplx w = eps[i] * std::conj(e);
      // Re(eps conj(e f)) = Re(w conj(f))
      auto pair = [&](cplx f) { return (w * std::conj(f)).real(); };
      r_gauge += pair(cplx(0.0, phi));
      r_trans += pair(cplx(prof.dphi(y), theta * phi));
      r_psi += pair(cplx(sech2(k_ref * y), 0.0));
    }
    r.push_back(r_gauge * g->dx());
    r.push_back(r_trans * g->dx());
    r.push_back(r_psi * g->dx());
  }
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

double* slot(std::vector<ModParams>& c, std::size_t q) {
  ModParams& p = c[q / 3];
  switch (q % 3) {
    case 0: return &p.gamma;
    case 1: return &p.x;
    default: return &p.omega;
  }
}

double condition_number(std::vector<double> jac, int n) {
  std::vector<double> s(n), superb(n);
  lapack_int info = LAPACKE_dgesvd(LAPACK_ROW_MAJOR, 'N', 'N', n, n, jac.data(), n, s.data(), nullptr,
                                   n, nullptr, n, superb.data());
  if (info != 0 || s.back() == 0.0) return INFINITY;
  return s.front() / s.back();
}

}  // namespace

std::vector<ModParams> modulation_truth(const std::vector<SolitonSpec>& specs, double t) {
  std::vector<ModParams> out;
  for (const auto& s : specs) {
    double x = s.x0 + s.c * t;
    out.push_back({s.omega, x, s.gamma0 - s.omega * t - s.theta() * x});
  }
  return out;
}

FieldSet modulated_template(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                            const GridPtr& grid, const std::vector<ModParams>& candidate) {
  check_candidate(specs, params, candidate);
  FieldSet out = FieldSet::zeros(grid);
  for (std::size_t j = 0; j < specs.size(); ++j) add_template(specs[j], params, candidate[j], out, true);
  return out;
}

std::vector<double> orthogonality_residuals(const FieldSet& state, const SystemParams& params,
                                            const std::vector<SolitonSpec>& specs,
                                            const std::vector<ModParams>& candidate) {
  check_candidate(specs, params, candidate);
  return residuals_impl(state, params, specs, candidate);
}

// Residual order per soliton is (gauge, translation, Psi); unknown order is
// (gamma, x, omega) so the Jacobian is nearly diagonal.
std::vector<double> modulation_jacobian(const FieldSet& state, const SystemParams& params,
                                        const std::vector<SolitonSpec>& specs,
                                        const std::vector<ModParams>& candidate, double h) {
  check_candidate(specs, params, candidate);
  const std::size_t n = 3 * specs.size();
  std::vector<double> jac(n * n);
  for (std::size_t q = 0; q < n; ++q) {
    std::vector<ModParams> plus = candidate, minus = candidate;
    *slot(plus, q) += h;
    *slot(minus, q) -= h;
    std::vector<double> rp = residuals_impl(state, params, specs, plus);
    std::vector<double> rm = residuals_impl(state, params, specs, minus);
    for (std::size_t i = 0; i < n; ++i) jac[i * n + q] = (rp[i] - rm[i]) / (2.0 * h);
  }
  return jac;
}

ModulationFit fit_modulation(const FieldSet& state, const SystemParams& params,
                             const std::vector<SolitonSpec>& specs,
                             const std::vector<ModParams>& initial_guess, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ParameterError("fit_modulation: tol must be positive");
  if (max_iter < 0) throw ParameterError("fit_modulation: max_iter must be non-negative");
  check_candidate(specs, params, initial_guess);
  const std::size_t n = 3 * specs.size();
  ModulationFit fit;
  fit.params = initial_guess;
  std::vector<double> r = residuals_impl(state, params, specs, fit.params);
  double rn = max_abs(r);
  int iter = 0;
  while (!(rn < tol)) {
    if (iter >= max_iter) {
      std::ostringstream os;
      os << "modulation fit did not converge in " << max_iter << " iterations (residual " << rn << ")";
      throw ConvergenceError(os.str(), r);
    }
    ++iter;
    std::vector<double> jac = modulation_jacobian(state, params, specs, fit.params);
    fit.jacobian_cond = condition_number(jac, static_cast<int>(n));
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = -r[i];
    std::vector<lapack_int> piv(n);
    lapack_int info = LAPACKE_dgesv(LAPACK_ROW_MAJOR, static_cast<lapack_int>(n), 1, jac.data(),
                                    static_cast<lapack_int>(n), piv.data(), delta.data(), 1);
    if (info != 0) throw ConvergenceError("modulation fit: singular Jacobian", r);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, lambda *= 0.5) {
      std::vector<ModParams> trial = fit.params;
      for (std::size_t q = 0; q < n; ++q) *slot(trial, q) += lambda * delta[q];
      if (!candidate_admissible(specs, params, trial)) continue;
      std::vector<double> rt = residuals_impl(state, params, specs, trial);
      double rtn = max_abs(rt);
      if (rtn < rn || half == 29) {
        fit.params = trial;
        r = rt;
        rn = rtn;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("modulation fit: no admissible Newton step", r);
  }
  fit.residual_norm = rn;
  fit.iterations = iter;
  fit.ill_conditioned = fit.jacobian_cond > 1e8;
  fit.epsilon = state - modulated_template(specs, params, state.grid(), fit.params);
  fit.eps_xnorm = x_norm(fit.epsilon);
  return fit;
}

ModulationTracker::ModulationTracker(std::vector<SolitonSpec> specs, SystemParams params,
                                     std::vector<ModParams> initial_guess, double tol, int max_iter)
    : specs_(std::move(specs)),
      params_(params),
      guess_(std::move(initial_guess)),
      tol_(tol),
      max_iter_(max_iter) {}

bool ModulationTracker::operator()(std::size_t, double t, const FieldState& state) {
  try {
    ModulationFit fit = fit_modulation(state, params_, specs_, guess_, tol_, max_iter_);
    guess_ = fit.params;
    samples_.push_back({t, fit.params, fit.residual_norm, fit.eps_xnorm, fit.iterations});
  } catch (const ConvergenceError& e) {
    std::ostringstream os;
    os << "at t=" << t << ": " << e.what();
    throw ConvergenceError(os.str(), e.residuals());
  }
  return true;
}

std::vector<ModulationRate> ModulationTracker::rates() const {
  std::vector<ModulationRate> out;
  for (std::size_t i = 1; i + 1 < samples_.size(); ++i) {
    const auto& lo = samples_[i - 1];
    const auto& hi = samples_[i + 1];
    double dt = hi.t - lo.t;
    if (dt == 0.0) continue;
    for (std::size_t j = 0; j < specs_.size(); ++j) {
      ModulationRate r;
      r.t = samples_[i].t;
      r.j = j;
      r.omega_rate = std::abs((hi.params[j].omega - lo.params[j].omega) / dt);
      r.x_rate = std::abs((hi.params[j].x - lo.params[j].x) / dt - specs_[j].c);
      r.gamma_rate = std::abs((hi.params[j].gamma - lo.params[j].gamma) / dt + specs_[j].s());
      r.eps_xnorm = samples_[i].eps_xnorm;
      out.push_back(r);
    }
  }
  return out;
}

double rate_constant(const std::vector<ModulationRate>& rates, double decay) {
  double c = 0.0;
  for (const auto& r : rates) c = std::max(c, r.omega_rate / (r.eps_xnorm + std::exp(-decay * r.t)));
  return c;
}

}  // namespace kgz
