#include <doctest.h>

#include <cmath>
#include <random>

#include "kgz/errors.hpp"
#include "kgz/evolution.hpp"
#include "kgz/linearized.hpp"
#include "kgz/modulation.hpp"
#include "kgz/observables.hpp"

using namespace kgz;

namespace {

// Directions the fit makes eps orthogonal to, built independently of the
// library residual code.
std::vector<ComplexField> fit_directions(const SolitonSpec& ref, const SystemParams& p, const ModParams& m,
                                         const GridPtr& g) {
  SechProfile prof = sech_profile({m.omega, ref.c}, p);
  std::vector<ComplexField> d(3, ComplexField::zeros(g));
  for (std::size_t i = 0; i < g->size(); ++i) {
    double x = g->x()[i];
    double y = periodic_offset(x, m.x, g->length());
    cplx e = std::polar(1.0, ref.theta() * x + m.gamma);
    d[0][i] = cplx(0, 1) * e * prof.phi(y);
    d[1][i] = e * cplx(prof.dphi(y), ref.theta() * prof.phi(y));
    d[2][i] = e * std::pow(1.0 / std::cosh(ref.k() * y), 2);
  }
  return d;
}

FieldSet shifted(const FieldSet& f, std::size_t by) {
  FieldSet out = f;
  const std::size_t n = f.u.size();
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t k = (j + n - by) % n;
    out.u[j] = f.u[k];
    out.rho[j] = f.rho[k];
    out.v[j] = f.v[k];
    out.n[j] = f.n[k];
  }
  return out;
}

}  // namespace

TEST_CASE("truth parameters reproduce the exact soliton") {
  auto g = make_grid(1024, 80.0);
  SystemParams p{1.0, 0.3};
  std::vector<SolitonSpec> specs{{0.4, 0.3, -10.0, 0.2}, {0.2, -0.2, 12.0, 1.0}};
  const double t = 3.5;
  FieldSet tmpl = modulated_template(specs, p, g, modulation_truth(specs, t));
  CHECK(x_norm(tmpl - multisoliton_state(specs, p, g, t)) < 1e-12);
  for (double r : orthogonality_residuals(tmpl, p, specs, modulation_truth(specs, t))) CHECK(std::abs(r) < 1e-14);
}

TEST_CASE("injected shifts are recovered on a perturbed soliton") {
  auto g = make_grid(2048, 100.0);
  SystemParams p{1.0, 0.2};
  std::vector<SolitonSpec> specs{{0.5, 0.3, 1.0, 0.2}};
  std::vector<ModParams> target = modulation_truth(specs, 0.0);
  target[0].x += 1e-2;
  target[0].gamma += 1e-2;
  target[0].omega += 1e-3;

  std::mt19937_64 rng(17);
  Perturbation eps = 1e-3 * random_perturbation(g, {1.0}, rng);
  project_out(eps, fit_directions(specs[0], p, target[0], g));
  FieldSet state = modulated_template(specs, p, g, target) + eps;

  ModulationFit fit = fit_modulation(state, p, specs, modulation_truth(specs, 0.0));
  CHECK(std::abs(fit.params[0].x - target[0].x) < 1e-8);
  CHECK(std::abs(fit.params[0].gamma - target[0].gamma) < 1e-8);
  CHECK(std::abs(fit.params[0].omega - target[0].omega) < 1e-8);
  CHECK(fit.residual_norm < 1e-10);
  CHECK_FALSE(fit.ill_conditioned);
  CHECK(fit.eps_xnorm == doctest::Approx(x_norm(state - modulated_template(specs, p, g, fit.params))));

  ModulationFit again = fit_modulation(state, p, specs, fit.params);
  CHECK(again.iterations == 0);
  CHECK(again.params[0].x == fit.params[0].x);
}

TEST_CASE("fit is equivariant under translation and gauge") {
  auto g = make_grid(1024, 80.0);
  SystemParams p;
  std::vector<SolitonSpec> specs{{0.4, 0.25, -2.0, 0.3}};
  std::vector<ModParams> target = modulation_truth(specs, 0.0);
  target[0].omega += 2e-3;
  target[0].x += 3e-2;
  std::mt19937_64 rng(2);
  FieldSet state = modulated_template(specs, p, g, target) + 1e-3 * random_perturbation(g, {-2.0}, rng);
  ModulationFit base = fit_modulation(state, p, specs, modulation_truth(specs, 0.0));

  const std::size_t by = 37;
  const double delta = by * g->dx();
  std::vector<ModParams> guess = base.params;
  guess[0].x += delta;
  guess[0].gamma -= specs[0].theta() * delta;
  guess[0].x += 0.05;
  guess[0].omega -= 0.01;
  ModulationFit moved = fit_modulation(shifted(state, by), p, specs, guess);
  CHECK(moved.iterations > 0);
  CHECK(std::abs(moved.params[0].x - (base.params[0].x + delta)) < 1e-10);
  CHECK(std::abs(moved.params[0].gamma - (base.params[0].gamma - specs[0].theta() * delta)) < 1e-10);
  CHECK(std::abs(moved.params[0].omega - base.params[0].omega) < 1e-10);

  const double phase = 0.3;
  FieldSet rotated = state;
  for (std::size_t j = 0; j < g->size(); ++j) {
    rotated.u[j] *= std::polar(1.0, phase);
    rotated.rho[j] *= std::polar(1.0, phase);
  }
  guess = base.params;
  guess[0].gamma += 0.5 * phase;
  guess[0].x -= 0.05;
  ModulationFit turned = fit_modulation(rotated, p, specs, guess);
  CHECK(std::abs(turned.params[0].gamma - (base.params[0].gamma + phase)) < 1e-10);
  CHECK(std::abs(turned.params[0].x - base.params[0].x) < 1e-10);
}

TEST_CASE("Jacobian is well conditioned for separated solitons") {
  auto g = make_grid(1024, 120.0);
  SystemParams p;
  std::vector<SolitonSpec> specs{{0.3, 0.3, -20.0}, {0.5, -0.2, 20.0}};
  FieldState st = multisoliton_state(specs, p, g, 0.0);
  auto jac = modulation_jacobian(st, p, specs, modulation_truth(specs, 0.0));
  CHECK(jac.size() == 36);
  // Cross-soliton blocks are negligible.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t q = 3; q < 6; ++q) CHECK(std::abs(jac[i * 6 + q]) < 1e-8);
}

TEST_CASE("fit failures and bad candidates") {
  auto g = make_grid(512, 60.0);
  SystemParams p;
  std::vector<SolitonSpec> specs{{0.4, 0.2}};
  FieldState st = soliton_state(specs[0], p, g, 0.0);
  std::vector<ModParams> guess = modulation_truth(specs, 0.0);
  guess[0].x += 0.5;
  try {
    fit_modulation(st, p, specs, guess, 1e-10, 1);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residuals().size() == 3);
  }
  std::vector<ModParams> bad = guess;
  bad[0].omega = 2.0;
  CHECK_THROWS_AS(fit_modulation(st, p, specs, bad), ParameterError);
  CHECK_THROWS_AS(fit_modulation(st, p, specs, {}), ParameterError);
}

TEST_CASE("tracker along an exact trajectory") {
  auto g = make_grid(512, 60.0);
  SystemParams p;
  std::vector<SolitonSpec> specs{{0.5, 0.3, -3.0}};
  ModulationTracker tracker(specs, p, modulation_truth(specs, 0.0));
  EvolveOptions opt;
  opt.stride = 50;
  opt.observer = [&](std::size_t i, double t, const FieldState& s) { return tracker(i, t, s); };
  evolve(soliton_state(specs[0], p, g, 0.0), p, 1.0, 2e-3, opt);
  CHECK(tracker.samples().size() == 11);
  for (const auto& r : tracker.rates()) {
    CHECK(r.omega_rate < 1e-6);
    CHECK(r.x_rate < 1e-6);
    CHECK(r.gamma_rate < 1e-6);
  }
  CHECK(rate_constant(tracker.rates(), 0.1) < 1e-5);
}
