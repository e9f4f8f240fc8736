#include <doctest.h>

#include <cmath>

#include "kgz/errors.hpp"
#include "kgz/evolution.hpp"
#include "kgz/observables.hpp"
#include "kgz/soliton.hpp"

using namespace kgz;

namespace {

double transport_error(Scheme scheme, double dt, std::size_t n = 512, double length = 60.0) {
  auto g = make_grid(n, length);
  SystemParams p{1.0, 0.2};
  SolitonSpec s{0.5, 0.3, -2.0, 0.1};
  EvolveOptions opt;
  opt.scheme = scheme;
  EvolveResult r = evolve(soliton_state(s, p, g, 0.0), p, 2.0, dt, opt);
  return x_norm(r.state - soliton_state(s, p, g, 2.0));
}

}  // namespace

TEST_CASE("scheme names") {
  CHECK(parse_scheme("rk4") == Scheme::RK4);
  CHECK(parse_scheme("strang") == Scheme::Strang);
  CHECK(parse_scheme("lawson") == Scheme::Lawson);
  CHECK(to_string(Scheme::Strang) == "strang");
  CHECK_THROWS_AS(parse_scheme("euler"), ParameterError);
}

TEST_CASE("zero state stays zero") {
  auto g = make_grid(64, 10.0);
  FieldState z;
  static_cast<FieldSet&>(z) = FieldSet::zeros(g);
  for (Scheme s : {Scheme::RK4, Scheme::Strang, Scheme::Lawson}) {
    FieldState out = step(z, SystemParams{}, 0.01, s);
    CHECK(x_norm(out) == 0.0);
    CHECK(out.t == doctest::Approx(0.01));
  }
}

TEST_CASE("linear propagator matches a single Fourier mode") {
  // With alpha = beta = 0 the system is linear; mode e^{i q x} in (u, rho)
  // oscillates at frequency sqrt(q^2 + 1), in (v, n) at |q|.
  auto g = make_grid(32, 2 * M_PI);
  const double q = 3.0, t = 0.37;
  FieldState s;
  static_cast<FieldSet&>(s) = FieldSet::zeros(g);
  for (std::size_t j = 0; j < 32; ++j) {
    double x = g->x()[j];
    s.u[j] = std::exp(cplx(0, q * x));
    s.v[j] = std::cos(q * x);
  }
  LinearPropagator prop(g, t);
  FieldState out = apply_linear(s, prop);
  const double w = std::sqrt(q * q + 1.0);
  double err = 0;
  for (std::size_t j = 0; j < 32; ++j) {
    double x = g->x()[j];
    cplx e = std::exp(cplx(0, q * x));
    err = std::max(err, std::abs(out.u[j] - std::cos(w * t) * e));
    err = std::max(err, std::abs(out.rho[j] - w * std::sin(w * t) * e));
    // v_t = n_x, n_t = v_x: d'Alembert with v(0) = cos(qx), n(0) = 0.
    err = std::max(err, std::abs(out.v[j] - 0.5 * (std::cos(q * (x + t)) + std::cos(q * (x - t)))));
    err = std::max(err, std::abs(out.n[j] - 0.5 * (std::cos(q * (x + t)) - std::cos(q * (x - t)))));
  }
  CHECK(err < 1e-13);
}

TEST_CASE("linear propagator composes") {
  auto g = make_grid(64, 20.0);
  LinearPropagator full(g, 0.2), half(g, 0.1);
  for (std::size_t k = 0; k < 64; ++k) {
    double a = half.g1_uu()[k], b = half.g1_ur()[k], c = half.g1_ru()[k], d = half.g1_rr()[k];
    CHECK(a * a + b * c == doctest::Approx(full.g1_uu()[k]));
    CHECK(a * b + b * d == doctest::Approx(full.g1_ur()[k]));
    CHECK(half.g2_cos()[k] * half.g2_cos()[k] - half.g2_sin()[k] * half.g2_sin()[k] ==
          doctest::Approx(full.g2_cos()[k]));
  }
}

TEST_CASE("soliton transport and convergence orders") {
  double l1 = transport_error(Scheme::Lawson, 2e-3);
  CHECK(l1 < 1e-7);

  double r1 = transport_error(Scheme::RK4, 0.02), r2 = transport_error(Scheme::RK4, 0.01);
  CHECK(r1 / r2 == doctest::Approx(16.0).epsilon(0.2));

  double s1 = transport_error(Scheme::Strang, 0.02), s2 = transport_error(Scheme::Strang, 0.01);
  CHECK(s1 / s2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("dealiasing is harmless on a resolved soliton") {
  auto g = make_grid(512, 60.0);
  SystemParams p{1.0, 0.0};
  SolitonSpec s{0.3, 0.2};
  FieldState st = soliton_state(s, p, g, 0.0);
  FieldState a = step(st, p, 0.01, Scheme::Lawson, {true});
  FieldState b = step(st, p, 0.01, Scheme::Lawson, {false});
  CHECK(x_norm(a - b) < 1e-12);
}

TEST_CASE("evolve lands on the target time and calls the observer") {
  auto g = make_grid(128, 40.0);
  SystemParams p;
  FieldState st = soliton_state({0.3, 0.1}, p, g, 0.0);
  std::vector<std::size_t> steps;
  std::vector<double> times;
  EvolveOptions opt;
  opt.stride = 4;
  opt.observer = [&](std::size_t i, double t, const FieldState&) {
    steps.push_back(i);
    times.push_back(t);
    return true;
  };
  EvolveResult r = evolve(st, p, 0.1, 0.0095, opt);
  CHECK(r.steps == 11);
  CHECK(r.state.t == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(steps == std::vector<std::size_t>{0, 4, 8, 11});
  CHECK(times.front() == 0.0);
  CHECK(times.back() == doctest::Approx(0.1));

  EvolveResult back = evolve(r.state, p, 0.0, -0.01, {});
  CHECK(back.state.t == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(x_norm(back.state - st) < 1e-9);
}

TEST_CASE("observer can stop a run") {
  auto g = make_grid(64, 20.0);
  FieldState st = soliton_state({0.3, 0.1}, SystemParams{}, g, 0.0);
  EvolveOptions opt;
  opt.stride = 1;
  opt.observer = [](std::size_t i, double, const FieldState&) { return i < 3; };
  EvolveResult r = evolve(st, SystemParams{}, 1.0, 0.01, opt);
  CHECK(r.aborted);
  CHECK(r.steps == 3);
}

TEST_CASE("invalid time steps are rejected") {
  auto g = make_grid(64, 20.0);
  FieldState st = soliton_state({0.3, 0.1}, SystemParams{}, g, 0.0);
  CHECK_THROWS_AS(evolve(st, SystemParams{}, 1.0, -0.01), ParameterError);
  CHECK_THROWS_AS(evolve(st, SystemParams{}, 1.0, 0.0), ParameterError);
}

TEST_CASE("explicit RK4 beyond its stability limit reports blow-up") {
  auto g = make_grid(256, 10.0);
  FieldState st = soliton_state({0.3, 0.1}, SystemParams{}, g, 0.0);
  EvolveOptions opt;
  opt.scheme = Scheme::RK4;
  try {
    evolve(st, SystemParams{}, 1000.0, 0.1, opt);
    FAIL("expected BlowupError");
  } catch (const BlowupError& e) {
    CHECK(e.t_reached() > 0.0);
    CHECK(e.t_reached() < 1000.0);
  }
}
