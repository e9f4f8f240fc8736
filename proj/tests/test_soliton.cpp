#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <string>

#include "kgz/errors.hpp"
#include "kgz/evolution.hpp"
#include "kgz/soliton.hpp"

using namespace kgz;

namespace {

double max_abs_diff(const FieldSet& a, const FieldSet& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.u.size(); ++j)
    m = std::max({m, std::abs(a.u[j] - b.u[j]), std::abs(a.rho[j] - b.rho[j]),
                  std::abs(a.v[j] - b.v[j]), std::abs(a.n[j] - b.n[j])});
  return m;
}

}  // namespace

TEST_CASE("admissibility names the violated inequality") {
  SystemParams p{1.0, 0.0};
  CHECK(is_admissible({0.5, 0.5}, p));
  try {
    check_admissible({0.0, 1.0}, p);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("|c| < 1") != std::string::npos);
  }
  try {
    check_admissible({1.0, 0.0}, p);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("1 - c^2 - omega^2 > 0") != std::string::npos);
  }
  try {
    check_admissible({0.0, 0.0}, SystemParams{1.0, 2.0});
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("alpha - beta(1 - c^2) > 0") != std::string::npos);
  }
}

TEST_CASE("explicit profile values") {
  auto g = make_grid(2048, 80.0);
  SystemParams p{1.0, 0.0};
  RealField phi = phi_profile({0.0, 0.0}, p, g);
  CHECK(phi[1024] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  SecondaryProfiles sec = secondary_profiles({0.5, 0.5}, p, g);
  CHECK(std::abs(sec.psi[1024] + 4.0 / 3.0) < 1e-12);
  CHECK(std::abs(sec.varphi[1024] - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("profile norm against quadrature") {
  SystemParams p{1.0, 0.5};
  SolitonSpec s{0.3, -0.4, 2.0, 0.0};
  SechProfile prof = sech_profile(s, p);
  boost::math::quadrature::tanh_sinh<double> q;
  double exact = q.integrate([&](double y) { return prof.phi(y) * prof.phi(y); },
                             -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity());
  auto g = make_grid(1024, 80.0);
  RealField phi = phi_profile(s, p, g);
  CHECK(inner_product_l2(phi, phi) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(exact == doctest::Approx(2 * prof.amplitude * prof.amplitude / prof.k).epsilon(1e-12));
}

TEST_CASE("closed-form profile solves the stationary equation") {
  SystemParams p{2.0, 0.5};
  SolitonSpec s{0.4, 0.3};
  SechProfile prof = sech_profile(s, p);
  const double a = s.a();
  const double m = (p.alpha - p.beta * a) / (a * a);
  for (double y : {-3.0, -0.7, 0.0, 0.2, 1.5, 6.0}) {
    double r = prof.ddphi(y) - s.big_i() * prof.phi(y) + m * std::pow(prof.phi(y), 3);
    CHECK(std::abs(r) < 1e-13);
  }
  auto g = make_grid(2048, 80.0);
  CHECK(stationary_residual(s, p, g) < 1e-10);
}

TEST_CASE("soliton state is a traveling solution") {
  auto g = make_grid(1024, 80.0);
  SystemParams p{1.0, 0.3};
  SolitonSpec s{0.5, 0.4, -3.0, 0.7};
  const double t = 1.3, h = 1e-4;
  FieldState now = soliton_state(s, p, g, t);
  FieldSet dt = 0.5 / h * (soliton_state(s, p, g, t + h) - soliton_state(s, p, g, t - h));
  CHECK(max_abs_diff(rhs(now, p), dt) < 1e-6);
}

TEST_CASE("advanced spec reproduces the traveled state") {
  auto g = make_grid(512, 60.0);
  SystemParams p{1.0, 0.0};
  SolitonSpec s{0.2, -0.3, 1.0, 0.1};
  FieldState a = soliton_state(s, p, g, 4.0);
  FieldState b = soliton_state(advanced(s, 4.0), p, g, 0.0);
  CHECK(max_abs_diff(a, b) < 1e-12);
}

TEST_CASE("profiles wrap across the periodic seam") {
  auto g = make_grid(512, 40.0);
  SystemParams p{1.0, 0.0};
  RealField near_seam = phi_profile({0.0, 0.0, 19.0}, p, g);
  RealField centered = phi_profile({0.0, 0.0, -1.0}, p, g);
  // Shifting by 20 = half a period maps one onto the other.
  for (std::size_t j = 0; j < 512; ++j) CHECK(near_seam[(j + 256) % 512] == doctest::Approx(centered[j]));
}

TEST_CASE("multisoliton requires distinct speeds") {
  auto g = make_grid(256, 40.0);
  SystemParams p;
  CHECK_THROWS_AS(multisoliton_state({{0.1, 0.2}, {0.3, 0.2, 5.0}}, p, g, 0.0), ParameterError);
  CHECK_THROWS_AS(multisoliton_state({{1.0, 0.0}}, p, g, 0.0), ParameterError);
  FieldState sum = multisoliton_state({{0.1, 0.2, -8.0}, {0.3, -0.2, 8.0}}, p, g, 0.5);
  FieldSet parts = soliton_state({0.1, 0.2, -8.0}, p, g, 0.5) + soliton_state({0.3, -0.2, 8.0}, p, g, 0.5);
  CHECK(max_abs_diff(sum, parts) < 1e-15);
  CHECK(sum.t == 0.5);
}
