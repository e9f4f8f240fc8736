#include <doctest.h>

#include <cmath>

#include "kgz/errors.hpp"
#include "kgz/grid.hpp"

using namespace kgz;

TEST_CASE("grid construction and validation") {
  auto g = make_grid(64, 10.0);
  CHECK(g->size() == 64);
  CHECK(g->dx() == doctest::Approx(10.0 / 64));
  CHECK(g->x().front() == doctest::Approx(-5.0));
  CHECK(g->xi()[1] == doctest::Approx(2 * M_PI / 10.0));
  CHECK(g->xi()[32] == doctest::Approx(-32 * 2 * M_PI / 10.0));
  CHECK(g->xi_odd()[32] == 0.0);
  CHECK(g->padded_size() >= 96);
  CHECK(g->padded_size() % 2 == 0);

  CHECK_THROWS_AS(make_grid(63, 10.0), ParameterError);
  CHECK_THROWS_AS(make_grid(4, 10.0), ParameterError);
  CHECK_THROWS_AS(make_grid(64, 0.0), ParameterError);
  CHECK_THROWS_AS(make_grid(64, -1.0), ParameterError);
}

TEST_CASE("transform round trip") {
  auto g = make_grid(128, 20.0);
  ComplexField f = ComplexField::zeros(g);
  for (std::size_t j = 0; j < g->size(); ++j) f[j] = cplx(std::sin(0.3 * j), std::cos(1.7 * j));
  ComplexField back = inverse_transform(g, transform(f));
  double err = 0;
  for (std::size_t j = 0; j < g->size(); ++j) err = std::max(err, std::abs(back[j] - f[j]));
  CHECK(err < 1e-13);
}

TEST_CASE("spectral derivatives of a resolved Gaussian") {
  auto g = make_grid(256, 40.0);
  RealField f = RealField::zeros(g);
  for (std::size_t j = 0; j < g->size(); ++j) {
    double x = g->x()[j];
    f[j] = std::exp(-x * x);
  }
  RealField d1 = spectral_derivative(f, 1);
  RealField d2 = spectral_derivative(f, 2);
  double e1 = 0, e2 = 0;
  for (std::size_t j = 0; j < g->size(); ++j) {
    double x = g->x()[j];
    e1 = std::max(e1, std::abs(d1[j] + 2 * x * std::exp(-x * x)));
    e2 = std::max(e2, std::abs(d2[j] - (4 * x * x - 2) * std::exp(-x * x)));
  }
  CHECK(e1 < 1e-12);
  CHECK(e2 < 1e-11);
  CHECK_THROWS_AS(spectral_derivative(f, 3), ParameterError);
}

TEST_CASE("first derivative keeps real fields real at Nyquist") {
  auto g = make_grid(16, 2 * M_PI);
  ComplexField f = ComplexField::zeros(g);
  for (std::size_t j = 0; j < 16; ++j) f[j] = (j % 2 == 0) ? 1.0 : -1.0;
  ComplexField d = spectral_derivative(f, 1);
  for (std::size_t j = 0; j < 16; ++j) CHECK(std::abs(d[j]) < 1e-12);
}

TEST_CASE("L2 inner product of exponentials") {
  auto g = make_grid(64, 2 * M_PI);
  ComplexField e1 = ComplexField::zeros(g), e2 = ComplexField::zeros(g);
  for (std::size_t j = 0; j < 64; ++j) {
    e1[j] = std::exp(cplx(0, g->x()[j]));
    e2[j] = std::exp(cplx(0, 2 * g->x()[j]));
  }
  CHECK(inner_product_l2(e1, e1) == doctest::Approx(2 * M_PI));
  CHECK(std::abs(inner_product_l2(e1, e2)) < 1e-12);
}

TEST_CASE("mixing grids is rejected") {
  auto a = make_grid(32, 10.0);
  auto b = make_grid(64, 10.0);
  auto c = make_grid(32, 10.0);
  CHECK_THROWS_AS(RealField::zeros(a) + RealField::zeros(b), GridMismatch);
  CHECK_NOTHROW(RealField::zeros(a) + RealField::zeros(c));
}

TEST_CASE("periodic offset folds into the half-open cell") {
  CHECK(periodic_offset(4.0, -4.0, 10.0) == doctest::Approx(-2.0));
  CHECK(periodic_offset(0.0, 0.0, 10.0) == 0.0);
  CHECK(periodic_offset(5.0, 0.0, 10.0) == doctest::Approx(-5.0));
  CHECK(periodic_offset(-7.0, 1.0, 10.0) == doctest::Approx(2.0));
}
