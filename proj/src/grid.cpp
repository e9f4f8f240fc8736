#include "kgz/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "kgz/errors.hpp"

namespace kgz {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

void* make_plan(std::size_t n, int sign) {
  std::vector<cplx> a(n), b(n);
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  return fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
}

void run(void* plan, const cplx* in, cplx* out) {
  fftw_execute_dft(static_cast<fftw_plan>(plan),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

Grid::Grid(std::size_t n_points, double length)
    : n_(n_points), length_(length), dx_(length / static_cast<double>(n_points)) {
  if (n_points % 2 != 0) throw ParameterError("grid: n_points must be even");
  if (n_points < 8) throw ParameterError("grid: n_points must be at least 8");
  if (!(length > 0.0) || !std::isfinite(length))
    throw ParameterError("grid: length must be positive");

  m_ = 3 * n_ / 2;
  if (m_ % 2 != 0) ++m_;

  x_.resize(n_);
  xi_.resize(n_);
  xi_odd_.resize(n_);
  const double base = 2.0 * std::numbers::pi / length_;
  const auto half = static_cast<long>(n_ / 2);
  for (std::size_t j = 0; j < n_; ++j) {
    x_[j] = -0.5 * length_ + static_cast<double>(j) * dx_;
    long k = static_cast<long>(j) < half ? static_cast<long>(j)
                                         : static_cast<long>(j) - static_cast<long>(n_);
    xi_[j] = base * static_cast<double>(k);
    xi_odd_[j] = k == -half ? 0.0 : xi_[j];
  }

  std::lock_guard lock(plan_mutex());
  plan_fwd_ = make_plan(n_, FFTW_FORWARD);
  plan_inv_ = make_plan(n_, FFTW_BACKWARD);
  plan_fwd_pad_ = make_plan(m_, FFTW_FORWARD);
  plan_inv_pad_ = make_plan(m_, FFTW_BACKWARD);
}

Grid::~Grid() {
  std::lock_guard lock(plan_mutex());
  for (void* p : {plan_fwd_, plan_inv_, plan_fwd_pad_, plan_inv_pad_})
    if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
}

void Grid::forward(const cplx* in, cplx* out) const { run(plan_fwd_, in, out); }

void Grid::inverse(const cplx* in, cplx* out) const {
  run(plan_inv_, in, out);
  const double s = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] *= s;
}

void Grid::forward_padded(const cplx* in, cplx* out) const { run(plan_fwd_pad_, in, out); }

void Grid::inverse_padded(const cplx* in, cplx* out) const {
  run(plan_inv_pad_, in, out);
  const double s = 1.0 / static_cast<double>(m_);
  for (std::size_t j = 0; j < m_; ++j) out[j] *= s;
}

GridPtr make_grid(std::size_t n_points, double length) {
  return std::make_shared<const Grid>(n_points, length);
}

RealField RealField::zeros(GridPtr g) {
  std::size_t n = g->size();
  return {std::move(g), std::vector<double>(n, 0.0)};
}

ComplexField ComplexField::zeros(GridPtr g) {
  std::size_t n = g->size();
  return {std::move(g), std::vector<cplx>(n, 0.0)};
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_as(b)) throw GridMismatch();
}

namespace {

template <class F, class Op>
F zip(const F& a, const F& b, Op op) {
  require_same_grid(*a.grid, *b.grid);
  F r{a.grid, a.values};
  for (std::size_t j = 0; j < r.values.size(); ++j) r.values[j] = op(a.values[j], b.values[j]);
  return r;
}

}  // namespace

RealField operator+(const RealField& a, const RealField& b) {
  return zip(a, b, [](double p, double q) { return p + q; });
}
RealField operator-(const RealField& a, const RealField& b) {
  return zip(a, b, [](double p, double q) { return p - q; });
}
RealField operator*(double s, const RealField& a) {
  RealField r = a;
  for (auto& v : r.values) v *= s;
  return r;
}
ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, [](cplx p, cplx q) { return p + q; });
}
ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, [](cplx p, cplx q) { return p - q; });
}
ComplexField operator*(cplx s, const ComplexField& a) {
  ComplexField r = a;
  for (auto& v : r.values) v *= s;
  return r;
}

ComplexField to_complex(const RealField& f) {
  ComplexField r = ComplexField::zeros(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) r.values[j] = f.values[j];
  return r;
}

bool all_finite(const RealField& f) {
  for (double v : f.values)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const ComplexField& f) {
  for (const cplx& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

std::vector<cplx> transform(const ComplexField& f) {
  std::vector<cplx> out(f.size());
  f.grid->forward(f.values.data(), out.data());
  return out;
}

ComplexField inverse_transform(GridPtr g, const std::vector<cplx>& spectrum) {
  ComplexField r = ComplexField::zeros(g);
  g->inverse(spectrum.data(), r.values.data());
  return r;
}

ComplexField spectral_derivative(const ComplexField& f, int order) {
  if (order != 1 && order != 2) throw ParameterError("spectral_derivative: order must be 1 or 2");
  const Grid& g = *f.grid;
  std::vector<cplx> hat = transform(f);
  if (order == 1) {
    const auto& xi = g.xi_odd();
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= cplx(0.0, xi[k]);
  } else {
    const auto& xi = g.xi();
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= -xi[k] * xi[k];
  }
  return inverse_transform(f.grid, hat);
}

RealField spectral_derivative(const RealField& f, int order) {
  ComplexField d = spectral_derivative(to_complex(f), order);
  RealField r = RealField::zeros(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) r.values[j] = d.values[j].real();
  return r;
}

double inner_product_l2(const ComplexField& f, const ComplexField& g) {
  require_same_grid(*f.grid, *g.grid);
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    s += f.values[j].real() * g.values[j].real() + f.values[j].imag() * g.values[j].imag();
  return s * f.grid->dx();
}

double inner_product_l2(const RealField& f, const RealField& g) {
  require_same_grid(*f.grid, *g.grid);
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.values[j] * g.values[j];
  return s * f.grid->dx();
}

double periodic_offset(double x, double center, double length) {
  double y = x - center;
  y -= length * std::floor(y / length + 0.5);
  return y;
}

}  // namespace kgz
