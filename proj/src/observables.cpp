#include "kgz/observables.hpp"

#include <algorithm>
#include <cmath>

#include "kgz/errors.hpp"

namespace kgz {

namespace {

double sum_dx(const std::vector<double>& f, double dx) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * dx;
}

// Energy density, optionally weighted.
double energy_weighted(const FieldSet& s, const SystemParams& p, const RealField* weight) {
  ComplexField ux = spectral_derivative(s.u, 1);
  const std::size_t n = s.u.size();
  std::vector<double> dens(n);
  for (std::size_t j = 0; j < n; ++j) {
    double uu = std::norm(s.u[j]);
    double v = s.v[j], m = s.n[j];
    double e = uu + std::norm(s.rho[j]) + std::norm(ux[j]) + p.alpha * uu * v + 0.5 * p.beta * uu * uu +
               0.5 * p.alpha * (v * v + m * m);
    dens[j] = weight ? e * (*weight)[j] : e;
  }
  return sum_dx(dens, s.u.grid->dx());
}

double momentum1_weighted(const FieldSet& s, const SystemParams& p, const RealField* weight) {
  ComplexField ux = spectral_derivative(s.u, 1);
  const std::size_t n = s.u.size();
  std::vector<double> dens(n);
  for (std::size_t j = 0; j < n; ++j) {
    double q = 2.0 * (ux[j] * std::conj(s.rho[j])).real() - p.alpha * s.n[j] * s.v[j];
    dens[j] = weight ? q * (*weight)[j] : q;
  }
  return sum_dx(dens, s.u.grid->dx());
}

double momentum2_weighted(const FieldSet& s, const RealField* weight) {
  const std::size_t n = s.u.size();
  std::vector<double> dens(n);
  for (std::size_t j = 0; j < n; ++j) {
    double q = 2.0 * (std::conj(s.u[j]) * s.rho[j]).imag();
    dens[j] = weight ? q * (*weight)[j] : q;
  }
  return sum_dx(dens, s.u.grid->dx());
}

}  // namespace

double energy(const FieldSet& state, const SystemParams& params) {
  return energy_weighted(state, params, nullptr);
}

double momentum1(const FieldSet& state, const SystemParams& params) {
  return momentum1_weighted(state, params, nullptr);
}

double momentum2(const FieldSet& state) { return momentum2_weighted(state, nullptr); }

ConservedSnapshot conserved(const FieldState& state, const SystemParams& params) {
  return {state.t, energy(state, params), momentum1(state, params), momentum2(state), 0.0};
}

double pairing(const FieldSet& a, const FieldSet& b) {
  return inner_product_l2(a.u, b.u) + inner_product_l2(a.rho, b.rho) + inner_product_l2(a.v, b.v) +
         inner_product_l2(a.n, b.n);
}

double l2_norm(const FieldSet& a) { return std::sqrt(pairing(a, a)); }

double x_norm_sq(const FieldSet& d) {
  ComplexField ux = spectral_derivative(d.u, 1);
  return inner_product_l2(d.u, d.u) + inner_product_l2(ux, ux) + inner_product_l2(d.rho, d.rho) +
         inner_product_l2(d.v, d.v) + inner_product_l2(d.n, d.n);
}

double x_norm(const FieldSet& diff) { return std::sqrt(x_norm_sq(diff)); }

FieldSet gradient_E(const FieldSet& s, const SystemParams& p) {
  FieldSet g = FieldSet::zeros(s.grid());
  ComplexField uxx = spectral_derivative(s.u, 2);
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    cplx u = s.u[j];
    double uu = std::norm(u);
    g.u[j] = -2.0 * uxx[j] + 2.0 * u + 2.0 * p.alpha * u * s.v[j] + 2.0 * p.beta * uu * u;
    g.rho[j] = 2.0 * s.rho[j];
    g.v[j] = p.alpha * (uu + s.v[j]);
    g.n[j] = p.alpha * s.n[j];
  }
  return g;
}

FieldSet gradient_Q1(const FieldSet& s, const SystemParams& p) {
  FieldSet g = FieldSet::zeros(s.grid());
  ComplexField rx = spectral_derivative(s.rho, 1);
  ComplexField ux = spectral_derivative(s.u, 1);
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    g.u[j] = -2.0 * rx[j];
    g.rho[j] = 2.0 * ux[j];
    g.v[j] = -p.alpha * s.n[j];
    g.n[j] = -p.alpha * s.v[j];
  }
  return g;
}

FieldSet gradient_Q2(const FieldSet& s) {
  FieldSet g = FieldSet::zeros(s.grid());
  const cplx i(0.0, 1.0);
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    g.u[j] = -2.0 * i * s.rho[j];
    g.rho[j] = 2.0 * i * s.u[j];
  }
  return g;
}

FieldSet apply_J(const FieldSet& g, const SystemParams& p) {
  if (p.alpha == 0.0) throw ParameterError("apply_J: alpha must be nonzero");
  FieldSet r = FieldSet::zeros(g.grid());
  r.u = cplx(-0.5) * g.rho;
  r.rho = cplx(0.5) * g.u;
  r.v = (1.0 / p.alpha) * spectral_derivative(g.n, 1);
  r.n = (1.0 / p.alpha) * spectral_derivative(g.v, 1);
  return r;
}

CutoffFamily CutoffFamily::from_speeds(std::vector<double> speeds) {
  if (speeds.empty()) throw ParameterError("CutoffFamily: no speeds");
  std::sort(speeds.begin(), speeds.end());
  for (std::size_t j = 1; j < speeds.size(); ++j)
    if (speeds[j] == speeds[j - 1]) throw ParameterError("CutoffFamily: speeds must be distinct");
  CutoffFamily f{speeds, std::vector<double>(speeds.size(), 0.0)};
  for (std::size_t j = 1; j < speeds.size(); ++j) f.m[j] = 0.5 * (speeds[j - 1] + speeds[j]);
  return f;
}

std::size_t CutoffFamily::index_of(double c) const {
  for (std::size_t j = 0; j < speeds.size(); ++j)
    if (speeds[j] == c) return j;
  throw ParameterError("CutoffFamily: speed not in family");
}

double smoothstep(double s) {
  auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  double a = f(s + 1.0), b = f(1.0 - s);
  return a / (a + b);
}

Cutoffs cutoffs(const CutoffFamily& family, const GridPtr& grid, double t) {
  if (!(t > 0.0)) throw ParameterError("cutoffs: t must be positive");
  const std::size_t nn = family.size();
  const double root = std::sqrt(t);
  const auto& x = grid->x();
  Cutoffs out;
  out.psi.reserve(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    RealField psi = RealField::zeros(grid);
    for (std::size_t i = 0; i < x.size(); ++i)
      psi[i] = j == 0 ? 1.0 : smoothstep((x[i] - family.m[j] * t) / root);
    out.psi.push_back(std::move(psi));
  }
  for (std::size_t j = 0; j < nn; ++j)
    out.phi.push_back(j + 1 < nn ? out.psi[j] - out.psi[j + 1] : out.psi[j]);
  return out;
}

std::vector<LocalizedFunctionals> localized_functionals(const FieldSet& state,
                                                        const SystemParams& params,
                                                        const CutoffFamily& family, double t) {
  Cutoffs cut = cutoffs(family, state.grid(), t);
  std::vector<LocalizedFunctionals> out;
  for (const auto& w : cut.phi)
    out.push_back({energy_weighted(state, params, &w), momentum1_weighted(state, params, &w),
                   momentum2_weighted(state, &w)});
  return out;
}

double action_S(const FieldSet& state, const SystemParams& params, const CutoffFamily& family,
                double t, const std::vector<double>& omegas, const std::vector<double>& speeds) {
  if (omegas.size() != family.size() || speeds.size() != family.size())
    throw ParameterError("action_S: parameter lists must match the cutoff family size");
  auto loc = localized_functionals(state, params, family, t);
  double s = 0.0;
  for (std::size_t j = 0; j < loc.size(); ++j)
    s += loc[j].energy - speeds[j] * loc[j].momentum1 - omegas[j] * loc[j].momentum2;
  return s;
}

namespace {

// |R| + |∂x R| for the first component, derivative taken analytically.
std::vector<double> envelope(const SolitonSpec& spec, const SystemParams& params, const GridPtr& grid,
                             double t) {
  SechProfile p = sech_profile(spec, params);
  const double theta = spec.theta();
  const double center = spec.x0 + spec.c * t;
  const auto& x = grid->x();
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double y = periodic_offset(x[i], center, grid->length());
    double phi = p.phi(y);
    e[i] = phi + std::hypot(p.dphi(y), theta * phi);
  }
  return e;
}

}  // namespace

InteractionIntegral interaction_integral(const SolitonSpec& spec_j, const SolitonSpec& spec_k,
                                         const SystemParams& params, const GridPtr& grid, double t,
                                         const CutoffFamily& family) {
  if (spec_j.c == spec_k.c)
    throw ParameterError("interaction_integral: j and k must be distinct solitons");
  if (!(t > 0.0)) throw ParameterError("interaction_integral: t must be positive");
  Cutoffs cut = cutoffs(family, grid, t);
  const RealField& phi_j = cut.phi[family.index_of(spec_j.c)];
  std::vector<double> ek = envelope(spec_k, params, grid, t);
  std::vector<double> ej = envelope(spec_j, params, grid, t);
  InteractionIntegral r;
  for (std::size_t i = 0; i < ek.size(); ++i) {
    r.cutoff_overlap += ek[i] * phi_j[i];
    r.product += ek[i] * ej[i];
  }
  r.cutoff_overlap *= grid->dx();
  r.product *= grid->dx();
  return r;
}

}  // namespace kgz
