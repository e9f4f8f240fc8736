#include "kgz/soliton.hpp"

#include <cmath>
#include <sstream>

#include "kgz/errors.hpp"

namespace kgz {

double SolitonSpec::k() const { return std::sqrt(a() - omega * omega) / a(); }

double SolitonSpec::amplitude(const SystemParams& params) const {
  return std::sqrt(2.0 * (a() - omega * omega) / (params.alpha - params.beta * a()));
}

void check_admissible(const SolitonSpec& spec, const SystemParams& params) {
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << "inadmissible soliton (omega=" << spec.omega << ", c=" << spec.c << ", alpha=" << params.alpha
       << ", beta=" << params.beta << "): " << what;
    throw ParameterError(os.str());
  };
  for (double v : {spec.omega, spec.c, spec.x0, spec.gamma0, params.alpha, params.beta})
    if (!std::isfinite(v)) fail("non-finite parameter");
  if (!(std::abs(spec.c) < 1.0)) fail("requires |c| < 1");
  double gap = spec.a() - spec.omega * spec.omega;
  if (!(gap > 0.0)) {
    std::ostringstream os;
    os << "requires 1 - c^2 - omega^2 > 0, got " << gap;
    fail(os.str());
  }
  double coupling = params.alpha - params.beta * spec.a();
  if (!(coupling > 0.0)) {
    std::ostringstream os;
    os << "requires alpha - beta(1 - c^2) > 0, got " << coupling;
    fail(os.str());
  }
}

bool is_admissible(const SolitonSpec& spec, const SystemParams& params) {
  try {
    check_admissible(spec, params);
    return true;
  } catch (const ParameterError&) {
    return false;
  }
}

FieldSet FieldSet::zeros(const GridPtr& g) {
  return {ComplexField::zeros(g), ComplexField::zeros(g), RealField::zeros(g), RealField::zeros(g)};
}

FieldSet operator+(const FieldSet& a, const FieldSet& b) {
  return {a.u + b.u, a.rho + b.rho, a.v + b.v, a.n + b.n};
}

FieldSet operator-(const FieldSet& a, const FieldSet& b) {
  return {a.u - b.u, a.rho - b.rho, a.v - b.v, a.n - b.n};
}

FieldSet operator*(double s, const FieldSet& a) {
  return {cplx(s) * a.u, cplx(s) * a.rho, s * a.v, s * a.n};
}

bool all_finite(const FieldSet& f) {
  return all_finite(f.u) && all_finite(f.rho) && all_finite(f.v) && all_finite(f.n);
}

double SechProfile::phi(double y) const { return amplitude / std::cosh(k * y); }

double SechProfile::dphi(double y) const { return -k * std::tanh(k * y) * phi(y); }

double SechProfile::ddphi(double y) const {
  double th = std::tanh(k * y);
  return k * k * (th * th - (1.0 - th * th)) * phi(y);
}

SechProfile sech_profile(const SolitonSpec& spec, const SystemParams& params) {
  check_admissible(spec, params);
  return {spec.amplitude(params), spec.k()};
}

RealField phi_profile(const SolitonSpec& spec, const SystemParams& params, const GridPtr& grid) {
  SechProfile p = sech_profile(spec, params);
  RealField f = RealField::zeros(grid);
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j)
    f.values[j] = p.phi(periodic_offset(x[j], spec.x0, grid->length()));
  return f;
}

SecondaryProfiles secondary_profiles(const SolitonSpec& spec, const SystemParams& params,
                                     const GridPtr& grid) {
  SechProfile p = sech_profile(spec, params);
  SecondaryProfiles out{RealField::zeros(grid), RealField::zeros(grid), ComplexField::zeros(grid)};
  const double a = spec.a();
  const double s = spec.s();
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j) {
    double y = periodic_offset(x[j], spec.x0, grid->length());
    double phi = p.phi(y);
    out.psi.values[j] = -phi * phi / a;
    out.varphi.values[j] = spec.c * phi * phi / a;
    out.rho_profile.values[j] = cplx(spec.c * p.dphi(y), s * phi);
  }
  return out;
}

FieldState soliton_state(const SolitonSpec& spec, const SystemParams& params, const GridPtr& grid,
                         double t) {
  if (!std::isfinite(t)) throw ParameterError("soliton_state: non-finite time");
  SechProfile p = sech_profile(spec, params);
  FieldState st{FieldSet::zeros(grid), t};
  const double a = spec.a();
  const double s = spec.s();
  const double theta = spec.theta();
  const double center = spec.x0 + spec.c * t;
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j) {
    double y = periodic_offset(x[j], center, grid->length());
    double phi = p.phi(y);
    cplx e = std::polar(1.0, theta * y - spec.omega * t + spec.gamma0);
    st.u.values[j] = e * phi;
    st.rho.values[j] = e * cplx(spec.c * p.dphi(y), s * phi);
    st.v.values[j] = -phi * phi / a;
    st.n.values[j] = spec.c * phi * phi / a;
  }
  return st;
}

SolitonSpec advanced(const SolitonSpec& spec, double t) {
  return {spec.omega, spec.c, spec.x0 + spec.c * t, spec.gamma0 - spec.omega * t};
}

FieldState multisoliton_state(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                              const GridPtr& grid, double t) {
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j)
      if (specs[i].c == specs[j].c)
        throw ParameterError("multisoliton_state: solitons " + std::to_string(i) + " and " +
                             std::to_string(j) + " share the same speed");
  FieldState st{FieldSet::zeros(grid), t};
  for (const auto& spec : specs) {
    FieldState r = soliton_state(spec, params, grid, t);
    st.u = st.u + r.u;
    st.rho = st.rho + r.rho;
    st.v = st.v + r.v;
    st.n = st.n + r.n;
  }
  return st;
}

double stationary_residual(const SolitonSpec& spec, const SystemParams& params,
                           const GridPtr& grid) {
  RealField phi = phi_profile(spec, params, grid);
  RealField d2 = spectral_derivative(phi, 2);
  const double a = spec.a();
  const double big_i = spec.big_i();
  const double m = (params.alpha - params.beta * a) / (a * a);
  double worst = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    double f = phi.values[j];
    worst = std::max(worst, std::abs(d2.values[j] - big_i * f + m * f * f * f));
  }
  return worst;
}

}  // namespace kgz
