#pragma once

#include <vector>

#include "kgz/grid.hpp"

namespace kgz {

struct SystemParams {
  double alpha = 1.0;
  double beta = 0.0;
};

/// One soliton: frequency omega, speed c, center x0 and phase gamma0.
struct SolitonSpec {
  double omega = 0.0;
  double c = 0.0;
  double x0 = 0.0;
  double gamma0 = 0.0;

  double a() const { return 1.0 - c * c; }
  double theta() const { return omega * c / a(); }
  double s() const { return omega / a(); }
  double big_i() const { return (a() - omega * omega) / (a() * a()); }
  double k() const;
  double amplitude(const SystemParams& params) const;
};

/// Throws ParameterError naming the first violated admissibility inequality.
void check_admissible(const SolitonSpec& spec, const SystemParams& params);
bool is_admissible(const SolitonSpec& spec, const SystemParams& params);

/// Four fields (u, rho, v, n). Also used for perturbations and cotangents.
struct FieldSet {
  ComplexField u;
  ComplexField rho;
  RealField v;
  RealField n;

  static FieldSet zeros(const GridPtr& g);
  const GridPtr& grid() const { return u.grid; }
};

struct FieldState : FieldSet {
  double t = 0.0;
};

using Perturbation = FieldSet;

FieldSet operator+(const FieldSet& a, const FieldSet& b);
FieldSet operator-(const FieldSet& a, const FieldSet& b);
FieldSet operator*(double s, const FieldSet& a);
bool all_finite(const FieldSet& f);

/// Closed-form sech profile and its derivative at displacement y.
struct SechProfile {
  double amplitude;
  double k;
  double phi(double y) const;
  double dphi(double y) const;
  double ddphi(double y) const;
};

SechProfile sech_profile(const SolitonSpec& spec, const SystemParams& params);

RealField phi_profile(const SolitonSpec& spec, const SystemParams& params, const GridPtr& grid);

struct SecondaryProfiles {
  RealField psi;
  RealField varphi;
  ComplexField rho_profile;
};

SecondaryProfiles secondary_profiles(const SolitonSpec& spec, const SystemParams& params,
                                     const GridPtr& grid);

/// Traveling soliton with phase theta*(x - c t - x0) - omega t + gamma0.
FieldState soliton_state(const SolitonSpec& spec, const SystemParams& params, const GridPtr& grid,
                         double t);

/// Spec whose t = 0 state equals soliton_state(spec, t).
SolitonSpec advanced(const SolitonSpec& spec, double t);

FieldState multisoliton_state(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                              const GridPtr& grid, double t);

/// Max-norm of phi'' - I phi + M phi^3 with a spectral second derivative.
double stationary_residual(const SolitonSpec& spec, const SystemParams& params,
                           const GridPtr& grid);

}  // namespace kgz
