#pragma once

#include <vector>

#include "kgz/soliton.hpp"

namespace kgz {

struct ConservedSnapshot {
  double t = 0.0;
  double energy = 0.0;
  double momentum1 = 0.0;
  double momentum2 = 0.0;
  double x_norm_sq = 0.0;
};

double energy(const FieldSet& state, const SystemParams& params);
double momentum1(const FieldSet& state, const SystemParams& params);
double momentum2(const FieldSet& state);
ConservedSnapshot conserved(const FieldState& state, const SystemParams& params);

/// Real pairing Re∫(a.u b.u* + a.rho b.rho*) + ∫(a.v b.v + a.n b.n).
double pairing(const FieldSet& a, const FieldSet& b);
double l2_norm(const FieldSet& a);

/// sqrt(|u|_{H^1}^2 + |rho|^2 + |v|^2 + |n|^2).
double x_norm(const FieldSet& diff);
double x_norm_sq(const FieldSet& diff);

/// Gradients with respect to the real pairing above.
FieldSet gradient_E(const FieldSet& state, const SystemParams& params);
FieldSet gradient_Q1(const FieldSet& state, const SystemParams& params);
FieldSet gradient_Q2(const FieldSet& state);

/// Skew operator J of the Hamiltonian form; requires alpha != 0.
FieldSet apply_J(const FieldSet& cotangent, const SystemParams& params);

/// Smooth partition of unity travelling with the midpoints of sorted speeds.
struct CutoffFamily {
  std::vector<double> speeds;
  std::vector<double> m;  // m[j] = (speeds[j-1] + speeds[j]) / 2, m[0] unused

  static CutoffFamily from_speeds(std::vector<double> speeds);
  std::size_t size() const { return speeds.size(); }
  /// Index of a speed in the sorted family.
  std::size_t index_of(double c) const;
};

/// C-infinity transition, 0 for s <= -1 and 1 for s >= 1.
double smoothstep(double s);

struct Cutoffs {
  std::vector<RealField> psi;
  std::vector<RealField> phi;
};

Cutoffs cutoffs(const CutoffFamily& family, const GridPtr& grid, double t);

struct LocalizedFunctionals {
  double energy = 0.0;
  double momentum1 = 0.0;
  double momentum2 = 0.0;
};

std::vector<LocalizedFunctionals> localized_functionals(const FieldSet& state,
                                                        const SystemParams& params,
                                                        const CutoffFamily& family, double t);

/// Sum over j of E_j - c_j Q1_j - omega_j Q2_j with localized functionals.
double action_S(const FieldSet& state, const SystemParams& params, const CutoffFamily& family,
                double t, const std::vector<double>& omegas, const std::vector<double>& speeds);

struct InteractionIntegral {
  /// ∫(|R_k| + |∂x R_k|) phi_j
  double cutoff_overlap = 0.0;
  /// ∫(|R_k| + |∂x R_k|)(|R_j| + |∂x R_j|)
  double product = 0.0;
};

/// Overlap of soliton k (first component, analytic derivative) with the
/// cutoff region of soliton j at time t.
InteractionIntegral interaction_integral(const SolitonSpec& spec_j, const SolitonSpec& spec_k,
                                         const SystemParams& params, const GridPtr& grid, double t,
                                         const CutoffFamily& family);

}  // namespace kgz
