#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "kgz/observables.hpp"
#include "kgz/soliton.hpp"

namespace kgz {

/// L = -a d^2/dx^2 + b - d sech^2(k (x - x0)) on a periodic grid.
struct SchroedingerOperator {
  double a = 1.0;
  double b = 0.0;
  double d = 0.0;
  double k = 1.0;
  double x0 = 0.0;
  GridPtr grid;

  RealField potential() const;
  RealField apply(const RealField& f) const;
  /// Column-major dense matrix consistent with apply().
  std::vector<double> dense() const;
};

SchroedingerOperator assemble_L1(const SolitonSpec& spec, const SystemParams& params,
                                 const GridPtr& grid);
SchroedingerOperator assemble_L2(const SolitonSpec& spec, const SystemParams& params,
                                 const GridPtr& grid);

struct Eigenpair {
  double value = 0.0;
  RealField vector;  // L2-normalized
  double residual = 0.0;
};

enum class EigenMethod { Auto, Dense, Iterative };

/// Lowest `count` eigenpairs in ascending order. Auto uses a dense solve up
/// to 4096 points and preconditioned LOBPCG above.
std::vector<Eigenpair> eigs_lowest(const SchroedingerOperator& op, int count,
                                   EigenMethod method = EigenMethod::Auto);

/// |<f,g>| / (|f| |g|) for real fields.
double correlation(const RealField& f, const RealField& g);

/// Hessian of E - c Q1 - omega Q2 at the soliton (t = 0) applied to eta.
Perturbation apply_H(const SolitonSpec& spec, const SystemParams& params, const Perturbation& eta);

/// <H eta, eta> by direct pairing.
double quadratic_form_H(const SolitonSpec& spec, const SystemParams& params,
                        const Perturbation& eta);

/// <H eta, eta> through the L1/L2 forms plus completed squares.
double quadratic_form_H_decomposed(const SolitonSpec& spec, const SystemParams& params,
                                   const Perturbation& eta);

/// The soliton phase at t = 0, theta (x - x0) + gamma0 on the periodic grid.
RealField soliton_phase(const SolitonSpec& spec, const GridPtr& grid);

/// Ground state sech^2(k (x - x0)) of L1, unnormalized.
RealField ground_state_psi(const SolitonSpec& spec, const GridPtr& grid);

/// Negative direction built from the L1 ground state.
Perturbation negative_direction(const SolitonSpec& spec, const SystemParams& params,
                                const GridPtr& grid);

/// The three first-component constraint directions e^{i lambda} phi',
/// i e^{i lambda} phi, e^{i lambda} Psi of the soliton at t = 0.
std::vector<ComplexField> constraint_directions(const SolitonSpec& spec, const SystemParams& params,
                                                const GridPtr& grid);

/// Removes from eta.u its real-L2 projection onto span(directions).
void project_out(Perturbation& eta, const std::vector<ComplexField>& directions);

/// Smooth, localized random perturbation built from Gaussian wave packets
/// near the given centers. Sampled from continuous functions, so the same
/// seed gives the same perturbation on any resolving grid.
Perturbation random_perturbation(const GridPtr& grid, const std::vector<double>& centers,
                                 std::mt19937_64& rng);

/// Terms of the localized quadratic form around a sum of profiles. The
/// cubic and quartic pieces are kept separate from the quadratic part.
struct HLocTerms {
  std::array<double, 13> terms{};
  double quadratic = 0.0;  // all terms except the quartic one
  double total = 0.0;
};

HLocTerms h_loc(const Perturbation& eps, const std::vector<FieldSet>& profiles,
                const std::vector<double>& speeds, const std::vector<double>& omegas,
                const SystemParams& params, const CutoffFamily& family, double t);

struct CoercivityReport {
  std::vector<double> delta;        // per soliton: min <H_j eta, eta> / |eta|_X^2
  std::vector<double> delta_l2;     // per soliton: min <L2 z, z> / |z|^2 with z ⟂ phi
  double localized_k = 0.0;         // min H_loc quadratic / |eps|_X^2
  std::size_t samples = 0;
};

/// Rayleigh quotients over projected random perturbations. Solitons are
/// placed at time t for the localized form.
CoercivityReport coercivity_report(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                                   const GridPtr& grid, std::size_t samples, double t = 1.0,
                                   std::uint64_t seed = 1);

}  // namespace kgz
