#pragma once

#include <cstddef>
#include <vector>

#include "kgz/soliton.hpp"

namespace kgz {

/// Modulated parameters of one soliton. The template first component is
/// e^{i(theta y + gamma)} phi_omega(y - x) with theta kept at the reference
/// soliton's value, so an exact soliton has x = x0 + c t and
/// gamma = gamma0 - omega t - theta x.
struct ModParams {
  double omega = 0.0;
  double x = 0.0;
  double gamma = 0.0;
};

struct ModulationFit {
  std::vector<ModParams> params;
  double residual_norm = 0.0;
  int iterations = 0;
  FieldSet epsilon;
  double eps_xnorm = 0.0;
  double jacobian_cond = 0.0;
  bool ill_conditioned = false;  // cond > 1e8
};

/// Parameters of an exact soliton sum at time t in the template convention.
std::vector<ModParams> modulation_truth(const std::vector<SolitonSpec>& specs, double t);

/// Sum of modulated templates (all four components).
FieldSet modulated_template(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                            const GridPtr& grid, const std::vector<ModParams>& candidate);

/// For each soliton: <eps, i R_j>, <eps, ∂x R_j>, <eps, Psi_j> on the first
/// component, eps = u - sum of templates.
std::vector<double> orthogonality_residuals(const FieldSet& state, const SystemParams& params,
                                            const std::vector<SolitonSpec>& specs,
                                            const std::vector<ModParams>& candidate);

/// Central-difference Jacobian of the residuals, row-major 3N x 3N.
std::vector<double> modulation_jacobian(const FieldSet& state, const SystemParams& params,
                                        const std::vector<SolitonSpec>& specs,
                                        const std::vector<ModParams>& candidate, double h = 1e-6);

ModulationFit fit_modulation(const FieldSet& state, const SystemParams& params,
                             const std::vector<SolitonSpec>& specs,
                             const std::vector<ModParams>& initial_guess, double tol = 1e-10,
                             int max_iter = 50);

struct ModulationSample {
  double t = 0.0;
  std::vector<ModParams> params;
  double residual_norm = 0.0;
  double eps_xnorm = 0.0;
  int iterations = 0;
};

struct ModulationRate {
  double t = 0.0;
  std::size_t j = 0;
  double omega_rate = 0.0;  // |d omega / dt|
  double x_rate = 0.0;      // |dx/dt - c|
  double gamma_rate = 0.0;  // |d gamma / dt + s|
  double eps_xnorm = 0.0;
};

/// Observer that fits every delivered state, warm-started from the last fit.
class ModulationTracker {
 public:
  ModulationTracker(std::vector<SolitonSpec> specs, SystemParams params,
                    std::vector<ModParams> initial_guess, double tol = 1e-10, int max_iter = 50);

  bool operator()(std::size_t step, double t, const FieldState& state);

  const std::vector<ModulationSample>& samples() const { return samples_; }
  /// Centered differences at interior samples.
  std::vector<ModulationRate> rates() const;

 private:
  std::vector<SolitonSpec> specs_;
  SystemParams params_;
  std::vector<ModParams> guess_;
  double tol_;
  int max_iter_;
  std::vector<ModulationSample> samples_;
};

/// Smallest C with rate <= C (eps_xnorm + e^{-decay t}) for every entry,
/// using the omega rate.
double rate_constant(const std::vector<ModulationRate>& rates, double decay);

}  // namespace kgz
