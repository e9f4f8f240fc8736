#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kgz/soliton.hpp"

namespace kgz {

enum class Scheme { RK4, Strang, Lawson };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

/// Exact flow of the linear part over a step dt, one 2x2 block per mode.
class LinearPropagator {
 public:
  LinearPropagator(GridPtr grid, double dt);

  double dt() const { return dt_; }
  const GridPtr& grid() const { return grid_; }

  // (u, rho) block: [[uu, ur], [ru, rr]]
  const std::vector<double>& g1_uu() const { return g1_uu_; }
  const std::vector<double>& g1_ur() const { return g1_ur_; }
  const std::vector<double>& g1_ru() const { return g1_ru_; }
  const std::vector<double>& g1_rr() const { return g1_rr_; }
  // (v, n) block: [[cos, i sin], [i sin, cos]]
  const std::vector<double>& g2_cos() const { return g2_cos_; }
  const std::vector<double>& g2_sin() const { return g2_sin_; }

  /// Applies the propagator in place to the four spectra.
  void apply(cplx* u, cplx* rho, cplx* v, cplx* n) const;

 private:
  GridPtr grid_;
  double dt_;
  std::vector<double> g1_uu_, g1_ur_, g1_ru_, g1_rr_, g2_cos_, g2_sin_;
};

/// Time derivative of the full system, products evaluated pointwise.
FieldSet rhs(const FieldState& state, const SystemParams& params);

FieldState apply_linear(const FieldState& state, const LinearPropagator& prop);

struct StepOptions {
  bool dealias = true;
};

FieldState step(const FieldState& state, const SystemParams& params, double dt, Scheme scheme,
                const StepOptions& options = {});

/// Called with (step index, time, state); returning false stops the run.
using Observer = std::function<bool(std::size_t, double, const FieldState&)>;

struct EvolveOptions {
  Scheme scheme = Scheme::Lawson;
  bool dealias = true;
  /// The observer fires at step 0, every `stride` steps, and at the end.
  std::size_t stride = 0;
  Observer observer;
};

struct EvolveResult {
  FieldState state;
  std::size_t steps = 0;
  bool aborted = false;
};

/// Integrates to t_target. The step is adjusted to |t_target - t| / ceil(...)
/// so the final time is hit exactly; dt must point towards t_target.
EvolveResult evolve(const FieldState& state, const SystemParams& params, double t_target, double dt,
                    const EvolveOptions& options = {});

}  // namespace kgz
