#include "kgz/evolution.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "kgz/errors.hpp"

namespace kgz {

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4" || name == "RK4") return Scheme::RK4;
  if (name == "strang" || name == "Strang") return Scheme::Strang;
  if (name == "lawson" || name == "Lawson") return Scheme::Lawson;
  throw ParameterError("unknown scheme '" + name + "' (expected rk4, strang or lawson)");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::RK4: return "rk4";
    case Scheme::Strang: return "strang";
    case Scheme::Lawson: return "lawson";
  }
  return "?";
}

LinearPropagator::LinearPropagator(GridPtr grid, double dt) : grid_(std::move(grid)), dt_(dt) {
  if (!std::isfinite(dt)) throw ParameterError("LinearPropagator: non-finite dt");
  const auto& xi = grid_->xi();
  const auto& xo = grid_->xi_odd();
  const std::size_t n = xi.size();
  g1_uu_.resize(n);
  g1_ur_.resize(n);
  g1_ru_.resize(n);
  g1_rr_.resize(n);
  g2_cos_.resize(n);
  g2_sin_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double w = std::sqrt(1.0 + xi[k] * xi[k]);
    double c = std::cos(w * dt), s = std::sin(w * dt);
    g1_uu_[k] = c;
    g1_ur_[k] = -s / w;
    g1_ru_[k] = w * s;
    g1_rr_[k] = c;
    g2_cos_[k] = std::cos(xo[k] * dt);
    g2_sin_[k] = std::sin(xo[k] * dt);
    if (!std::isfinite(g1_ur_[k]) || !std::isfinite(g1_ru_[k]))
      throw NumericalError("LinearPropagator: singular multiplier");
  }
}

void LinearPropagator::apply(cplx* u, cplx* rho, cplx* v, cplx* n) const {
  const std::size_t len = g1_uu_.size();
  for (std::size_t k = 0; k < len; ++k) {
    cplx a = u[k], b = rho[k];
    u[k] = g1_uu_[k] * a + g1_ur_[k] * b;
    rho[k] = g1_ru_[k] * a + g1_rr_[k] * b;
    cplx p = v[k], q = n[k];
    cplx is(0.0, g2_sin_[k]);
    v[k] = g2_cos_[k] * p + is * q;
    n[k] = is * p + g2_cos_[k] * q;
  }
}

namespace {

struct Spectra {
  std::vector<cplx> u, rho, v, n;

  explicit Spectra(std::size_t len = 0) : u(len), rho(len), v(len), n(len) {}
  void apply(const LinearPropagator& p) { p.apply(u.data(), rho.data(), v.data(), n.data()); }
};

// y = a + h * b
void axpy(Spectra& y, const Spectra& a, double h, const Spectra& b) {
  for (std::size_t k = 0; k < a.u.size(); ++k) {
    y.u[k] = a.u[k] + h * b.u[k];
    y.rho[k] = a.rho[k] + h * b.rho[k];
    y.v[k] = a.v[k] + h * b.v[k];
    y.n[k] = a.n[k] + h * b.n[k];
  }
}

// y += h * b
void add_scaled(Spectra& y, double h, const Spectra& b) { axpy(y, y, h, b); }

class Engine {
 public:
  Engine(GridPtr grid, SystemParams params, bool dealias)
      : g_(std::move(grid)), p_(params), dealias_(dealias) {
    const std::size_t n = g_->size();
    const std::size_t m = dealias_ ? g_->padded_size() : n;
    pu_.resize(m);
    pv_.resize(m);
    pf_.resize(m);
    pw_.resize(m);
    hu_.resize(m);
    hv_.resize(m);
    for (auto* s : {&k1_, &k2_, &k3_, &k4_, &tmp_, &base_}) *s = Spectra(n);
  }

  Spectra to_spectra(const FieldSet& f) const {
    require_same_grid(*g_, *f.grid());
    Spectra y(g_->size());
    g_->forward(f.u.values.data(), y.u.data());
    g_->forward(f.rho.values.data(), y.rho.data());
    ComplexField v = to_complex(f.v), n = to_complex(f.n);
    g_->forward(v.values.data(), y.v.data());
    g_->forward(n.values.data(), y.n.data());
    return y;
  }

  FieldSet to_fields(const Spectra& y) const {
    FieldSet f = FieldSet::zeros(g_);
    g_->inverse(y.u.data(), f.u.values.data());
    g_->inverse(y.rho.data(), f.rho.values.data());
    std::vector<cplx> tmp(g_->size());
    g_->inverse(y.v.data(), tmp.data());
    for (std::size_t j = 0; j < tmp.size(); ++j) f.v.values[j] = tmp[j].real();
    g_->inverse(y.n.data(), tmp.data());
    for (std::size_t j = 0; j < tmp.size(); ++j) f.n.values[j] = tmp[j].real();
    return f;
  }

  // Nonlinear vector field (0, alpha u v + beta |u|^2 u, 0, (|u|^2)_x).
  void nonlinear(const Spectra& y, Spectra& out) {
    const std::size_t n = g_->size();
    if (dealias_) {
      pad(y.u, hu_);
      pad(y.v, hv_);
      g_->inverse_padded(hu_.data(), pu_.data());
      g_->inverse_padded(hv_.data(), pv_.data());
    } else {
      g_->inverse(y.u.data(), pu_.data());
      g_->inverse(y.v.data(), pv_.data());
    }
    const double al = p_.alpha, be = p_.beta;
    for (std::size_t j = 0; j < pu_.size(); ++j) {
      cplx u = pu_[j];
      double v = pv_[j].real();
      double w = std::norm(u);
      pf_[j] = (al * v + be * w) * u;
      pw_[j] = w;
    }
    std::fill(out.u.begin(), out.u.end(), cplx(0.0));
    std::fill(out.v.begin(), out.v.end(), cplx(0.0));
    if (dealias_) {
      g_->forward_padded(pf_.data(), hu_.data());
      g_->forward_padded(pw_.data(), hv_.data());
      truncate(hu_, out.rho);
      truncate(hv_, out.n);
    } else {
      g_->forward(pf_.data(), out.rho.data());
      g_->forward(pw_.data(), out.n.data());
    }
    const auto& xo = g_->xi_odd();
    for (std::size_t k = 0; k < n; ++k) out.n[k] *= cplx(0.0, xo[k]);
  }

  void linear(const Spectra& y, Spectra& out) const {
    const auto& xi = g_->xi();
    const auto& xo = g_->xi_odd();
    for (std::size_t k = 0; k < xi.size(); ++k) {
      out.u[k] = -y.rho[k];
      out.rho[k] = (1.0 + xi[k] * xi[k]) * y.u[k];
      out.v[k] = cplx(0.0, xo[k]) * y.n[k];
      out.n[k] = cplx(0.0, xo[k]) * y.v[k];
    }
  }

  void full(const Spectra& y, Spectra& out) {
    nonlinear(y, out);
    linear(y, tmp_);
    add_scaled(out, 1.0, tmp_);
  }

  void prepare(double h) {
    if (half_ && half_->dt() == 0.5 * h) return;
    half_.emplace(g_, 0.5 * h);
    whole_.emplace(g_, h);
  }

  void advance(Spectra& y, double h, Scheme scheme) {
    switch (scheme) {
      case Scheme::RK4: rk4(y, h); break;
      case Scheme::Strang: strang(y, h); break;
      case Scheme::Lawson: lawson(y, h); break;
    }
  }

 private:
  void rk4(Spectra& y, double h) {
    full(y, k1_);
    axpy(tmp2(), y, 0.5 * h, k1_);
    full(base_, k2_);
    axpy(tmp2(), y, 0.5 * h, k2_);
    full(base_, k3_);
    axpy(tmp2(), y, h, k3_);
    full(base_, k4_);
    add_scaled(y, h / 6.0, k1_);
    add_scaled(y, h / 3.0, k2_);
    add_scaled(y, h / 3.0, k3_);
    add_scaled(y, h / 6.0, k4_);
  }

  void strang(Spectra& y, double h) {
    prepare(h);
    y.apply(*half_);
    nonlinear(y, k1_);
    add_scaled(y, h, k1_);
    y.apply(*half_);
  }

  // Integrating-factor RK4.
  void lawson(Spectra& y, double h) {
    prepare(h);
    nonlinear(y, k1_);
    axpy(base_, y, 0.5 * h, k1_);
    base_.apply(*half_);
    nonlinear(base_, k2_);

    Spectra& yh = k4_;  // E(h/2) y, k4 is unused until the last stage
    yh = y;
    yh.apply(*half_);
    axpy(base_, yh, 0.5 * h, k2_);
    nonlinear(base_, k3_);

    axpy(base_, yh, h, k3_);
    base_.apply(*half_);
    // y_new = E(h) y + h/6 [E(h) k1 + 2 E(h/2)(k2 + k3) + k4]
    Spectra& acc = yh;
    axpy(acc, k2_, 1.0, k3_);
    acc.apply(*half_);
    y.apply(*whole_);
    k1_.apply(*whole_);
    add_scaled(y, h / 6.0, k1_);
    add_scaled(y, h / 3.0, acc);
    nonlinear(base_, k2_);
    add_scaled(y, h / 6.0, k2_);
  }

  Spectra& tmp2() { return base_; }

  void pad(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const std::size_t n = in.size(), m = out.size();
    const double s = static_cast<double>(m) / static_cast<double>(n);
    std::fill(out.begin(), out.end(), cplx(0.0));
    for (std::size_t k = 0; k < n / 2; ++k) out[k] = s * in[k];
    for (std::size_t k = n / 2 + 1; k < n; ++k) out[m - n + k] = s * in[k];
  }

  void truncate(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const std::size_t n = out.size(), m = in.size();
    const double s = static_cast<double>(n) / static_cast<double>(m);
    for (std::size_t k = 0; k < n / 2; ++k) out[k] = s * in[k];
    out[n / 2] = 0.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) out[k] = s * in[m - n + k];
  }

  GridPtr g_;
  SystemParams p_;
  bool dealias_;
  std::vector<cplx> pu_, pv_, pf_, pw_, hu_, hv_;
  Spectra k1_, k2_, k3_, k4_, tmp_, base_;
  std::optional<LinearPropagator> half_, whole_;
};

bool finite(const Spectra& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < y.u.size(); ++k)
    s += std::norm(y.u[k]) + std::norm(y.rho[k]) + std::norm(y.v[k]) + std::norm(y.n[k]);
  return std::isfinite(s);
}

FieldState with_time(FieldSet f, double t) { return FieldState{std::move(f), t}; }

}  // namespace

FieldSet rhs(const FieldState& state, const SystemParams& params) {
  Engine e(state.grid(), params, false);
  Spectra y = e.to_spectra(state);
  Spectra d(y.u.size());
  e.full(y, d);
  return e.to_fields(d);
}

FieldState apply_linear(const FieldState& state, const LinearPropagator& prop) {
  require_same_grid(*state.grid(), *prop.grid());
  Engine e(state.grid(), SystemParams{}, false);
  Spectra y = e.to_spectra(state);
  y.apply(prop);
  return with_time(e.to_fields(y), state.t + prop.dt());
}

FieldState step(const FieldState& state, const SystemParams& params, double dt, Scheme scheme,
                const StepOptions& options) {
  if (!(std::abs(dt) > 0.0) || !std::isfinite(dt)) throw ParameterError("step: dt must be nonzero");
  Engine e(state.grid(), params, options.dealias);
  Spectra y = e.to_spectra(state);
  e.advance(y, dt, scheme);
  if (!finite(y)) {
    std::ostringstream os;
    os << "integration blow-up: non-finite state after step from t=" << state.t;
    throw BlowupError(state.t, os.str());
  }
  return with_time(e.to_fields(y), state.t + dt);
}

EvolveResult evolve(const FieldState& state, const SystemParams& params, double t_target, double dt,
                    const EvolveOptions& options) {
  const double t0 = state.t;
  const double span = t_target - t0;
  EvolveResult result{state, 0, false};
  if (!std::isfinite(t_target)) throw ParameterError("evolve: non-finite target time");
  if (span == 0.0) {
    if (options.observer) result.aborted = !options.observer(0, t0, state);
    return result;
  }
  if (!(std::abs(dt) > 0.0) || !std::isfinite(dt))
    throw ParameterError("evolve: dt must be nonzero and finite");
  if ((span > 0.0) != (dt > 0.0))
    throw ParameterError("evolve: dt sign does not point towards t_target");

  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(span / dt) - 1e-9));
  const double h = span / static_cast<double>(steps);

  Engine e(state.grid(), params, options.dealias);
  Spectra y = e.to_spectra(state);
  auto emit = [&](std::size_t i, double t) {
    return options.observer(i, t, with_time(e.to_fields(y), t));
  };
  if (options.observer && !emit(0, t0)) {
    result.aborted = true;
    return result;
  }
  double t = t0;
  for (std::size_t i = 1; i <= steps; ++i) {
    e.advance(y, h, options.scheme);
    double t_new = i == steps ? t_target : t0 + static_cast<double>(i) * h;
    if (!finite(y)) {
      std::ostringstream os;
      os << "integration blow-up: non-finite state after t=" << t;
      throw BlowupError(t, os.str());
    }
    t = t_new;
    result.steps = i;
    bool at_stride = options.stride > 0 && i % options.stride == 0;
    if (options.observer && (at_stride || i == steps) && !emit(i, t)) {
      result.aborted = true;
      break;
    }
  }
  result.state = with_time(e.to_fields(y), t);
  return result;
}

}  // namespace kgz
