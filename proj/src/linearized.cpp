#include "kgz/linearized.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kgz/errors.hpp"

namespace kgz {

namespace {

double sech2(double z) {
  double s = 1.0 / std::cosh(z);
  return s * s;
}

SchroedingerOperator assemble(const SolitonSpec& spec, const SystemParams& params, const GridPtr& grid,
                              double depth_factor) {
  check_admissible(spec, params);
  const double a = spec.a();
  const double big_a = (a - spec.omega * spec.omega) / a;
  return {a, big_a, depth_factor * big_a, spec.k(), spec.x0, grid};
}

}  // namespace

RealField SchroedingerOperator::potential() const {
  RealField p = RealField::zeros(grid);
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j)
    p[j] = b - d * sech2(k * periodic_offset(x[j], x0, grid->length()));
  return p;
}

RealField SchroedingerOperator::apply(const RealField& f) const {
  require_same_grid(*grid, *f.grid);
  RealField d2 = spectral_derivative(f, 2);
  RealField pot = potential();
  RealField r = RealField::zeros(grid);
  for (std::size_t j = 0; j < f.size(); ++j) r[j] = -a * d2[j] + pot[j] * f[j];
  return r;
}

std::vector<double> SchroedingerOperator::dense() const {
  const std::size_t n = grid->size();
  std::vector<cplx> sym(n);
  const auto& xi = grid->xi();
  for (std::size_t k2 = 0; k2 < n; ++k2) sym[k2] = -xi[k2] * xi[k2];
  std::vector<cplx> col(n);
  grid->inverse(sym.data(), col.data());
  RealField pot = potential();
  std::vector<double> m(n * n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t off = (j + n - l) % n;
      m[j + l * n] = -a * col[off].real() + (j == l ? pot[j] : 0.0);
    }
  return m;
}

SchroedingerOperator assemble_L1(const SolitonSpec& spec, const SystemParams& params,
                                 const GridPtr& grid) {
  return assemble(spec, params, grid, 6.0);
}

SchroedingerOperator assemble_L2(const SolitonSpec& spec, const SystemParams& params,
                                 const GridPtr& grid) {
  return assemble(spec, params, grid, 2.0);
}

double correlation(const RealField& f, const RealField& g) {
  double fg = inner_product_l2(f, g);
  return std::abs(fg) / std::sqrt(inner_product_l2(f, f) * inner_product_l2(g, g));
}

namespace {

void finish_pair(const SchroedingerOperator& op, Eigenpair& p) {
  double norm = std::sqrt(inner_product_l2(p.vector, p.vector));
  // Sign convention: the entry of largest magnitude is positive.
  std::size_t imax = 0;
  for (std::size_t j = 0; j < p.vector.size(); ++j)
    if (std::abs(p.vector[j]) > std::abs(p.vector[imax])) imax = j;
  double scale = (p.vector[imax] < 0 ? -1.0 : 1.0) / norm;
  for (auto& v : p.vector.values) v *= scale;
  RealField r = op.apply(p.vector) - p.value * p.vector;
  p.residual = std::sqrt(inner_product_l2(r, r));
}

// Lowest `count` eigenpairs of a column-major symmetric matrix, ascending.
void lowest_symmetric(std::vector<double>& m, lapack_int n, int count, std::vector<double>& w,
                      std::vector<double>& z) {
  w.assign(n, 0.0);
  z.assign(static_cast<std::size_t>(n) * count, 0.0);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, m.data(), n, 0.0, 0.0, 1, count,
                                   0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count)
    throw ConvergenceError("dense eigensolve failed (dsyevr info=" + std::to_string(info) + ")", {});
}

// Index of the grid node at the well center, or -1 when x0 is off the grid.
long center_node(const SchroedingerOperator& op) {
  const Grid& g = *op.grid;
  double pos = (op.x0 + 0.5 * g.length()) / g.dx();
  long j0 = std::lround(pos);
  if (std::abs(pos - static_cast<double>(j0)) > 1e-9) return -1;
  long n = static_cast<long>(g.size());
  return ((j0 % n) + n) % n;
}

// Even/odd reduction about the well center: both the circulant and the
// potential commute with the reflection y -> -y, so each parity block is
// solved separately at a quarter of the cost.
std::vector<Eigenpair> eigs_dense_parity(const SchroedingerOperator& op, int count, long j0,
                                         const std::vector<double>& full) {
  const long n = static_cast<long>(op.grid->size());
  const long h = n / 2;
  auto node = [&](long m) { return static_cast<std::size_t>(((j0 + m) % n + n) % n); };
  const double r = std::sqrt(0.5);
  struct Basis {
    std::vector<std::array<std::pair<std::size_t, double>, 2>> vecs;
  };
  Basis even, odd;
  even.vecs.push_back({{{node(0), 1.0}, {node(0), 0.0}}});
  for (long p = 1; p < h; ++p) {
    even.vecs.push_back({{{node(p), r}, {node(-p), r}}});
    odd.vecs.push_back({{{node(p), r}, {node(-p), -r}}});
  }
  even.vecs.push_back({{{node(h), 1.0}, {node(h), 0.0}}});

  std::vector<Eigenpair> cand;
  for (const Basis* b : {&even, &odd}) {
    const auto dim = static_cast<lapack_int>(b->vecs.size());
    const int want = std::min<int>(count, dim);
    if (want < 1) continue;
    std::vector<double> red(static_cast<std::size_t>(dim) * dim);
    for (lapack_int q = 0; q < dim; ++q)
      for (lapack_int p = q; p < dim; ++p) {
        double s = 0.0;
        for (const auto& [i, ci] : b->vecs[p])
          for (const auto& [k, ck] : b->vecs[q]) s += ci * ck * full[i + k * n];
        red[p + static_cast<std::size_t>(q) * dim] = s;
      }
    std::vector<double> w, z;
    lowest_symmetric(red, dim, want, w, z);
    for (int e = 0; e < want; ++e) {
      Eigenpair pair{w[e], RealField::zeros(op.grid), 0.0};
      for (lapack_int p = 0; p < dim; ++p)
        for (const auto& [i, ci] : b->vecs[p])
          pair.vector[i] += ci * z[p + static_cast<std::size_t>(e) * dim];
      cand.push_back(std::move(pair));
    }
  }
  std::sort(cand.begin(), cand.end(), [](const Eigenpair& x, const Eigenpair& y) { return x.value < y.value; });
  cand.resize(count);
  return cand;
}

std::vector<Eigenpair> eigs_dense(const SchroedingerOperator& op, int count) {
  const auto n = static_cast<lapack_int>(op.grid->size());
  std::vector<double> m = op.dense();
  std::vector<Eigenpair> out;
  long j0 = center_node(op);
  if (j0 >= 0) {
    out = eigs_dense_parity(op, count, j0, m);
  } else {
    std::vector<double> w, z;
    lowest_symmetric(m, n, count, w, z);
    for (int i = 0; i < count; ++i) {
      Eigenpair p{w[i], RealField::zeros(op.grid), 0.0};
      std::copy_n(z.begin() + static_cast<std::ptrdiff_t>(i) * n, n, p.vector.values.begin());
      out.push_back(std::move(p));
    }
  }
  for (auto& p : out) finish_pair(op, p);
  return out;
}

// Small dense symmetric eigenproblem, ascending; vectors overwrite `a`.
std::vector<double> small_eig(std::vector<double>& a, int n) {
  std::vector<double> w(n);
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  if (info != 0) throw ConvergenceError("Rayleigh-Ritz eigensolve failed", {});
  return w;
}

struct Block {
  std::size_t n = 0;
  std::vector<std::vector<double>> cols;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Locally optimal block preconditioned conjugate gradient.
std::vector<Eigenpair> eigs_lobpcg(const SchroedingerOperator& op, int count) {
  const std::size_t n = op.grid->size();
  const int m = count + 3;
  auto apply = [&](const std::vector<double>& v) {
    RealField f{op.grid, v};
    return op.apply(f).values;
  };
  const auto& xi = op.grid->xi();
  const double shift = std::abs(op.b) + op.d + 1.0;
  auto precondition = [&](const std::vector<double>& r) {
    std::vector<cplx> c(r.begin(), r.end()), h(n);
    op.grid->forward(c.data(), h.data());
    for (std::size_t k = 0; k < n; ++k) h[k] /= op.a * xi[k] * xi[k] + shift;
    op.grid->inverse(h.data(), c.data());
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = c[j].real();
    return out;
  };

  // Deterministic start: Gaussians times Hermite-like polynomials.
  std::vector<std::vector<double>> x(m, std::vector<double>(n));
  const auto& grid_x = op.grid->x();
  for (int i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double y = op.k * periodic_offset(grid_x[j], op.x0, op.grid->length());
      x[i][j] = std::pow(y, i) * std::exp(-0.5 * y * y) + 1e-3 * std::cos((i + 1) * 0.37 * j);
    }
  std::vector<std::vector<double>> p;
  std::vector<double> lambda(m, 0.0);
  std::vector<double> resid(count, 0.0);

  for (int iter = 0; iter < 5000; ++iter) {
    std::vector<std::vector<double>> basis;
    for (auto& v : x) basis.push_back(v);
    std::vector<std::vector<double>> ax;
    if (iter > 0) {
      for (int i = 0; i < m; ++i) {
        std::vector<double> av = apply(x[i]);
        std::vector<double> r(n);
        for (std::size_t j = 0; j < n; ++j) r[j] = av[j] - lambda[i] * x[i][j];
        double nx = std::sqrt(dot(x[i], x[i]));
        if (i < count) resid[i] = std::sqrt(dot(r, r)) / nx;
        basis.push_back(precondition(r));
      }
      bool converged = true;
      for (int i = 0; i < count; ++i)
        if (resid[i] > 1e-10) converged = false;
      if (converged) break;
      for (auto& v : p) basis.push_back(v);
    }
    // Two-pass Gram-Schmidt; X comes first so the leading q span X.
    std::vector<std::vector<double>> q;
    int from_x = 0;
    for (std::size_t bi = 0; bi < basis.size(); ++bi) {
      std::vector<double> v = basis[bi];
      const double n0 = std::sqrt(dot(v, v));
      if (!(n0 > 0.0)) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : q) {
          double c = dot(u, v);
          for (std::size_t j = 0; j < n; ++j) v[j] -= c * u[j];
        }
      double nv = std::sqrt(dot(v, v));
      if (nv <= 1e-10 * n0) continue;
      for (auto& e : v) e /= nv;
      q.push_back(std::move(v));
      if (bi < static_cast<std::size_t>(m)) ++from_x;
    }
    const int nq = static_cast<int>(q.size());
    if (nq < m) throw ConvergenceError("LOBPCG: search space collapsed", resid);
    std::vector<std::vector<double>> aq;
    for (auto& v : q) aq.push_back(apply(v));
    std::vector<double> h(static_cast<std::size_t>(nq) * nq);
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j <= i; ++j) {
        double v = 0.5 * (dot(q[i], aq[j]) + dot(q[j], aq[i]));
        h[i + j * nq] = h[j + i * nq] = v;
      }
    std::vector<double> hw = small_eig(h, nq);
    std::vector<std::vector<double>> xn(m, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> pn(m, std::vector<double>(n, 0.0));
    for (int c = 0; c < m; ++c) {
      lambda[c] = hw[c];
      for (int i = 0; i < nq; ++i) {
        const double w = h[i + static_cast<std::size_t>(c) * nq];
        for (std::size_t j = 0; j < n; ++j) {
          xn[c][j] += w * q[i][j];
          if (i >= from_x) pn[c][j] += w * q[i][j];
        }
      }
    }
    x = std::move(xn);
    if (iter > 0) p = std::move(pn);
    if (iter == 4999) {
      std::ostringstream os;
      os << "LOBPCG did not converge in 5000 iterations";
      throw ConvergenceError(os.str(), resid);
    }
  }
  std::vector<Eigenpair> out;
  for (int i = 0; i < count; ++i) {
    Eigenpair e{lambda[i], RealField{op.grid, x[i]}, 0.0};
    RealField av = op.apply(e.vector);
    e.value = inner_product_l2(e.vector, av) / inner_product_l2(e.vector, e.vector);
    finish_pair(op, e);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

std::vector<Eigenpair> eigs_lowest(const SchroedingerOperator& op, int count, EigenMethod method) {
  if (count < 1 || count > 10) throw ParameterError("eigs_lowest: count must be in 1..10");
  if (!(op.a > 0.0)) throw ParameterError("eigs_lowest: kinetic coefficient must be positive");
  if (static_cast<std::size_t>(count) > op.grid->size())
    throw ParameterError("eigs_lowest: count exceeds grid size");
  if (method == EigenMethod::Auto)
    method = op.grid->size() <= 4096 ? EigenMethod::Dense : EigenMethod::Iterative;
  std::vector<Eigenpair> out =
      method == EigenMethod::Dense ? eigs_dense(op, count) : eigs_lobpcg(op, count);
  std::vector<double> res;
  for (const auto& p : out) res.push_back(p.residual);
  for (const auto& p : out)
    if (!(p.residual < 1e-8)) {
      std::ostringstream os;
      os << "eigs_lowest: eigenpair residual " << p.residual << " exceeds 1e-8";
      throw ConvergenceError(os.str(), res);
    }
  return out;
}

RealField soliton_phase(const SolitonSpec& spec, const GridPtr& grid) {
  RealField lam = RealField::zeros(grid);
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j)
    lam[j] = spec.theta() * periodic_offset(x[j], spec.x0, grid->length()) + spec.gamma0;
  return lam;
}

RealField ground_state_psi(const SolitonSpec& spec, const GridPtr& grid) {
  RealField psi = RealField::zeros(grid);
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j)
    psi[j] = sech2(spec.k() * periodic_offset(x[j], spec.x0, grid->length()));
  return psi;
}

Perturbation apply_H(const SolitonSpec& spec, const SystemParams& params, const Perturbation& eta) {
  const GridPtr& g = eta.grid();
  FieldState r = soliton_state(spec, params, g, 0.0);
  ComplexField d2e1 = spectral_derivative(eta.u, 2);
  ComplexField de1 = spectral_derivative(eta.u, 1);
  ComplexField de2 = spectral_derivative(eta.rho, 1);
  const double al = params.alpha, be = params.beta, c = spec.c, om = spec.omega;
  const cplx i(0.0, 1.0);
  Perturbation h = FieldSet::zeros(g);
  for (std::size_t j = 0; j < g->size(); ++j) {
    cplx r1 = r.u[j];
    double r3 = r.v[j];
    cplx e1 = eta.u[j], e2 = eta.rho[j];
    double e3 = eta.v[j], e4 = eta.n[j];
    double re = (r1 * std::conj(e1)).real();
    h.u[j] = 2.0 * (-d2e1[j] + e1 + al * r3 * e1 + be * std::norm(r1) * e1) + 4.0 * be * r1 * re +
             2.0 * al * r1 * e3 + 2.0 * c * de2[j] + 2.0 * i * om * e2;
    h.rho[j] = 2.0 * (e2 - c * de1[j] - i * om * e1);
    h.v[j] = 2.0 * al * re + al * e3 + al * c * e4;
    h.n[j] = al * e4 + al * c * e3;
  }
  return h;
}

double quadratic_form_H(const SolitonSpec& spec, const SystemParams& params, const Perturbation& eta) {
  return pairing(apply_H(spec, params, eta), eta);
}

double quadratic_form_H_decomposed(const SolitonSpec& spec, const SystemParams& params,
                                   const Perturbation& eta) {
  const GridPtr& g = eta.grid();
  RealField lam = soliton_phase(spec, g);
  RealField phi = phi_profile(spec, params, g);
  ComplexField z1 = ComplexField::zeros(g), z2 = ComplexField::zeros(g);
  RealField y1 = RealField::zeros(g), y2 = RealField::zeros(g);
  for (std::size_t j = 0; j < g->size(); ++j) {
    cplx e = std::polar(1.0, -lam[j]);
    z1[j] = e * eta.u[j];
    z2[j] = e * eta.rho[j];
    y1[j] = z1[j].real();
    y2[j] = z1[j].imag();
  }
  SchroedingerOperator l1 = assemble_L1(spec, params, g);
  SchroedingerOperator l2 = assemble_L2(spec, params, g);
  ComplexField dz1 = spectral_derivative(z1, 1);
  const double a = spec.a(), s = spec.s(), c = spec.c, ra = std::sqrt(a);
  const cplx i(0.0, 1.0);
  double square = 0.0, coupling = 0.0;
  for (std::size_t j = 0; j < g->size(); ++j) {
    square += std::norm(z2[j] - i * s * z1[j] - c * dz1[j]);
    double p = c * eta.v[j] + eta.n[j];
    double q = 2.0 * phi[j] * y1[j] / ra + ra * eta.v[j];
    coupling += p * p + q * q;
  }
  const double dx = g->dx();
  return 2.0 * inner_product_l2(l1.apply(y1), y1) + 2.0 * inner_product_l2(l2.apply(y2), y2) +
         2.0 * square * dx + params.alpha * coupling * dx;
}

Perturbation negative_direction(const SolitonSpec& spec, const SystemParams& params,
                                const GridPtr& grid) {
  SechProfile prof = sech_profile(spec, params);
  RealField lam = soliton_phase(spec, grid);
  const double a = spec.a(), s = spec.s(), c = spec.c, k = spec.k();
  Perturbation u = FieldSet::zeros(grid);
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j) {
    double y = periodic_offset(x[j], spec.x0, grid->length());
    double psi = sech2(k * y);
    double dpsi = -2.0 * k * std::tanh(k * y) * psi;
    double phi = prof.phi(y);
    cplx e = std::polar(1.0, lam[j]);
    u.u[j] = e * psi;
    u.rho[j] = e * cplx(c * dpsi, s * psi);
    u.v[j] = -2.0 * phi * psi / a;
    u.n[j] = 2.0 * c * phi * psi / a;
  }
  return u;
}

std::vector<ComplexField> constraint_directions(const SolitonSpec& spec, const SystemParams& params,
                                                const GridPtr& grid) {
  SechProfile prof = sech_profile(spec, params);
  RealField lam = soliton_phase(spec, grid);
  std::vector<ComplexField> dirs(3, ComplexField::zeros(grid));
  const auto& x = grid->x();
  for (std::size_t j = 0; j < x.size(); ++j) {
    double y = periodic_offset(x[j], spec.x0, grid->length());
    cplx e = std::polar(1.0, lam[j]);
    dirs[0][j] = e * prof.dphi(y);
    dirs[1][j] = cplx(0.0, 1.0) * e * prof.phi(y);
    dirs[2][j] = e * sech2(spec.k() * y);
  }
  return dirs;
}

void project_out(Perturbation& eta, const std::vector<ComplexField>& directions) {
  std::vector<ComplexField> basis;
  for (const auto& d : directions) {
    ComplexField v = d;
    for (const auto& b : basis) v = v - cplx(inner_product_l2(v, b)) * b;
    double nv = std::sqrt(inner_product_l2(v, v));
    if (nv < 1e-300) continue;
    basis.push_back(cplx(1.0 / nv) * v);
  }
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) eta.u = eta.u - cplx(inner_product_l2(eta.u, b)) * b;
}

Perturbation random_perturbation(const GridPtr& grid, const std::vector<double>& centers,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Perturbation eta = FieldSet::zeros(grid);
  const auto& x = grid->x();
  const double len = grid->length();
  auto packet = [&](auto&& write) {
    for (double center : centers)
      for (int b = 0; b < 3; ++b) {
        double x0 = center + 5.0 * uni(rng);
        double w = 1.75 + 1.25 * uni(rng);
        double q = 1.0 + uni(rng);
        double ph = 3.14159 * uni(rng);
        double re = uni(rng), im = uni(rng);
        for (std::size_t j = 0; j < x.size(); ++j) {
          double y = periodic_offset(x[j], x0, len) / w;
          double env = std::exp(-y * y);
          write(j, env * std::cos(q * y * w + ph), env * std::sin(q * y * w + ph), re, im);
        }
      }
  };
  packet([&](std::size_t j, double cs, double sn, double re, double im) {
    eta.u[j] += cplx(re, im) * cplx(cs, sn);
  });
  packet([&](std::size_t j, double cs, double sn, double re, double im) {
    eta.rho[j] += cplx(re, im) * cplx(cs, sn);
  });
  packet([&](std::size_t j, double cs, double, double re, double) { eta.v[j] += re * cs; });
  packet([&](std::size_t j, double cs, double, double re, double) { eta.n[j] += re * cs; });
  return eta;
}

HLocTerms h_loc(const Perturbation& eps, const std::vector<FieldSet>& profiles,
                const std::vector<double>& speeds, const std::vector<double>& omegas,
                const SystemParams& params, const CutoffFamily& family, double t) {
  const std::size_t nsol = profiles.size();
  if (speeds.size() != nsol || omegas.size() != nsol || family.size() != nsol)
    throw ParameterError("h_loc: profile, speed, frequency and cutoff counts must agree");
  const GridPtr& g = eps.grid();
  Cutoffs cut = cutoffs(family, g, t);
  ComplexField de1 = spectral_derivative(eps.u, 1);
  const double al = params.alpha, be = params.beta, dx = g->dx();
  HLocTerms out;
  auto& T = out.terms;
  for (std::size_t i = 0; i < g->size(); ++i) {
    cplx e1 = eps.u[i], e2 = eps.rho[i];
    double e3 = eps.v[i], e4 = eps.n[i];
    double m1 = std::norm(e1);
    T[0] += std::norm(de1[i]);
    T[1] += m1;
    T[2] += std::norm(e2);
    T[3] += 0.5 * al * e3 * e3;
    T[4] += 0.5 * al * e4 * e4;
    T[5] += 0.5 * be * m1 * m1;
  }
  for (std::size_t j = 0; j < nsol; ++j) {
    const RealField& w = cut.phi[family.index_of(speeds[j])];
    const FieldSet& r = profiles[j];
    require_same_grid(*g, *r.grid());
    for (std::size_t i = 0; i < g->size(); ++i) {
      cplx e1 = eps.u[i], e2 = eps.rho[i];
      double e3 = eps.v[i], e4 = eps.n[i];
      double m1 = std::norm(e1);
      cplx r1 = r.u[i];
      double re = (r1 * std::conj(e1)).real();
      T[6] += al * m1 * r.v[i];
      T[7] += 2.0 * al * e3 * re;
      T[8] += al * speeds[j] * e3 * e4 * w[i];
      T[9] += -2.0 * omegas[j] * (std::conj(e1) * e2).imag() * w[i];
      T[10] += 2.0 * be * re * re;
      T[11] += -2.0 * speeds[j] * (de1[i] * std::conj(e2)).real() * w[i];
      T[12] += be * std::norm(r1) * m1;
    }
  }
  for (auto& v : T) v *= dx;
  out.total = std::accumulate(T.begin(), T.end(), 0.0);
  out.quadratic = out.total - T[5];
  return out;
}

CoercivityReport coercivity_report(const std::vector<SolitonSpec>& specs, const SystemParams& params,
                                   const GridPtr& grid, std::size_t samples, double t,
                                   std::uint64_t seed) {
  if (samples < 10) throw ParameterError("coercivity_report: need at least 10 samples");
  if (specs.empty()) throw ParameterError("coercivity_report: no solitons");
  CoercivityReport rep;
  rep.samples = samples;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const SolitonSpec& spec = specs[j];
    auto dirs = constraint_directions(spec, params, grid);
    RealField phi = phi_profile(spec, params, grid);
    SchroedingerOperator l2 = assemble_L2(spec, params, grid);
    std::mt19937_64 rng(seed + 7919 * j);
    double dmin = INFINITY, lmin = INFINITY;
    for (std::size_t s = 0; s < samples; ++s) {
      Perturbation eta = random_perturbation(grid, {spec.x0}, rng);
      project_out(eta, dirs);
      dmin = std::min(dmin, quadratic_form_H(spec, params, eta) / x_norm_sq(eta));
      RealField z = eta.v;
      z = z - (inner_product_l2(z, phi) / inner_product_l2(phi, phi)) * phi;
      lmin = std::min(lmin, inner_product_l2(l2.apply(z), z) / inner_product_l2(z, z));
    }
    rep.delta.push_back(dmin);
    rep.delta_l2.push_back(lmin);
  }

  std::vector<double> speeds, omegas, centers;
  std::vector<FieldSet> profiles;
  std::vector<ComplexField> dirs;
  for (const auto& spec : specs) {
    SolitonSpec now = advanced(spec, t);
    speeds.push_back(spec.c);
    omegas.push_back(spec.omega);
    centers.push_back(now.x0);
    profiles.push_back(soliton_state(now, params, grid, 0.0));
    for (auto& d : constraint_directions(now, params, grid)) dirs.push_back(std::move(d));
  }
  CutoffFamily family = CutoffFamily::from_speeds(speeds);
  std::mt19937_64 rng(seed + 104729);
  double kmin = INFINITY;
  for (std::size_t s = 0; s < samples; ++s) {
    Perturbation eps = random_perturbation(grid, centers, rng);
    project_out(eps, dirs);
    HLocTerms h = h_loc(eps, profiles, speeds, omegas, params, family, t);
    kmin = std::min(kmin, h.quadratic / x_norm_sq(eps));
  }
  rep.localized_k = kmin;
  return rep;
}

}  // namespace kgz
