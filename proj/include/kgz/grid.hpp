#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace kgz {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-length/2, length/2) with cached FFT plans.
///
/// Forward transforms are unnormalized, inverse transforms carry 1/n.
class Grid {
 public:
  Grid(std::size_t n_points, double length);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double dx() const { return dx_; }
  const std::vector<double>& x() const { return x_; }
  /// Wavenumbers 2*pi*k/length, k in {0..n/2-1, -n/2..-1}.
  const std::vector<double>& xi() const { return xi_; }
  /// Wavenumbers used by odd-order operators: the Nyquist entry is zero so
  /// that derivatives of real fields stay real.
  const std::vector<double>& xi_odd() const { return xi_odd_; }

  /// Size of the zero-padded grid used for dealiased products.
  std::size_t padded_size() const { return m_; }

  void forward(const cplx* in, cplx* out) const;
  void inverse(const cplx* in, cplx* out) const;
  void forward_padded(const cplx* in, cplx* out) const;
  void inverse_padded(const cplx* in, cplx* out) const;

  bool same_as(const Grid& other) const {
    return this == &other || (n_ == other.n_ && length_ == other.length_);
  }

 private:
  std::size_t n_;
  std::size_t m_;
  double length_;
  double dx_;
  std::vector<double> x_;
  std::vector<double> xi_;
  std::vector<double> xi_odd_;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  void* plan_fwd_pad_ = nullptr;
  void* plan_inv_pad_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid; n_points must be even and at least 8, length positive.
GridPtr make_grid(std::size_t n_points, double length);

struct RealField {
  GridPtr grid;
  std::vector<double> values;

  static RealField zeros(GridPtr g);
  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

struct ComplexField {
  GridPtr grid;
  std::vector<cplx> values;

  static ComplexField zeros(GridPtr g);
  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
};

void require_same_grid(const Grid& a, const Grid& b);

RealField operator+(const RealField& a, const RealField& b);
RealField operator-(const RealField& a, const RealField& b);
RealField operator*(double s, const RealField& a);
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);
ComplexField to_complex(const RealField& f);

bool all_finite(const RealField& f);
bool all_finite(const ComplexField& f);

std::vector<cplx> transform(const ComplexField& f);
ComplexField inverse_transform(GridPtr g, const std::vector<cplx>& spectrum);

/// (i xi)^order applied in Fourier space; order is 1 or 2.
ComplexField spectral_derivative(const ComplexField& f, int order);
RealField spectral_derivative(const RealField& f, int order);

/// Re(sum f conj(g)) dx.
double inner_product_l2(const ComplexField& f, const ComplexField& g);
double inner_product_l2(const RealField& f, const RealField& g);

/// Signed displacement x - center folded into [-length/2, length/2).
double periodic_offset(double x, double center, double length);

}  // namespace kgz
