#pragma once

// Discrete differentiation on uniform 1D grids:
//  - Periodic: Fourier differentiation (FFTW r2c/c2r).
//  - Dirichlet: 4th-order central stencils, one-sided 4th-order closures at
//    the boundary (weights generated with Fornberg's algorithm).
//
// A DerivativeOp owns its FFTW plans and scratch buffers, so one instance
// is created per grid and reused; instances are not shared across threads,
// but constructing them concurrently is safe (plan creation is locked).

#include <complex>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "dg/grid.hpp"

namespace dg {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Fornberg (1988) finite-difference weights for derivative order m at point
// z from nodes x[0..nd]. Returns weights for the highest requested order.
inline std::vector<double> fornberg_weights(double z, std::span<const double> x, int m) {
  const int nd = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<double>> c(nd + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= nd; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nd + 1);
  for (int i = 0; i <= nd; ++i) w[i] = c[i][m];
  return w;
}

}  // namespace detail

class DerivativeOp {
 public:
  explicit DerivativeOp(const Grid1D& grid) : grid_(grid) {
    grid.validate();
    if (grid_.boundary == Boundary::Periodic) init_spectral();
  }

  ~DerivativeOp() {
    if (plan_fwd_) fftw_destroy_plan(plan_fwd_);
    if (plan_bwd_) fftw_destroy_plan(plan_bwd_);
    if (real_buf_) fftw_free(real_buf_);
    if (spec_buf_) fftw_free(spec_buf_);
  }

  DerivativeOp(const DerivativeOp&) = delete;
  DerivativeOp& operator=(const DerivativeOp&) = delete;

  const Grid1D& grid() const { return grid_; }

  std::vector<double> d1(std::span<const double> f) const { return apply(f, 1); }
  std::vector<double> d2(std::span<const double> f) const { return apply(f, 2); }

  // Zero all modes above two thirds of the Nyquist wavenumber (periodic only).
  void dealias_two_thirds(std::vector<double>& f) const {
    if (grid_.boundary != Boundary::Periodic) return;
    const int n = grid_.n;
    const int nk = n / 2 + 1;
    const int keep = n / 3;
    for (int i = 0; i < n; ++i) real_buf_[i] = f[i];
    fftw_execute(plan_fwd_);
    for (int m = keep + 1; m < nk; ++m) spec_buf_[m][0] = spec_buf_[m][1] = 0.0;
    fftw_execute(plan_bwd_);
    for (int i = 0; i < n; ++i) f[i] = real_buf_[i] / n;
  }

  // Complex-field derivatives (used by the psi-path residuals). Periodic
  // grids differentiate real and imaginary parts separately.
  std::vector<std::complex<double>> d1(std::span<const std::complex<double>> f) const {
    return apply_complex(f, 1);
  }
  std::vector<std::complex<double>> d2(std::span<const std::complex<double>> f) const {
    return apply_complex(f, 2);
  }

 private:
  Grid1D grid_;
  fftw_plan plan_fwd_ = nullptr;
  fftw_plan plan_bwd_ = nullptr;
  double* real_buf_ = nullptr;
  fftw_complex* spec_buf_ = nullptr;

  void init_spectral() {
    const int n = grid_.n;
    real_buf_ = fftw_alloc_real(n);
    spec_buf_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c_1d(n, real_buf_, spec_buf_, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r_1d(n, spec_buf_, real_buf_, FFTW_ESTIMATE);
  }

  std::vector<double> apply(std::span<const double> f, int order) const {
    if (static_cast<int>(f.size()) != grid_.n)
      fail(ErrorKind::InvalidArgument, "field length does not match grid");
    return grid_.boundary == Boundary::Periodic ? spectral(f, order) : fd4(f, order);
  }

  std::vector<std::complex<double>> apply_complex(std::span<const std::complex<double>> f,
                                                  int order) const {
    const int n = grid_.n;
    std::vector<double> re(n), im(n);
    for (int i = 0; i < n; ++i) {
      re[i] = f[i].real();
      im[i] = f[i].imag();
    }
    const auto dre = apply(re, order);
    const auto dim = apply(im, order);
    std::vector<std::complex<double>> out(n);
    for (int i = 0; i < n; ++i) out[i] = {dre[i], dim[i]};
    return out;
  }

  std::vector<double> spectral(std::span<const double> f, int order) const {
    const int n = grid_.n;
    const int nk = n / 2 + 1;
    const double k0 = 2.0 * M_PI / grid_.length();
    for (int i = 0; i < n; ++i) real_buf_[i] = f[i];
    fftw_execute(plan_fwd_);
    for (int m = 0; m < nk; ++m) {
      const double k = k0 * m;
      std::complex<double> c{spec_buf_[m][0], spec_buf_[m][1]};
      if (order == 1) {
        c *= std::complex<double>{0.0, k};
        // the Nyquist mode of an odd derivative has no consistent sign
        if (n % 2 == 0 && m == n / 2) c = 0.0;
      } else {
        c *= -k * k;
      }
      spec_buf_[m][0] = c.real();
      spec_buf_[m][1] = c.imag();
    }
    fftw_execute(plan_bwd_);
    std::vector<double> out(n);
    const double scale = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] = real_buf_[i] * scale;
    return out;
  }

  std::vector<double> fd4(std::span<const double> f, int order) const {
    const int n = grid_.n;
    const double dx = grid_.dx();
    std::vector<double> out(n);
    // Central interior stencils.
    if (order == 1) {
      const double c1 = 8.0 / (12.0 * dx), c2 = 1.0 / (12.0 * dx);
      for (int i = 2; i < n - 2; ++i)
        out[i] = c2 * f[i - 2] - c1 * f[i - 1] + c1 * f[i + 1] - c2 * f[i + 2];
    } else {
      const double a = -1.0 / (12.0 * dx * dx), b = 16.0 / (12.0 * dx * dx),
                   c = -30.0 / (12.0 * dx * dx);
      for (int i = 2; i < n - 2; ++i)
        out[i] = a * f[i - 2] + b * f[i - 1] + c * f[i] + b * f[i + 1] + a * f[i + 2];
    }
    // One-sided 4th-order closures. 1st derivative needs 5 nodes, 2nd needs 6.
    const int width = (order == 1) ? 5 : 6;
    std::vector<double> nodes(width);
    for (int row : {0, 1, n - 2, n - 1}) {
      const int start = (row < 2) ? 0 : n - width;
      for (int j = 0; j < width; ++j) nodes[j] = grid_.x(start + j);
      const auto w = detail::fornberg_weights(grid_.x(row), nodes, order);
      double acc = 0.0;
      for (int j = 0; j < width; ++j) acc += w[j] * f[start + j];
      out[row] = acc;
    }
    return out;
  }
};

// Trapezoid integral of a sampled field over its grid. On periodic grids
// this is the plain Riemann sum (the wrap cell closes the circle).
inline double integrate_grid(const Grid1D& grid, std::span<const double> f) {
  const double dx = grid.dx();
  if (grid.boundary == Boundary::Periodic) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * dx;
  }
  double s = 0.5 * (f.front() + f.back());
  for (int i = 1; i < grid.n - 1; ++i) s += f[i];
  return s * dx;
}

}  // namespace dg
