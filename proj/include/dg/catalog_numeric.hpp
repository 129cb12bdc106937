#pragma once

// Numeric branch of linearized_stationary: dense symmetric tridiagonal
// eigensolve (LAPACK dstev) of the auxiliary linear problem
//   -alpha phi'' + V phi = E phi,  alpha = -2 i1^2 / (i0 (i1 + i5)),
// on a Dirichlet grid, second-order stencil. Only the nodeless ground mode
// is admitted to the fractional power.

#include <lapacke.h>

#include <vector>

#include "dg/catalog.hpp"

namespace dg {

inline NumericStationary linearized_stationary_numeric(const Invariants& inv,
                                                       const Potential& V,
                                                       const Grid1D& grid,
                                                       int mode_index) {
  if (inv.i1 == 0.0 || inv.i1 + inv.i5 == 0.0)
    fail(ErrorKind::InvalidRegime, "linearized_stationary needs i1 != 0 != i1 + i5");
  if (!(inv.i0 * (inv.i1 + inv.i5) < 0.0))
    fail(ErrorKind::InvalidRegime, "linearized_stationary needs i0 (i1 + i5) < 0");
  grid.validate();
  if (grid.boundary != Boundary::Dirichlet)
    fail(ErrorKind::InvalidArgument, "numeric eigensolve needs a Dirichlet grid");
  const double alpha = -2.0 * inv.i1 * inv.i1 / (inv.i0 * (inv.i1 + inv.i5));
  const int n = grid.n;
  const double dx = grid.dx();
  std::vector<double> diag(n), off(n - 1, -alpha / (dx * dx));
  for (int i = 0; i < n; ++i) diag[i] = 2.0 * alpha / (dx * dx) + V.v(grid.x(i));
  std::vector<double> z(static_cast<size_t>(n) * n);
  const int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, diag.data(), off.data(),
                                 z.data(), n);
  if (info != 0) fail(ErrorKind::Diverged, "dstev failed, info=" + std::to_string(info));
  if (mode_index < 0 || mode_index >= n)
    fail(ErrorKind::InvalidArgument, "mode index out of range");
  std::vector<double> phi(z.begin() + static_cast<size_t>(mode_index) * n,
                          z.begin() + static_cast<size_t>(mode_index + 1) * n);
  // Orient positive at the peak, then refuse modes with sign changes.
  double peak = 0.0;
  for (double v : phi)
    if (std::abs(v) > std::abs(peak)) peak = v;
  if (peak < 0.0)
    for (double& v : phi) v = -v;
  for (double v : phi)
    if (v <= 0.0)
      fail(ErrorKind::NodefulMode, "selected mode has nodes; fractional power undefined");
  const double beta = inv.i1 / (inv.i1 + inv.i5);
  NumericStationary out;
  out.energy = diag[mode_index];  // dstev returns eigenvalues in d
  out.omega = inv.i0 * out.energy;
  ThetaField f{grid, std::vector<double>(n), std::vector<double>(n),
               {}, {}, std::vector<double>(n, 0.0), std::vector<double>(n, -out.omega)};
  for (int i = 0; i < n; ++i) {
    f.theta1[i] = beta * std::log(phi[i]);
    f.theta2[i] = inv.i2 * f.theta1[i];  // at t = 0
  }
  out.field = std::move(f);
  return out;
}

}  // namespace dg
