#pragma once

// Parameter space of the Doebner-Goldin family: the eight (nu, mu)
// coefficients, the Aff(1) gauge action on them, the six gauge invariants,
// and conversions from physical constants (m, hbar, D, D', c1..c5).
//
// All types are immutable values, all functions are pure.

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "dg/error.hpp"

namespace dg {

struct PhysicalParams {
  double mass = 1.0;
  double hbar = 1.0;
  double D = 0.0;
  double Dprime = 0.0;
  std::array<double, 5> c{0.0, 0.0, 0.0, 0.0, 0.0};
  double kappa = 0.0;  // harmonic spring constant; 0 = free particle

  void validate() const {
    if (!(mass > 0.0)) fail(ErrorKind::InvalidArgument, "mass must be > 0");
    if (!(hbar > 0.0)) fail(ErrorKind::InvalidArgument, "hbar must be > 0");
    if (kappa < 0.0) fail(ErrorKind::InvalidArgument, "kappa must be >= 0");
  }
};

struct NuMuParams {
  double nu1 = 1.0;
  double nu2 = 0.0;
  double mu0 = 0.0, mu1 = 0.0, mu2 = 0.0, mu3 = 0.0, mu4 = 0.0, mu5 = 0.0;

  void validate() const {
    if (nu1 == 0.0) fail(ErrorKind::InvalidArgument, "nu1 must be nonzero");
  }
};

// Aff(1) element acting on (theta1, theta2) as theta1' = theta1,
// theta2' = gamma*theta1 + Lambda*theta2.
struct GaugeElement {
  double Lambda = 1.0;
  double gamma = 0.0;

  void validate() const {
    if (Lambda == 0.0) fail(ErrorKind::InvalidArgument, "Lambda must be nonzero");
  }
  static GaugeElement identity() { return {1.0, 0.0}; }
};

struct Invariants {
  double i0 = 0.0, i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0, i5 = 0.0;

  double friction() const { return i2 * i3 + i4; }  // the damping combination
  std::array<double, 6> as_array() const { return {i0, i1, i2, i3, i4, i5}; }
  static Invariants from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

// Map the physical parameterization to (nu, mu): divide the governing
// equation by hbar and expand the Laplacian term,
// Delta psi = (i R1 + R2/2 - R3 - R5/4) psi.
inline NuMuParams from_physical(const PhysicalParams& p) {
  p.validate();
  NuMuParams q;
  q.nu1 = -p.hbar / (2.0 * p.mass);
  q.nu2 = p.D / 2.0;
  q.mu0 = 1.0 / p.hbar;
  q.mu1 = p.Dprime * p.c[0];
  q.mu2 = -p.hbar / (4.0 * p.mass) + p.Dprime * p.c[1];
  q.mu3 = p.hbar / (2.0 * p.mass) + p.Dprime * p.c[2];
  q.mu4 = p.Dprime * p.c[3];
  q.mu5 = p.hbar / (8.0 * p.mass) + p.Dprime * p.c[4];
  return q;
}

inline Invariants invariants_of(const NuMuParams& p) {
  p.validate();
  Invariants v;
  v.i0 = p.nu1 * p.mu0;
  v.i1 = p.nu1 * p.mu2 - p.nu2 * p.mu1;
  v.i2 = p.mu1 - 2.0 * p.nu2;
  v.i3 = 1.0 + p.mu3 / p.nu1;
  v.i4 = p.mu4 - p.mu1 * p.mu3 / p.nu1;
  v.i5 = p.nu1 * (p.mu2 + 2.0 * p.mu5) - p.nu2 * (p.mu1 + 2.0 * p.mu4) +
         2.0 * p.nu2 * p.nu2 * p.mu3 / p.nu1;
  return v;
}

// Parameter change under A(Lambda, gamma).
inline NuMuParams apply_gauge(const GaugeElement& a, const NuMuParams& p) {
  a.validate();
  p.validate();
  const double L = a.Lambda, g = a.gamma;
  NuMuParams q;
  q.nu1 = p.nu1 / L;
  q.nu2 = -g / (2.0 * L) * p.nu1 + p.nu2;
  q.mu1 = -g / L * p.nu1 + p.mu1;
  q.mu2 = g * g / (2.0 * L) * p.nu1 - g * p.nu2 - 0.5 * g * p.mu1 + L * p.mu2;
  q.mu3 = p.mu3 / L;
  q.mu4 = -g / L * p.mu3 + p.mu4;
  q.mu5 = g * g / (4.0 * L) * p.mu3 - 0.5 * g * p.mu4 + L * p.mu5;
  q.mu0 = L * p.mu0;
  return q;
}

// Group law matching the matrix product A(L2,g2) A(L1,g1).
inline GaugeElement compose(const GaugeElement& a2, const GaugeElement& a1) {
  return {a2.Lambda * a1.Lambda, a2.gamma + a2.Lambda * a1.gamma};
}

inline GaugeElement inverse(const GaugeElement& a) {
  a.validate();
  return {1.0 / a.Lambda, -a.gamma / a.Lambda};
}

// Rebuild (nu, mu) from invariants and the two group coordinates.
// Defaults to the gauge fixing nu1 = 1, mu1 = 0.
inline NuMuParams reconstruct(const Invariants& v, double nu1 = 1.0, double mu1 = 0.0) {
  if (nu1 == 0.0) fail(ErrorKind::InvalidArgument, "nu1 must be nonzero");
  NuMuParams p;
  p.nu1 = nu1;
  p.mu1 = mu1;
  p.nu2 = 0.5 * (mu1 - v.i2);
  p.mu2 = 0.5 / nu1 * (2.0 * v.i1 - v.i2 * mu1 + mu1 * mu1);
  p.mu3 = (v.i3 - 1.0) * nu1;
  p.mu4 = v.i4 - mu1 + v.i3 * mu1;
  p.mu5 = 0.5 / nu1 *
          (v.i5 - v.i1 + v.i4 * (mu1 - v.i2) +
           0.5 * (mu1 * mu1 - v.i2 * v.i2) * (v.i3 - 1.0));
  p.mu0 = v.i0 / nu1;
  return p;
}

namespace detail {
inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}
}  // namespace detail

// Solve apply_gauge(a, p) = q for a. Returns nullopt when p and q lie on
// different gauge orbits (invariants differ beyond tolerance).
inline std::optional<GaugeElement> find_gauge(const NuMuParams& p, const NuMuParams& q,
                                              double tol = 1e-10) {
  p.validate();
  q.validate();
  const Invariants vp = invariants_of(p), vq = invariants_of(q);
  const auto ap = vp.as_array(), aq = vq.as_array();
  for (int i = 0; i < 6; ++i)
    if (!detail::close_rel(ap[i], aq[i], tol)) return std::nullopt;
  GaugeElement a;
  a.Lambda = p.nu1 / q.nu1;              // nu1' = nu1 / Lambda
  a.gamma = (p.mu1 - q.mu1) / q.nu1;     // mu1' = mu1 - gamma nu1'
  // Invariants can match while the remaining coordinates disagree only
  // through roundoff; verify the full map.
  const NuMuParams r = apply_gauge(a, p);
  const std::array<double, 8> have{r.nu1, r.nu2, r.mu0, r.mu1, r.mu2, r.mu3, r.mu4, r.mu5};
  const std::array<double, 8> want{q.nu1, q.nu2, q.mu0, q.mu1, q.mu2, q.mu3, q.mu4, q.mu5};
  for (int i = 0; i < 8; ++i)
    if (!detail::close_rel(have[i], want[i], 1e3 * tol)) return std::nullopt;
  return a;
}

// The gauge class of the linear Schroedinger equation: i0 < 0, i1 > 0,
// i2 = ... = i5 = 0.
inline bool is_linearizable(const Invariants& v, double tol = 1e-12) {
  return v.i0 < 0.0 && v.i1 > 0.0 && std::abs(v.i2) < tol && std::abs(v.i3) < tol &&
         std::abs(v.i4) < tol && std::abs(v.i5) < tol;
}

}  // namespace dg
