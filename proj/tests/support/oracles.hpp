#pragma once

// Test-side oracles, kept independent of the library code paths they check:
// a 2x2 matrix model of the gauge group, a direct assembly of the general
// amplitude/phase equations from raw (nu, mu), a generic RK4, and small
// random-draw helpers with fixed seeds.

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dg/fields.hpp"
#include "dg/params.hpp"

namespace oracles {

// The affine group element as its defining 2x2 matrix [[1,0],[gamma,Lambda]].
using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 gauge_matrix(const dg::GaugeElement& a) {
  return {{{1.0, 0.0}, {a.gamma, a.Lambda}}};
}

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Amplitude/phase defects assembled term by term from the paper's general
// (nu, mu) equations, given precomputed derivative arrays. Used to
// cross-check the library's invariant-based assembly.
struct ApDefect {
  std::vector<double> amplitude, phase;
};

inline ApDefect assemble_ap(const dg::NuMuParams& p, const std::vector<double>& dt1,
                            const std::vector<double>& dt2, const std::vector<double>& g1,
                            const std::vector<double>& l1, const std::vector<double>& g2,
                            const std::vector<double>& l2, const std::vector<double>& V) {
  const size_t n = dt1.size();
  ApDefect d;
  d.amplitude.resize(n);
  d.phase.resize(n);
  for (size_t i = 0; i < n; ++i) {
    d.amplitude[i] = dt1[i] - 2.0 * p.nu2 * l1[i] - p.nu1 * l2[i] -
                     4.0 * p.nu2 * g1[i] * g1[i] - 2.0 * p.nu1 * g1[i] * g2[i];
    d.phase[i] = dt2[i] + 2.0 * p.mu2 * l1[i] + p.mu1 * l2[i] +
                 4.0 * (p.mu2 + p.mu5) * g1[i] * g1[i] +
                 2.0 * (p.mu1 + p.mu4) * g1[i] * g2[i] + p.mu3 * g2[i] * g2[i] +
                 p.mu0 * V[i];
  }
  return d;
}

// Generic fixed-step RK4 for small state vectors.
template <size_t N>
std::array<double, N> rk4_step(const std::function<std::array<double, N>(
                                   double, const std::array<double, N>&)>& f,
                               double t, const std::array<double, N>& y, double dt) {
  auto add = [](const std::array<double, N>& a, const std::array<double, N>& b,
                double h) {
    std::array<double, N> c;
    for (size_t i = 0; i < N; ++i) c[i] = a[i] + h * b[i];
    return c;
  };
  const auto k1 = f(t, y);
  const auto k2 = f(t + 0.5 * dt, add(y, k1, 0.5 * dt));
  const auto k3 = f(t + 0.5 * dt, add(y, k2, 0.5 * dt));
  const auto k4 = f(t + dt, add(y, k3, dt));
  std::array<double, N> out;
  for (size_t i = 0; i < N; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  double nonzero(double lo, double hi, double floor = 0.05) {
    double v = 0.0;
    do {
      v = uniform(lo, hi);
    } while (std::abs(v) < floor);
    return v;
  }
  dg::NuMuParams params() {
    dg::NuMuParams p;
    p.nu1 = nonzero(-2.0, 2.0, 0.2);
    p.nu2 = uniform(-1.5, 1.5);
    p.mu0 = uniform(-1.5, 1.5);
    p.mu1 = uniform(-1.5, 1.5);
    p.mu2 = uniform(-1.5, 1.5);
    p.mu3 = uniform(-1.5, 1.5);
    p.mu4 = uniform(-1.5, 1.5);
    p.mu5 = uniform(-1.5, 1.5);
    return p;
  }
  dg::GaugeElement gauge() {
    dg::GaugeElement a;
    a.Lambda = nonzero(-2.0, 2.0, 0.2);
    a.gamma = uniform(-2.0, 2.0);
    return a;
  }
};

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracles
