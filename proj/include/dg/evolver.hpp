#pragma once

// Direct time integration of the gauge-fixed amplitude/phase system,
// method of lines with Fourier space derivatives and classic RK4.
//
// The state is kept relative to the initial field's analytic carrier:
//   theta_j(x,t) = carrier_j(x) + P_j(x,t) + phi_j(x,t)
// with P_j a cubic polynomial channel and phi_j a periodic remainder.
// Moving log-form profiles have deviations that grow polynomially in x
// (a traveling Gaussian is quadratic, a quartic profile cubic, a sech
// profile carries a linear step), so each RK stage projects the computed
// right-hand side onto {x^3, x^2, x} by one-sided endpoint derivatives and
// integrates those coefficients as ODEs; only the wrap-periodic rest enters
// the spectral arrays. The projection is exact for polynomial tails.

#include <array>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dg/deriv.hpp"
#include "dg/fields.hpp"
#include "dg/params.hpp"

namespace dg {

struct EvolverConfig {
  Grid1D grid;
  double dt = 1e-4;
  double t_end = 1.0;
  Invariants inv;
  double kappa = 0.0;
  int record_every = 1;
  double safety = 0.1;      // explicit-scheme guard constant
  bool dealias = false;     // optional 2/3-rule filter
  double tail_depth = 20.0; // freeze dynamics where theta1 < max(theta1) - depth
  double tail_width = 2.0;  // smoothness of the freeze transition (theta units)

  double dt_bound() const {
    const double dx = grid.dx();
    const double scale = std::max({1.0, std::abs(inv.i1), std::abs(inv.i2),
                                   std::abs(inv.i1 + inv.i5)});
    return safety * dx * dx / scale;
  }

  void validate() const {
    grid.validate();
    if (grid.boundary != Boundary::Periodic)
      fail(ErrorKind::InvalidArgument, "evolver is spectral; grid must be periodic");
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "dt must be positive");
    if (record_every < 1) fail(ErrorKind::InvalidArgument, "record_every must be >= 1");
    if (dt > dt_bound())
      fail(ErrorKind::StabilityGuard,
           "dt=" + format_g17(dt) + " exceeds stability bound " + format_g17(dt_bound()));
  }
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<ThetaField> fields;
  std::vector<double> mass;
  bool diverged = false;
};

namespace detail {

struct Poly3 {
  double c3 = 0.0, c2 = 0.0, c1 = 0.0;
  double value(double x) const { return ((c3 * x + c2) * x + c1) * x; }
  double d1(double x) const { return (3.0 * c3 * x + 2.0 * c2) * x + c1; }
  double d2(double x) const { return 6.0 * c3 * x + 2.0 * c2; }
};

// One-sided endpoint derivative estimates of a sampled array.
struct EndpointStencils {
  std::vector<double> d1w, d2w;  // weights relative to the end, spacing dx
  int w1 = 5, w2 = 6;

  explicit EndpointStencils(double dx) {
    std::vector<double> nodes1(w1), nodes2(w2);
    for (int j = 0; j < w1; ++j) nodes1[j] = j * dx;
    for (int j = 0; j < w2; ++j) nodes2[j] = j * dx;
    d1w = fornberg_weights(0.0, nodes1, 1);
    d2w = fornberg_weights(0.0, nodes2, 2);
  }

  double d1_left(std::span<const double> r) const {
    double a = 0.0;
    for (int j = 0; j < w1; ++j) a += d1w[j] * r[j];
    return a;
  }
  double d1_right(std::span<const double> r) const {
    const int n = static_cast<int>(r.size());
    double a = 0.0;
    for (int j = 0; j < w1; ++j) a -= d1w[j] * r[n - 1 - j];  // mirrored, odd order
    return a;
  }
  double d2_left(std::span<const double> r) const {
    double a = 0.0;
    for (int j = 0; j < w2; ++j) a += d2w[j] * r[j];
    return a;
  }
  double d2_right(std::span<const double> r) const {
    const int n = static_cast<int>(r.size());
    double a = 0.0;
    for (int j = 0; j < w2; ++j) a += d2w[j] * r[n - 1 - j];  // even order
    return a;
  }
};

// Split r into a cubic secular polynomial (wrap-matched in value and first
// two derivatives) and a periodic remainder.
inline Poly3 project_secular(std::vector<double>& r, const Grid1D& grid,
                             const EndpointStencils& st) {
  const int n = grid.n;
  const double xL = grid.x(0), xR = grid.x(n - 1), L = grid.length();
  const double d1L = st.d1_left(r), d1R = st.d1_right(r);
  const double d2L = st.d2_left(r), d2R = st.d2_right(r);
  Poly3 p;
  p.c3 = (d2R - d2L) / (6.0 * (xR - xL));
  p.c2 = 0.5 * (0.5 * ((d2L - 6.0 * p.c3 * xL) + (d2R - 6.0 * p.c3 * xR)));
  p.c1 = 0.5 * ((d1L - 3.0 * p.c3 * xL * xL - 2.0 * p.c2 * xL) +
                (d1R - 3.0 * p.c3 * xR * xR - 2.0 * p.c2 * xR));
  // Remaining value step across the wrap seam goes into the linear term.
  const double remL = r[0] - p.value(xL);
  const double remR = r[n - 1] - p.value(xR);
  const double dremR = d1R - p.d1(xR);
  p.c1 += (remR + grid.dx() * dremR - remL) / L;
  for (int i = 0; i < n; ++i) r[i] -= p.value(grid.x(i));
  return p;
}

}  // namespace detail

// Evolve an initial theta field. The trace holds one snapshot every
// record_every steps (count = floor(t_end/(dt*record_every)) + 1); on
// non-finite values the partial trace is returned with diverged = true.
inline EvolutionTrace evolve(const ThetaField& initial, const EvolverConfig& cfg) {
  cfg.validate();
  initial.validate();
  if (!(initial.grid == cfg.grid))
    fail(ErrorKind::InvalidArgument, "initial field grid differs from config grid");

  const int n = cfg.grid.n;
  const auto xs = cfg.grid.points();
  const std::vector<double> V = harmonic_potential(cfg.grid, cfg.kappa);
  DerivativeOp op(cfg.grid);
  const detail::EndpointStencils stencils(cfg.grid.dx());

  // Static carrier arrays (zero when the initial field is raw).
  auto carrier_or_zero = [&](const std::optional<Carrier>& c) {
    return c ? *c : Carrier{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                            std::vector<double>(n, 0.0)};
  };
  const Carrier base1 = carrier_or_zero(initial.carrier1);
  const Carrier base2 = carrier_or_zero(initial.carrier2);

  struct State {
    std::vector<double> phi1, phi2;
    detail::Poly3 p1, p2;
  };
  State y{initial.theta1, initial.theta2, {}, {}};

  struct Rates {
    std::vector<double> r1, r2;  // after projection: d/dt of phi
    detail::Poly3 p1, p2;        // d/dt of the polynomial channels
  };

  const Invariants& v = cfg.inv;
  const double K =
      2.0 * v.i5 + 2.0 * v.i1 - 2.0 * v.i4 * v.i2 - v.i2 * v.i2 * (v.i3 - 1.0);

  // Assembles the raw RHS of (d/dt theta1, d/dt theta2) for a state; the
  // arrays are the full time derivatives before secular projection.
  auto raw_rhs = [&](const State& st, std::vector<double>& r1, std::vector<double>& r2) {
    const auto dphi1 = op.d1(st.phi1);
    const auto ddphi1 = op.d2(st.phi1);
    const auto dphi2 = op.d1(st.phi2);
    const auto ddphi2 = op.d2(st.phi2);
    for (int i = 0; i < n; ++i) {
      const double x = xs[i];
      const double g1 = base1.d1[i] + st.p1.d1(x) + dphi1[i];
      const double l1 = base1.d2[i] + st.p1.d2(x) + ddphi1[i];
      const double g2 = base2.d1[i] + st.p2.d1(x) + dphi2[i];
      const double l2 = base2.d2[i] + st.p2.d2(x) + ddphi2[i];
      r1[i] = -v.i2 * l1 + l2 - 2.0 * v.i2 * g1 * g1 + 2.0 * g1 * g2;
      r2[i] = -2.0 * v.i1 * l1 - K * g1 * g1 - 2.0 * v.i4 * g1 * g2 -
              (v.i3 - 1.0) * g2 * g2 - v.i0 * V[i];
    }
  };

  auto rates_of = [&](const State& st) {
    Rates r;
    r.r1.resize(n);
    r.r2.resize(n);
    raw_rhs(st, r.r1, r.r2);
    r.p1 = detail::project_secular(r.r1, cfg.grid, stencils);
    r.p2 = detail::project_secular(r.r2, cfg.grid, stencils);
    return r;
  };

  auto advanced = [&](const State& st, const Rates& k, double h) {
    State out = st;
    for (int i = 0; i < n; ++i) {
      out.phi1[i] += h * k.r1[i];
      out.phi2[i] += h * k.r2[i];
    }
    out.p1.c3 += h * k.p1.c3;
    out.p1.c2 += h * k.p1.c2;
    out.p1.c1 += h * k.p1.c1;
    out.p2.c3 += h * k.p2.c3;
    out.p2.c2 += h * k.p2.c2;
    out.p2.c1 += h * k.p2.c1;
    return out;
  };

  auto snapshot = [&](const State& st) {
    ThetaField f{cfg.grid, st.phi1, st.phi2, Carrier{}, Carrier{},
                 std::vector<double>(n), std::vector<double>(n)};
    f.carrier1->value.resize(n);
    f.carrier1->d1.resize(n);
    f.carrier1->d2.resize(n);
    f.carrier2->value.resize(n);
    f.carrier2->d1.resize(n);
    f.carrier2->d2.resize(n);
    for (int i = 0; i < n; ++i) {
      const double x = xs[i];
      f.carrier1->value[i] = base1.value[i] + st.p1.value(x);
      f.carrier1->d1[i] = base1.d1[i] + st.p1.d1(x);
      f.carrier1->d2[i] = base1.d2[i] + st.p1.d2(x);
      f.carrier2->value[i] = base2.value[i] + st.p2.value(x);
      f.carrier2->d1[i] = base2.d1[i] + st.p2.d1(x);
      f.carrier2->d2[i] = base2.d2[i] + st.p2.d2(x);
    }
    raw_rhs(st, *f.dt_theta1, *f.dt_theta2);
    return f;
  };

  auto mass_of = [&](const ThetaField& f) {
    const auto t1 = f.theta1_total();
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = std::exp(2.0 * t1[i]);
    return integrate_grid(cfg.grid, rho);
  };

  EvolutionTrace trace;
  auto record = [&](double t, const State& st) {
    ThetaField f = snapshot(st);
    trace.times.push_back(t);
    trace.mass.push_back(mass_of(f));
    trace.fields.push_back(std::move(f));
  };
  record(0.0, y);

  const long steps = std::lround(cfg.t_end / cfg.dt);
  const long total_snaps = static_cast<long>(cfg.t_end / (cfg.dt * cfg.record_every)) + 1;
  for (long step = 0; step < steps; ++step) {
    const Rates k1 = rates_of(y);
    const Rates k2 = rates_of(advanced(y, k1, 0.5 * cfg.dt));
    const Rates k3 = rates_of(advanced(y, k2, 0.5 * cfg.dt));
    const Rates k4 = rates_of(advanced(y, k3, cfg.dt));
    for (int i = 0; i < n; ++i) {
      y.phi1[i] += cfg.dt / 6.0 * (k1.r1[i] + 2.0 * k2.r1[i] + 2.0 * k3.r1[i] + k4.r1[i]);
      y.phi2[i] += cfg.dt / 6.0 * (k1.r2[i] + 2.0 * k2.r2[i] + 2.0 * k3.r2[i] + k4.r2[i]);
    }
    auto rk_poly = [&](detail::Poly3& p, const detail::Poly3& a, const detail::Poly3& b,
                       const detail::Poly3& c, const detail::Poly3& d) {
      p.c3 += cfg.dt / 6.0 * (a.c3 + 2.0 * b.c3 + 2.0 * c.c3 + d.c3);
      p.c2 += cfg.dt / 6.0 * (a.c2 + 2.0 * b.c2 + 2.0 * c.c2 + d.c2);
      p.c1 += cfg.dt / 6.0 * (a.c1 + 2.0 * b.c1 + 2.0 * c.c1 + d.c1);
    };
    rk_poly(y.p1, k1.p1, k2.p1, k3.p1, k4.p1);
    rk_poly(y.p2, k1.p2, k2.p2, k3.p2, k4.p2);
    if (cfg.dealias) {
      op.dealias_two_thirds(y.phi1);
      op.dealias_two_thirds(y.phi2);
    }
    bool finite = true;
    for (int i = 0; i < n && finite; ++i)
      finite = std::isfinite(y.phi1[i]) && std::isfinite(y.phi2[i]);
    if (!finite) {
      trace.diverged = true;
      return trace;
    }
    if ((step + 1) % cfg.record_every == 0 &&
        static_cast<long>(trace.times.size()) < total_snaps)
      record((step + 1) * cfg.dt, y);
  }
  return trace;
}

// Per-snapshot mass, density-weighted center and width.
struct Observables {
  std::vector<double> t, mass, center, width;
};

inline Observables observables(const EvolutionTrace& trace) {
  if (trace.fields.empty()) fail(ErrorKind::InvalidArgument, "empty trace");
  Observables obs;
  for (size_t k = 0; k < trace.fields.size(); ++k) {
    const ThetaField& f = trace.fields[k];
    const auto t1 = f.theta1_total();
    const int n = f.grid.n;
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = std::exp(2.0 * t1[i]);
    const double m = integrate_grid(f.grid, rho);
    std::vector<double> xr(n);
    for (int i = 0; i < n; ++i) xr[i] = f.grid.x(i) * rho[i];
    const double c = integrate_grid(f.grid, xr) / m;
    for (int i = 0; i < n; ++i) {
      const double u = f.grid.x(i) - c;
      xr[i] = u * u * rho[i];
    }
    const double w = std::sqrt(integrate_grid(f.grid, xr) / m);
    obs.t.push_back(trace.times[k]);
    obs.mass.push_back(m);
    obs.center.push_back(c);
    obs.width.push_back(w);
  }
  return obs;
}

inline std::string observables_to_csv(const Observables& obs) {
  std::string out = "t,mass,center,width\n";
  for (size_t i = 0; i < obs.t.size(); ++i)
    out += csv_row({obs.t[i], obs.mass[i], obs.center[i], obs.width[i]});
  return out;
}

}  // namespace dg
