#pragma once

// Grid fields and residual evaluation.
//
// Fields live in log-amplitude/phase form, psi = exp(theta1 + i theta2).
// A ThetaField stores sampled remainder arrays plus an optional analytic
// carrier (values and first two derivatives sampled on the grid): localized
// solutions have theta components that grow linearly or polynomially toward
// the boundary, which no periodic discrete derivative can represent, so the
// carrier absorbs that structure and the discrete backends only ever see the
// smooth periodic remainder. Analytic time derivatives travel in a second
// side channel; this module never differentiates in time.

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dg/deriv.hpp"
#include "dg/error.hpp"
#include "dg/grid.hpp"
#include "dg/io.hpp"
#include "dg/params.hpp"

namespace dg {

inline constexpr double kAmplitudeFloor = 1e-14;  // refusal floor on |psi|

struct Carrier {
  std::vector<double> value;
  std::vector<double> d1;
  std::vector<double> d2;
};

struct ThetaField {
  Grid1D grid;
  std::vector<double> theta1;  // remainder when carrier1 present, else total
  std::vector<double> theta2;
  std::optional<Carrier> carrier1;
  std::optional<Carrier> carrier2;
  std::optional<std::vector<double>> dt_theta1;
  std::optional<std::vector<double>> dt_theta2;

  void validate() const {
    grid.validate();
    const size_t n = static_cast<size_t>(grid.n);
    auto check = [&](size_t len, const char* what) {
      if (len != n) fail(ErrorKind::InvalidArgument, std::string(what) + " length mismatch");
    };
    check(theta1.size(), "theta1");
    check(theta2.size(), "theta2");
    if (carrier1) check(carrier1->value.size(), "carrier1");
    if (carrier2) check(carrier2->value.size(), "carrier2");
    if (dt_theta1) check(dt_theta1->size(), "dt_theta1");
    if (dt_theta2) check(dt_theta2->size(), "dt_theta2");
  }

  std::vector<double> theta1_total() const { return total(theta1, carrier1); }
  std::vector<double> theta2_total() const { return total(theta2, carrier2); }

 private:
  static std::vector<double> total(const std::vector<double>& rem,
                                   const std::optional<Carrier>& car) {
    std::vector<double> out = rem;
    if (car)
      for (size_t i = 0; i < out.size(); ++i) out[i] += car->value[i];
    return out;
  }
};

struct ComplexField {
  Grid1D grid;
  std::vector<std::complex<double>> values;
};

struct ResidualReport {
  double l2 = 0.0;
  double linf = 0.0;
  std::map<std::string, std::pair<double, double>> per_equation;

  nlohmann::json to_json() const {
    nlohmann::json per;
    for (const auto& [name, v] : per_equation)
      per[name] = {{"l2", v.first}, {"linf", v.second}};
    return {{"l2", l2}, {"linf", linf}, {"per_equation", per}};
  }
};

namespace detail {

// First and second space derivatives of both theta components (totals).
struct ThetaDerivs {
  std::vector<double> t1, t2;      // total values
  std::vector<double> d1t1, d1t2;  // first derivatives
  std::vector<double> d2t1, d2t2;  // second derivatives
};

inline ThetaDerivs differentiate(const ThetaField& f) {
  f.validate();
  DerivativeOp op(f.grid);
  ThetaDerivs d;
  d.t1 = f.theta1_total();
  d.t2 = f.theta2_total();
  d.d1t1 = op.d1(f.theta1);
  d.d2t1 = op.d2(f.theta1);
  d.d1t2 = op.d1(f.theta2);
  d.d2t2 = op.d2(f.theta2);
  const int n = f.grid.n;
  if (f.carrier1)
    for (int i = 0; i < n; ++i) {
      d.d1t1[i] += f.carrier1->d1[i];
      d.d2t1[i] += f.carrier1->d2[i];
    }
  if (f.carrier2)
    for (int i = 0; i < n; ++i) {
      d.d1t2[i] += f.carrier2->d1[i];
      d.d2t2[i] += f.carrier2->d2[i];
    }
  return d;
}

// Residual norms; Dirichlet grids skip the one-sided closure rows.
inline std::pair<double, double> norms(const Grid1D& grid, std::span<const double> r) {
  const int skip = grid.boundary == Boundary::Dirichlet ? 2 : 0;
  double sum2 = 0.0, mx = 0.0;
  for (int i = skip; i < grid.n - skip; ++i) {
    sum2 += r[i] * r[i];
    mx = std::max(mx, std::abs(r[i]));
  }
  return {std::sqrt(grid.dx() * sum2), mx};
}

inline void merge(ResidualReport& rep, const std::string& name, const Grid1D& grid,
                  std::span<const double> r) {
  const auto [l2, linf] = norms(grid, r);
  rep.per_equation[name] = {l2, linf};
  rep.l2 = std::max(rep.l2, l2);
  rep.linf = std::max(rep.linf, linf);
}

}  // namespace detail

// --- decomposition ---------------------------------------------------------

inline ComplexField psi_from_theta(const ThetaField& f) {
  f.validate();
  ComplexField out{f.grid, {}};
  const auto t1 = f.theta1_total();
  const auto t2 = f.theta2_total();
  out.values.resize(f.grid.n);
  for (int i = 0; i < f.grid.n; ++i)
    out.values[i] = std::exp(std::complex<double>(t1[i], t2[i]));
  return out;
}

// psi -> (theta1, theta2) with a single left-to-right unwrapping sweep.
// Refuses when any |psi| falls below the amplitude floor.
inline ThetaField to_theta(const ComplexField& f) {
  f.grid.validate();
  const int n = f.grid.n;
  ThetaField out{f.grid, std::vector<double>(n), std::vector<double>(n), {}, {}, {}, {}};
  double prev_arg = 0.0;
  for (int i = 0; i < n; ++i) {
    const double amp = std::abs(f.values[i]);
    if (!(amp > kAmplitudeFloor))
      fail(ErrorKind::NodeEncountered,
           "amplitude below floor at grid index " + std::to_string(i));
    out.theta1[i] = std::log(amp);
    const double a = std::arg(f.values[i]);
    if (i == 0) {
      out.theta2[0] = a;
    } else {
      double delta = a - prev_arg;
      while (delta > M_PI) delta -= 2.0 * M_PI;
      while (delta <= -M_PI) delta += 2.0 * M_PI;
      out.theta2[i] = out.theta2[i - 1] + delta;
    }
    prev_arg = a;
  }
  return out;
}

// --- nonlinear functionals --------------------------------------------------

struct Functionals {
  std::vector<double> r1, r2, r3, r4, r5;
};

// R_j from a raw complex field, using discrete derivatives of psi itself:
//   div J = Im(conj(psi) lap psi),  grad rho = 2 Re(conj(psi) grad psi),
//   lap rho = 2 Re(conj(psi) lap psi) + 2 |grad psi|^2.
inline Functionals functionals(const ComplexField& f) {
  f.grid.validate();
  const int n = f.grid.n;
  for (const auto& v : f.values)
    if (!(std::abs(v) > kAmplitudeFloor))
      fail(ErrorKind::NodeEncountered, "amplitude below floor");
  DerivativeOp op(f.grid);
  const auto dpsi = op.d1(std::span<const std::complex<double>>(f.values));
  const auto ddpsi = op.d2(std::span<const std::complex<double>>(f.values));
  Functionals r;
  r.r1.resize(n);
  r.r2.resize(n);
  r.r3.resize(n);
  r.r4.resize(n);
  r.r5.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto c = std::conj(f.values[i]);
    const double rho = std::norm(f.values[i]);
    const std::complex<double> cg = c * dpsi[i];
    const std::complex<double> cl = c * ddpsi[i];
    const double J = cg.imag();
    const double grad_rho = 2.0 * cg.real();
    const double lap_rho = 2.0 * cl.real() + 2.0 * std::norm(dpsi[i]);
    r.r1[i] = cl.imag() / rho;
    r.r2[i] = lap_rho / rho;
    r.r3[i] = J * J / (rho * rho);
    r.r4[i] = J * grad_rho / (rho * rho);
    r.r5[i] = grad_rho * grad_rho / (rho * rho);
  }
  return r;
}

// Same functionals in theta form (division-free identities).
inline Functionals functionals(const detail::ThetaDerivs& d) {
  const size_t n = d.t1.size();
  Functionals r;
  r.r1.resize(n);
  r.r2.resize(n);
  r.r3.resize(n);
  r.r4.resize(n);
  r.r5.resize(n);
  for (size_t i = 0; i < n; ++i) {
    r.r1[i] = d.d2t2[i] + 2.0 * d.d1t1[i] * d.d1t2[i];
    r.r2[i] = 2.0 * d.d2t1[i] + 4.0 * d.d1t1[i] * d.d1t1[i];
    r.r3[i] = d.d1t2[i] * d.d1t2[i];
    r.r4[i] = 2.0 * d.d1t1[i] * d.d1t2[i];
    r.r5[i] = 4.0 * d.d1t1[i] * d.d1t1[i];
  }
  return r;
}

// --- residuals ---------------------------------------------------------------

// S_(nu,mu)(psi) = i dt psi - i(nu1 R1 + nu2 R2) psi - sum mu_j R_j psi - mu0 V psi,
// evaluated from a raw complex field plus caller-supplied dt_psi.
inline ResidualReport nse_residual(const ComplexField& f,
                                   std::span<const std::complex<double>> dt_psi,
                                   const NuMuParams& p, std::span<const double> V) {
  p.validate();
  const int n = f.grid.n;
  if (static_cast<int>(dt_psi.size()) != n || static_cast<int>(V.size()) != n)
    fail(ErrorKind::InvalidArgument, "dt_psi/V length mismatch");
  const Functionals r = functionals(f);
  std::vector<double> res(n);
  for (int i = 0; i < n; ++i) {
    const std::complex<double> s =
        std::complex<double>(0.0, 1.0) * dt_psi[i] -
        std::complex<double>(0.0, 1.0) * (p.nu1 * r.r1[i] + p.nu2 * r.r2[i]) * f.values[i] -
        (p.mu1 * r.r1[i] + p.mu2 * r.r2[i] + p.mu3 * r.r3[i] + p.mu4 * r.r4[i] +
         p.mu5 * r.r5[i]) *
            f.values[i] -
        p.mu0 * V[i] * f.values[i];
    res[i] = std::abs(s);
  }
  ResidualReport rep;
  detail::merge(rep, "schrodinger", f.grid, res);
  return rep;
}

// Theta-form overload: S(psi)/psi = i(AP1) - (AP2), |S| = |S/psi| e^theta1.
inline ResidualReport nse_residual(const ThetaField& f, const NuMuParams& p,
                                   std::span<const double> V) {
  p.validate();
  if (!f.dt_theta1 || !f.dt_theta2)
    fail(ErrorKind::MissingTimeDerivative, "nse_residual (theta form) needs dt channels");
  const auto d = detail::differentiate(f);
  const Functionals r = functionals(d);
  const int n = f.grid.n;
  if (static_cast<int>(V.size()) != n) fail(ErrorKind::InvalidArgument, "V length mismatch");
  std::vector<double> res(n);
  for (int i = 0; i < n; ++i) {
    const double ap1 = (*f.dt_theta1)[i] - p.nu1 * r.r1[i] - p.nu2 * r.r2[i];
    const double ap2 = (*f.dt_theta2)[i] + p.mu1 * r.r1[i] + p.mu2 * r.r2[i] +
                       p.mu3 * r.r3[i] + p.mu4 * r.r4[i] + p.mu5 * r.r5[i] + p.mu0 * V[i];
    res[i] = std::hypot(ap1, ap2) * std::exp(d.t1[i]);
  }
  ResidualReport rep;
  detail::merge(rep, "schrodinger", f.grid, res);
  return rep;
}

// Amplitude/phase residual in the general (nu, mu) form.
inline ResidualReport ap_residual(const ThetaField& f, const NuMuParams& p,
                                  std::span<const double> V) {
  p.validate();
  if (!f.dt_theta1 || !f.dt_theta2)
    fail(ErrorKind::MissingTimeDerivative, "ap_residual needs dt channels");
  const int n = f.grid.n;
  if (static_cast<int>(V.size()) != n) fail(ErrorKind::InvalidArgument, "V length mismatch");
  const auto d = detail::differentiate(f);
  std::vector<double> res1(n), res2(n);
  for (int i = 0; i < n; ++i) {
    const double g1 = d.d1t1[i], g2 = d.d1t2[i], l1 = d.d2t1[i], l2 = d.d2t2[i];
    res1[i] = (*f.dt_theta1)[i] - 2.0 * p.nu2 * l1 - p.nu1 * l2 - 4.0 * p.nu2 * g1 * g1 -
              2.0 * p.nu1 * g1 * g2;
    res2[i] = (*f.dt_theta2)[i] + 2.0 * p.mu2 * l1 + p.mu1 * l2 +
              4.0 * (p.mu2 + p.mu5) * g1 * g1 + 2.0 * (p.mu1 + p.mu4) * g1 * g2 +
              p.mu3 * g2 * g2 + p.mu0 * V[i];
  }
  ResidualReport rep;
  detail::merge(rep, "amplitude", f.grid, res1);
  detail::merge(rep, "phase", f.grid, res2);
  return rep;
}

// Gauge-fixed (nu1 = 1, mu1 = 0) amplitude/phase residual, assembled
// directly from the invariants. Independent of the (nu, mu) route above.
inline ResidualReport ap_residual(const ThetaField& f, const Invariants& v,
                                  std::span<const double> V) {
  if (!f.dt_theta1 || !f.dt_theta2)
    fail(ErrorKind::MissingTimeDerivative, "ap_residual needs dt channels");
  const int n = f.grid.n;
  if (static_cast<int>(V.size()) != n) fail(ErrorKind::InvalidArgument, "V length mismatch");
  const auto d = detail::differentiate(f);
  const double K =
      2.0 * v.i5 + 2.0 * v.i1 - 2.0 * v.i4 * v.i2 - v.i2 * v.i2 * (v.i3 - 1.0);
  std::vector<double> res1(n), res2(n);
  for (int i = 0; i < n; ++i) {
    const double g1 = d.d1t1[i], g2 = d.d1t2[i], l1 = d.d2t1[i], l2 = d.d2t2[i];
    res1[i] = (*f.dt_theta1)[i] -
              (-v.i2 * l1 + l2 - 2.0 * v.i2 * g1 * g1 + 2.0 * g1 * g2);
    res2[i] = (*f.dt_theta2)[i] -
              (-2.0 * v.i1 * l1 - K * g1 * g1 - 2.0 * v.i4 * g1 * g2 -
               (v.i3 - 1.0) * g2 * g2 - v.i0 * V[i]);
  }
  ResidualReport rep;
  detail::merge(rep, "amplitude", f.grid, res1);
  detail::merge(rep, "phase", f.grid, res2);
  return rep;
}

// --- gauge pushforward -------------------------------------------------------

// N_A in theta form: theta1' = theta1, theta2' = gamma theta1 + Lambda theta2.
// Carriers and dt channels transform by the same linear map.
inline ThetaField push_gauge(const ThetaField& f, const GaugeElement& a) {
  a.validate();
  f.validate();
  ThetaField out = f;
  const int n = f.grid.n;
  for (int i = 0; i < n; ++i)
    out.theta2[i] = a.gamma * f.theta1[i] + a.Lambda * f.theta2[i];
  if (f.carrier1 || f.carrier2) {
    Carrier c2;
    c2.value.assign(n, 0.0);
    c2.d1.assign(n, 0.0);
    c2.d2.assign(n, 0.0);
    auto add = [&](const std::optional<Carrier>& c, double w) {
      if (!c || w == 0.0) return;
      for (int i = 0; i < n; ++i) {
        c2.value[i] += w * c->value[i];
        c2.d1[i] += w * c->d1[i];
        c2.d2[i] += w * c->d2[i];
      }
    };
    add(f.carrier1, a.gamma);
    add(f.carrier2, a.Lambda);
    out.carrier2 = std::move(c2);
  }
  if (f.dt_theta1 && f.dt_theta2) {
    std::vector<double> dt2(n);
    for (int i = 0; i < n; ++i)
      dt2[i] = a.gamma * (*f.dt_theta1)[i] + a.Lambda * (*f.dt_theta2)[i];
    out.dt_theta2 = std::move(dt2);
  }
  return out;
}

inline ComplexField push_gauge(const ComplexField& f, const GaugeElement& a) {
  return psi_from_theta(push_gauge(to_theta(f), a));
}

// --- CSV ----------------------------------------------------------------------

// Field dump: x,theta1,theta2,re_psi,im_psi,rho rows at 17 significant
// digits; dt columns appended when the side channel is present.
inline std::string field_to_csv(const ThetaField& f) {
  f.validate();
  const bool with_dt = f.dt_theta1 && f.dt_theta2;
  std::string out = "x,theta1,theta2,re_psi,im_psi,rho";
  if (with_dt) out += ",dt_theta1,dt_theta2";
  out += '\n';
  const auto t1 = f.theta1_total();
  const auto t2 = f.theta2_total();
  for (int i = 0; i < f.grid.n; ++i) {
    const std::complex<double> psi = std::exp(std::complex<double>(t1[i], t2[i]));
    std::vector<double> row{f.grid.x(i), t1[i], t2[i], psi.real(), psi.imag(),
                            std::norm(psi)};
    if (with_dt) {
      row.push_back((*f.dt_theta1)[i]);
      row.push_back((*f.dt_theta2)[i]);
    }
    out += csv_row(row);
  }
  return out;
}

inline ThetaField field_from_csv(const std::string& csv, Boundary boundary) {
  std::stringstream ss(csv);
  std::string line;
  if (!std::getline(ss, line)) fail(ErrorKind::Io, "empty field CSV");
  const auto header = split_csv_line(line);
  if (header.size() < 6 || header[0] != "x")
    fail(ErrorKind::Io, "unexpected field CSV header");
  const bool with_dt = header.size() >= 8 && header[6] == "dt_theta1";
  std::vector<double> xs, t1, t2, dt1, dt2;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < header.size()) fail(ErrorKind::Io, "short field CSV row");
    xs.push_back(std::stod(cells[0]));
    t1.push_back(std::stod(cells[1]));
    t2.push_back(std::stod(cells[2]));
    if (with_dt) {
      dt1.push_back(std::stod(cells[6]));
      dt2.push_back(std::stod(cells[7]));
    }
  }
  const int n = static_cast<int>(xs.size());
  if (n < 8) fail(ErrorKind::Io, "field CSV needs at least 8 rows");
  const double dx = xs[1] - xs[0];
  Grid1D grid;
  grid.x_min = xs.front();
  grid.n = n;
  grid.boundary = boundary;
  grid.x_max = boundary == Boundary::Periodic ? xs.front() + n * dx : xs.back();
  ThetaField f{grid, std::move(t1), std::move(t2), {}, {}, {}, {}};
  if (with_dt) {
    f.dt_theta1 = std::move(dt1);
    f.dt_theta2 = std::move(dt2);
  }
  f.validate();
  return f;
}

// Sampled potentials.
inline std::vector<double> harmonic_potential(const Grid1D& grid, double kappa) {
  std::vector<double> V(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    V[i] = 0.5 * kappa * x * x;
  }
  return V;
}

inline std::vector<double> zero_potential(const Grid1D& grid) {
  return std::vector<double>(grid.n, 0.0);
}

}  // namespace dg
