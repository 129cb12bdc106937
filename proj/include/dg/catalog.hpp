#pragma once

// Closed-form solution families of the gauge-fixed (nu1 = 1, mu1 = 0)
// amplitude/phase system. Every constructor returns an AnalyticSolution
// whose evaluator yields theta values together with analytic space and time
// derivatives, so sampled fields carry full side channels and residual
// checks are meaningful at machine precision.
//
// Stationary solutions follow the ansatz theta2 = i2*theta1 - omega*t; the
// boost combinator turns free stationary solutions into traveling ones when
// the friction combination i2*i3 + i4 vanishes.

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dg/error.hpp"
#include "dg/fields.hpp"
#include "dg/params.hpp"
#include "dg/quadrature.hpp"

namespace dg {

enum class SolutionFamily {
  PlaneWave,
  LinearizedStationary,
  HOGroundState,
  EikonalStationary,
  PoissonStationary,
  FreeInvariantStationary,
  CoshSoliton,
  GaussianSoliton,
  ArbitraryProfileSoliton,
  BoostedStationary,
};

inline const char* family_name(SolutionFamily f) {
  switch (f) {
    case SolutionFamily::PlaneWave: return "plane_wave";
    case SolutionFamily::LinearizedStationary: return "linearized_stationary";
    case SolutionFamily::HOGroundState: return "ho_ground_state";
    case SolutionFamily::EikonalStationary: return "eikonal_stationary";
    case SolutionFamily::PoissonStationary: return "poisson_stationary";
    case SolutionFamily::FreeInvariantStationary: return "free_invariant_stationary";
    case SolutionFamily::CoshSoliton: return "cosh_soliton";
    case SolutionFamily::GaussianSoliton: return "gaussian_soliton";
    case SolutionFamily::ArbitraryProfileSoliton: return "arbitrary_profile_soliton";
    case SolutionFamily::BoostedStationary: return "boosted_stationary";
  }
  return "?";
}

// Pointwise state of a solution: values, space derivatives, time derivatives.
struct SolutionPoint {
  double t1 = 0.0, t2 = 0.0;
  double dx_t1 = 0.0, dx_t2 = 0.0;
  double dxx_t1 = 0.0, dxx_t2 = 0.0;
  double dt_t1 = 0.0, dt_t2 = 0.0;
};

struct AnalyticSolution {
  SolutionFamily family = SolutionFamily::PlaneWave;
  Invariants inv;
  double omega = 0.0;             // frequency of the stationary phase, if any
  double kappa = 0.0;             // harmonic spring constant (0 = free)
  bool square_integrable = false;
  bool free_stationary = false;   // admissible input for boost()
  std::function<SolutionPoint(double x, double t)> eval;
};

// Smooth profile with two derivatives, for the arbitrary-theta1 families.
struct Profile {
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

// Potential with one derivative, for the eikonal quadrature family.
struct Potential {
  std::function<double(double)> v;
  std::function<double(double)> d1;
};

namespace detail {

inline bool square_integrable_estimate(const std::function<double(double)>& theta1) {
  auto rho = [&](double x) { return std::exp(2.0 * theta1(x)); };
  const double i2 = adaptive_simpson(rho, -16.0, 16.0, 1e-8);
  if (!std::isfinite(i2) || i2 > 1e20) return false;
  const double i3 = adaptive_simpson(rho, -32.0, 32.0, 1e-8);
  if (!std::isfinite(i3) || i3 > 1e20) return false;
  return std::abs(i3 - i2) <= 1e-6 * std::abs(i2) + 1e-10;
}

}  // namespace detail

// Sample a solution onto a grid at time t. The analytic values become the
// carrier, the remainder is zero, and the dt side channel is attached.
inline ThetaField sample(const AnalyticSolution& sol, const Grid1D& grid, double t) {
  grid.validate();
  const int n = grid.n;
  ThetaField f{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               Carrier{}, Carrier{}, std::vector<double>(n), std::vector<double>(n)};
  f.carrier1->value.resize(n);
  f.carrier1->d1.resize(n);
  f.carrier1->d2.resize(n);
  f.carrier2->value.resize(n);
  f.carrier2->d1.resize(n);
  f.carrier2->d2.resize(n);
  for (int i = 0; i < n; ++i) {
    const SolutionPoint p = sol.eval(grid.x(i), t);
    f.carrier1->value[i] = p.t1;
    f.carrier1->d1[i] = p.dx_t1;
    f.carrier1->d2[i] = p.dxx_t1;
    f.carrier2->value[i] = p.t2;
    f.carrier2->d1[i] = p.dx_t2;
    f.carrier2->d2[i] = p.dxx_t2;
    (*f.dt_theta1)[i] = p.dt_t1;
    (*f.dt_theta2)[i] = p.dt_t2;
  }
  return f;
}

// --- families ----------------------------------------------------------------

// theta1 = 0, theta2 = k x + omega t with omega = (1 - i3) k^2. The phase
// equation fixes dt theta2 = +omega; V must vanish.
inline AnalyticSolution plane_wave(const Invariants& inv, double k) {
  AnalyticSolution sol;
  sol.family = SolutionFamily::PlaneWave;
  sol.inv = inv;
  sol.omega = (1.0 - inv.i3) * k * k;
  sol.square_integrable = false;
  sol.free_stationary = false;  // theta1 const is stationary but boost adds nothing
  const double omega = sol.omega;
  sol.eval = [k, omega](double x, double t) {
    SolutionPoint p;
    p.t2 = k * x + omega * t;
    p.dx_t2 = k;
    p.dt_t2 = omega;
    return p;
  };
  return sol;
}

// Ground state of the harmonic oscillator, the benchmark stationary state:
// theta1 = -(W/4) x^2, theta2 = i2 theta1 - omega t, W = sqrt(-kappa i0/(i1+i5)),
// omega = -i1 W (from the stationary phase equation).
inline AnalyticSolution ho_ground_state(const Invariants& inv, double kappa) {
  if (!(kappa > 0.0)) fail(ErrorKind::InvalidRegime, "ho_ground_state needs kappa > 0");
  if (!(inv.i0 * (inv.i1 + inv.i5) < 0.0))
    fail(ErrorKind::InvalidRegime, "ho_ground_state needs i0 (i1 + i5) < 0");
  const double W = std::sqrt(-kappa * inv.i0 / (inv.i1 + inv.i5));
  AnalyticSolution sol;
  sol.family = SolutionFamily::HOGroundState;
  sol.inv = inv;
  sol.kappa = kappa;
  sol.omega = -inv.i1 * W;
  sol.square_integrable = true;
  sol.free_stationary = false;  // V != 0
  const double i2 = inv.i2, omega = sol.omega;
  sol.eval = [W, i2, omega](double x, double t) {
    SolutionPoint p;
    p.t1 = -0.25 * W * x * x;
    p.dx_t1 = -0.5 * W * x;
    p.dxx_t1 = -0.5 * W;
    p.t2 = i2 * p.t1 - omega * t;
    p.dx_t2 = i2 * p.dx_t1;
    p.dxx_t2 = i2 * p.dxx_t1;
    p.dt_t2 = -omega;
    return p;
  };
  return sol;
}

// Stationary solutions built from the auxiliary linear problem. Harmonic
// analytic path: phi is the Gaussian ground state of
//   -alpha phi'' + (kappa/2) x^2 phi = E phi,  alpha = -2 i1^2/(i0 (i1+i5)).
// Only the nodeless mode admits the fractional power phi^(i1/(i1+i5)).
inline AnalyticSolution linearized_stationary(const Invariants& inv, double kappa,
                                              int mode_index = 0) {
  if (inv.i1 == 0.0 || inv.i1 + inv.i5 == 0.0)
    fail(ErrorKind::InvalidRegime, "linearized_stationary needs i1 != 0 != i1 + i5");
  if (!(inv.i0 * (inv.i1 + inv.i5) < 0.0))
    fail(ErrorKind::InvalidRegime, "linearized_stationary needs i0 (i1 + i5) < 0");
  if (!(kappa > 0.0)) fail(ErrorKind::InvalidRegime, "harmonic path needs kappa > 0");
  if (mode_index != 0)
    fail(ErrorKind::NodefulMode, "excited modes have nodes; fractional power undefined");
  const double alpha = -2.0 * inv.i1 * inv.i1 / (inv.i0 * (inv.i1 + inv.i5));
  const double b = std::sqrt(kappa / (8.0 * alpha));  // phi = exp(-b x^2)
  const double energy = 2.0 * alpha * b;
  const double beta = inv.i1 / (inv.i1 + inv.i5);     // theta1 = beta ln phi
  AnalyticSolution sol;
  sol.family = SolutionFamily::LinearizedStationary;
  sol.inv = inv;
  sol.kappa = kappa;
  sol.omega = inv.i0 * energy;
  sol.square_integrable = beta > 0.0;
  sol.free_stationary = false;
  const double a1 = -beta * b;  // theta1 = a1 x^2
  const double i2 = inv.i2, omega = sol.omega;
  sol.eval = [a1, i2, omega](double x, double t) {
    SolutionPoint p;
    p.t1 = a1 * x * x;
    p.dx_t1 = 2.0 * a1 * x;
    p.dxx_t1 = 2.0 * a1;
    p.t2 = i2 * p.t1 - omega * t;
    p.dx_t2 = i2 * p.dx_t1;
    p.dxx_t2 = i2 * p.dxx_t1;
    p.dt_t2 = -omega;
    return p;
  };
  return sol;
}

// Numeric route for general potentials: dense symmetric tridiagonal
// eigensolve of the auxiliary problem on a Dirichlet grid. Declared here,
// defined in catalog_numeric.hpp (pulls in LAPACKE).
struct NumericStationary {
  ThetaField field;   // raw arrays (second-order accurate, no carrier)
  double omega = 0.0;
  double energy = 0.0;
};
NumericStationary linearized_stationary_numeric(const Invariants& inv,
                                                const Potential& V, const Grid1D& grid,
                                                int mode_index);

// i1 = 0 != i5, free case: theta1 = k x, omega = 2 i5 k^2, phase slope
// (1 + i i2) k per Eq. (sol_stat3).
inline AnalyticSolution eikonal_free(const Invariants& inv, double k) {
  if (!(inv.i1 == 0.0) || inv.i5 == 0.0)
    fail(ErrorKind::InvalidRegime, "eikonal family needs i1 = 0 != i5");
  AnalyticSolution sol;
  sol.family = SolutionFamily::EikonalStationary;
  sol.inv = inv;
  sol.omega = 2.0 * inv.i5 * k * k;
  sol.square_integrable = false;
  sol.free_stationary = true;
  const double i2 = inv.i2, omega = sol.omega;
  sol.eval = [k, i2, omega](double x, double t) {
    SolutionPoint p;
    p.t1 = k * x;
    p.dx_t1 = k;
    p.t2 = i2 * p.t1 - omega * t;
    p.dx_t2 = i2 * k;
    p.dt_t2 = -omega;
    return p;
  };
  return sol;
}

// i1 = 0 != i5 with a bounded potential: theta1 by quadrature of
// sqrt((C1 - i0 V)/(2 i5)), omega = C1.
inline AnalyticSolution eikonal_stationary(const Invariants& inv, const Potential& V,
                                           double C1) {
  if (!(inv.i1 == 0.0) || inv.i5 == 0.0)
    fail(ErrorKind::InvalidRegime, "eikonal family needs i1 = 0 != i5");
  AnalyticSolution sol;
  sol.family = SolutionFamily::EikonalStationary;
  sol.inv = inv;
  sol.omega = C1;
  sol.square_integrable = false;
  sol.free_stationary = true;
  const double i0 = inv.i0, i5 = inv.i5, i2 = inv.i2;
  auto radicand = [i0, i5, C1, V](double x) {
    const double g = (C1 - i0 * V.v(x)) / (2.0 * i5);
    if (g < 0.0)
      fail(ErrorKind::NegativeRadicand, "eikonal radicand negative at x=" + format_g17(x));
    return g;
  };
  auto slope = [radicand](double x) { return std::sqrt(radicand(x)); };
  const double omega = C1;
  sol.eval = [slope, radicand, V, i0, i5, i2, omega](double x, double t) {
    SolutionPoint p;
    p.t1 = adaptive_simpson(slope, 0.0, x, 1e-12);
    p.dx_t1 = slope(x);
    const double g = radicand(x);
    const double gp = -i0 * V.d1(x) / (2.0 * i5);
    p.dxx_t1 = g > 0.0 ? gp / (2.0 * std::sqrt(g)) : 0.0;
    p.t2 = i2 * p.t1 - omega * t;
    p.dx_t2 = i2 * p.dx_t1;
    p.dxx_t2 = i2 * p.dxx_t1;
    p.dt_t2 = -omega;
    return p;
  };
  return sol;
}

// i1 + i5 = 0 != i1, free case: theta1 = eta x^2 + k x, omega = 4 i1 eta.
// Square integrable exactly when eta < 0.
inline AnalyticSolution poisson_stationary(const Invariants& inv, double eta, double k) {
  if (!(inv.i1 + inv.i5 == 0.0) || inv.i1 == 0.0)
    fail(ErrorKind::InvalidRegime, "poisson family needs i1 + i5 = 0 != i1");
  AnalyticSolution sol;
  sol.family = SolutionFamily::PoissonStationary;
  sol.inv = inv;
  sol.omega = 4.0 * inv.i1 * eta;
  sol.square_integrable = eta < 0.0;
  sol.free_stationary = true;
  const double i2 = inv.i2, omega = sol.omega;
  sol.eval = [eta, k, i2, omega](double x, double t) {
    SolutionPoint p;
    p.t1 = eta * x * x + k * x;
    p.dx_t1 = 2.0 * eta * x + k;
    p.dxx_t1 = 2.0 * eta;
    p.t2 = i2 * p.t1 - omega * t;
    p.dx_t2 = i2 * p.dx_t1;
    p.dxx_t2 = i2 * p.dxx_t1;
    p.dt_t2 = -omega;
    return p;
  };
  return sol;
}

// i1 = 0 = i5, free case: any theta1 profile solves the phase equation with
// omega = 0; psi = psi0 exp((1 + i i2) theta1).
inline AnalyticSolution free_invariant_stationary(const Invariants& inv,
                                                  const Profile& profile) {
  if (!(inv.i1 == 0.0 && inv.i5 == 0.0))
    fail(ErrorKind::InvalidRegime, "free-invariant family needs i1 = 0 = i5");
  AnalyticSolution sol;
  sol.family = SolutionFamily::FreeInvariantStationary;
  sol.inv = inv;
  sol.omega = 0.0;
  sol.square_integrable = detail::square_integrable_estimate(profile.f);
  sol.free_stationary = true;
  const double i2 = inv.i2;
  sol.eval = [profile, i2](double x, double /*t*/) {
    SolutionPoint p;
    p.t1 = profile.f(x);
    p.dx_t1 = profile.d1(x);
    p.dxx_t1 = profile.d2(x);
    p.t2 = i2 * p.t1;
    p.dx_t2 = i2 * p.dx_t1;
    p.dxx_t2 = i2 * p.dxx_t1;
    return p;
  };
  return sol;
}

// Galilei-like boost of a free stationary solution:
//   theta1~(x,t) = theta1(x - v t)
//   theta2~(x,t) = theta2(x - v t, t) - (v/2) x + (v^2/4)(1 - i3) t.
// Takes solutions to solutions exactly when i2 i3 + i4 = 0.
inline AnalyticSolution boost(const AnalyticSolution& base, double v) {
  if (v == 0.0) return base;
  if (!base.free_stationary)
    fail(ErrorKind::InvalidRegime, "boost needs a free stationary solution");
  if (std::abs(base.inv.friction()) > 1e-12)
    fail(ErrorKind::InvalidRegime, "boost needs i2 i3 + i4 = 0");
  AnalyticSolution sol = base;
  sol.family = SolutionFamily::BoostedStationary;
  sol.free_stationary = false;
  const double drift = 0.25 * v * v * (1.0 - base.inv.i3);
  auto inner = base.eval;
  sol.eval = [inner, v, drift](double x, double t) {
    SolutionPoint p = inner(x - v * t, t);
    p.dt_t1 = p.dt_t1 - v * p.dx_t1;
    p.dt_t2 = p.dt_t2 - v * p.dx_t2 + drift;
    p.t2 += -0.5 * v * x + drift * t;
    p.dx_t2 += -0.5 * v;
    return p;
  };
  return sol;
}

// Square-integrable sech-power soliton: theta1 = alpha ln cosh(k(x - v t)),
// alpha = i1/(i1 + i5) < 0, omega = 2 i1^2 k^2/(i1 + i5), plus boost phase.
inline AnalyticSolution cosh_soliton(const Invariants& inv, double k, double v) {
  if (!(inv.i1 * (inv.i1 + inv.i5) < 0.0))
    fail(ErrorKind::InvalidRegime, "cosh soliton needs i1 (i1 + i5) < 0");
  const double alpha = inv.i1 / (inv.i1 + inv.i5);
  AnalyticSolution base;
  base.family = SolutionFamily::CoshSoliton;
  base.inv = inv;
  base.omega = 2.0 * inv.i1 * alpha * k * k;
  base.square_integrable = true;  // alpha < 0 by the regime condition
  base.free_stationary = true;
  const double i2 = inv.i2, omega = base.omega;
  base.eval = [alpha, k, i2, omega](double x, double t) {
    SolutionPoint p;
    const double T = std::tanh(k * x);
    p.t1 = alpha * std::log(std::cosh(k * x));
    p.dx_t1 = alpha * k * T;
    p.dxx_t1 = alpha * k * k * (1.0 - T * T);
    p.t2 = i2 * p.t1 - omega * t;
    p.dx_t2 = i2 * p.dx_t1;
    p.dxx_t2 = i2 * p.dxx_t1;
    p.dt_t2 = -omega;
    return p;
  };
  if (v == 0.0) return base;
  AnalyticSolution sol = boost(base, v);
  sol.family = SolutionFamily::CoshSoliton;
  return sol;
}

// Rigid Gaussian solitary wave: boosted Poisson-family Gaussian (kappa = 0
// constant-width condition forces i1 + i5 = 0).
inline AnalyticSolution gaussian_soliton(const Invariants& inv, double eta, double k,
                                         double v) {
  AnalyticSolution sol = boost(poisson_stationary(inv, eta, k), v);
  sol.family = SolutionFamily::GaussianSoliton;
  return sol;
}

// Three-parameter family i1 = i5 = 0, i2 i3 + i4 = 0: solitary waves with
// arbitrary profile.
inline AnalyticSolution arbitrary_profile_soliton(const Invariants& inv,
                                                  const Profile& profile, double v) {
  if (!(inv.i1 == 0.0 && inv.i5 == 0.0))
    fail(ErrorKind::InvalidRegime, "arbitrary-profile family needs i1 = 0 = i5");
  if (std::abs(inv.friction()) > 1e-12)
    fail(ErrorKind::InvalidRegime, "arbitrary-profile family needs i2 i3 + i4 = 0");
  AnalyticSolution sol = boost(free_invariant_stationary(inv, profile), v);
  sol.family = SolutionFamily::ArbitraryProfileSoliton;
  return sol;
}

// --- named profiles and potentials (CLI surface) ------------------------------

inline Profile make_profile(const std::string& type, double a) {
  if (type == "quadratic")  // theta1 = -a x^2
    return {[a](double x) { return -a * x * x; },
            [a](double x) { return -2.0 * a * x; },
            [a](double) { return -2.0 * a; }};
  if (type == "quartic")  // theta1 = -a x^4
    return {[a](double x) { return -a * x * x * x * x; },
            [a](double x) { return -4.0 * a * x * x * x; },
            [a](double x) { return -12.0 * a * x * x; }};
  if (type == "neg_cosh")  // theta1 = -a cosh x
    return {[a](double x) { return -a * std::cosh(x); },
            [a](double x) { return -a * std::sinh(x); },
            [a](double x) { return -a * std::cosh(x); }};
  fail(ErrorKind::InvalidArgument, "unknown profile type: " + type);
}

inline Potential make_potential(const std::string& type, double amplitude, double scale) {
  if (type == "cosine")  // V = amplitude cos(scale x), bounded
    return {[amplitude, scale](double x) { return amplitude * std::cos(scale * x); },
            [amplitude, scale](double x) { return -amplitude * scale * std::sin(scale * x); }};
  if (type == "sech2")  // V = amplitude / cosh^2(scale x), bounded
    return {[amplitude, scale](double x) {
              const double c = std::cosh(scale * x);
              return amplitude / (c * c);
            },
            [amplitude, scale](double x) {
              const double c = std::cosh(scale * x);
              return -2.0 * amplitude * scale * std::tanh(scale * x) / (c * c);
            }};
  if (type == "harmonic")  // V = (amplitude/2) x^2
    return {[amplitude](double x) { return 0.5 * amplitude * x * x; },
            [amplitude](double x) { return amplitude * x; }};
  fail(ErrorKind::InvalidArgument, "unknown potential type: " + type);
}

// JSON solution spec, e.g. {"family":"cosh_soliton","invariants":[...],
// "k":1,"v":1}. Family-specific extras as documented in the README.
inline AnalyticSolution make_solution(const nlohmann::json& j) {
  const std::string fam = j.at("family").get<std::string>();
  auto iv = j.at("invariants");
  if (iv.size() != 6) fail(ErrorKind::InvalidArgument, "expected invariants[6]");
  std::array<double, 6> a;
  for (int i = 0; i < 6; ++i) a[i] = iv[i].get<double>();
  const Invariants inv = Invariants::from_array(a);
  auto profile_of = [&](const nlohmann::json& spec) {
    return make_profile(spec.at("type").get<std::string>(), spec.value("a", 1.0));
  };
  if (fam == "plane_wave") return plane_wave(inv, j.at("k").get<double>());
  if (fam == "ho_ground_state") return ho_ground_state(inv, j.at("kappa").get<double>());
  if (fam == "linearized_stationary")
    return linearized_stationary(inv, j.at("kappa").get<double>(), j.value("mode", 0));
  if (fam == "eikonal_stationary") {
    if (j.contains("potential")) {
      const auto& pj = j.at("potential");
      return eikonal_stationary(inv,
                                make_potential(pj.at("type").get<std::string>(),
                                               pj.value("amplitude", 1.0),
                                               pj.value("scale", 1.0)),
                                j.at("C1").get<double>());
    }
    return eikonal_free(inv, j.at("k").get<double>());
  }
  if (fam == "poisson_stationary")
    return poisson_stationary(inv, j.at("eta").get<double>(), j.value("k", 0.0));
  if (fam == "free_invariant_stationary")
    return free_invariant_stationary(inv, profile_of(j.at("profile")));
  if (fam == "cosh_soliton")
    return cosh_soliton(inv, j.at("k").get<double>(), j.value("v", 0.0));
  if (fam == "gaussian_soliton")
    return gaussian_soliton(inv, j.at("eta").get<double>(), j.value("k", 0.0),
                            j.value("v", 0.0));
  if (fam == "arbitrary_profile_soliton")
    return arbitrary_profile_soliton(inv, profile_of(j.at("profile")),
                                     j.value("v", 0.0));
  if (fam == "boosted_stationary") {
    nlohmann::json base = j.at("base");
    base["invariants"] = j.at("invariants");
    return boost(make_solution(base), j.at("v").get<double>());
  }
  fail(ErrorKind::InvalidArgument, "unknown solution family: " + fam);
}

}  // namespace dg
