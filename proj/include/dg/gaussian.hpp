#pragma once

// Gaussian wavepacket moment dynamics: the second-order ODEs for width
// sigma(t) and center s(t), the q = sigma^(1-i3) substitution with its
// Newtonian potential/friction picture, asymptotic classification, and the
// reconstruction of the full theta field
//   theta1 = -(x-s)^2/(2 sigma^2) - ln(sigma)/2
//   theta2 = i0 (A x^2 + B x + C)
// with A, B fixed by power matching in the amplitude equation and C by
// quadrature of the phase equation's x^0 component.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dg/error.hpp"
#include "dg/fields.hpp"
#include "dg/params.hpp"

namespace dg {

struct GaussianState {
  double t = 0.0;
  double sigma = 1.0;
  double dsigma = 0.0;
  double s = 0.0;
  double ds = 0.0;
};

// sigma'' and s'' of the reduced moment equations.
struct MomentAccel {
  double ddsigma = 0.0;
  double dds = 0.0;
};

inline MomentAccel sigma_rhs(const GaussianState& st, const Invariants& v, double kappa) {
  if (!(st.sigma > 0.0)) fail(ErrorKind::NonpositiveWidth, "sigma must stay positive");
  const double f = v.friction();
  const double sg = st.sigma, dsg = st.dsigma;
  MomentAccel a;
  a.ddsigma = v.i3 * dsg * dsg / sg + 4.0 * f * dsg / (sg * sg) +
              8.0 * (v.i1 + v.i5) / (sg * sg * sg) + 2.0 * kappa * v.i0 * sg;
  a.dds = (v.i3 * dsg / sg + 2.0 * f / (sg * sg)) * st.ds + 2.0 * kappa * v.i0 * st.s;
  return a;
}

// q-substitution form, valid for i3 != 1.
inline double q_form_rhs(double q, double dq, const Invariants& v, double kappa) {
  if (v.i3 == 1.0) fail(ErrorKind::InvalidRegime, "q form undefined at i3 = 1");
  if (!(q > 0.0)) fail(ErrorKind::NonpositiveQ, "q must stay positive");
  const double f = v.friction();
  return 4.0 * f * std::pow(q, 2.0 / (v.i3 - 1.0)) * dq -
         8.0 * (v.i1 + v.i5) * (v.i3 - 1.0) * std::pow(q, (v.i3 + 3.0) / (v.i3 - 1.0)) -
         2.0 * kappa * v.i0 * (v.i3 - 1.0) * q;
}

// Newtonian picture of the q and s equations: q'' = -U_q'(q) + F_q(q, q'),
// s'' = -U_s'(s) + F_s(s') with U_s(s) = u_s_coeff s^2 and F_s = f_s_coeff s'.
// Branch selection on i3 is by exact comparison.
struct NewtonianPicture {
  double U_q = 0.0;
  double F_q = 0.0;
  double u_s_coeff = 0.0;   // U_s(s) = u_s_coeff * s^2
  double f_s_coeff = 0.0;   // F_s(s') = f_s_coeff * s'
};

inline NewtonianPicture potential_and_friction(double q, double dq, const Invariants& v,
                                               double kappa) {
  if (v.i3 == 1.0) fail(ErrorKind::InvalidRegime, "q form undefined at i3 = 1");
  if (!(q > 0.0)) fail(ErrorKind::NonpositiveQ, "q must stay positive");
  const double f = v.friction();
  const double s15 = v.i1 + v.i5;
  NewtonianPicture out;
  if (v.i3 == -3.0) {
    out.U_q = -32.0 * s15 * q - 4.0 * kappa * v.i0 * q * q;
  } else if (v.i3 == -1.0) {
    out.U_q = -16.0 * s15 * std::log(q) - 2.0 * kappa * v.i0 * q * q;
  } else {
    out.U_q = 4.0 * s15 * (v.i3 - 1.0) * (v.i3 - 1.0) / (v.i3 + 1.0) *
                  std::pow(q, 2.0 * (v.i3 + 1.0) / (v.i3 - 1.0)) +
              kappa * v.i0 * (v.i3 - 1.0) * q * q;
  }
  out.F_q = 4.0 * f * std::pow(q, 2.0 / (v.i3 - 1.0)) * dq;
  out.u_s_coeff = -kappa * v.i0;
  out.f_s_coeff = 2.0 * f * std::pow(q, 2.0 / (v.i3 - 1.0)) -
                  v.i3 / (v.i3 - 1.0) * dq / q;
  return out;
}

// --- integration ---------------------------------------------------------------

enum class StopReason { Completed, Collapse, Spread };

struct Trajectory {
  std::vector<GaussianState> states;
  StopReason reason = StopReason::Completed;
};

inline constexpr double kCollapseThreshold = 1e-8;
inline constexpr double kSpreadThreshold = 1e8;

// Classic fixed-step RK4. Terminates early when sigma crosses the collapse
// or spread thresholds; a >50% single-step change in sigma is an error
// (reduce dt).
inline Trajectory integrate(const GaussianState& initial, const Invariants& v,
                            double kappa, double t_end, double dt, int record_every = 1) {
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(initial.sigma > 0.0)) fail(ErrorKind::NonpositiveWidth, "initial sigma <= 0");
  if (record_every < 1) fail(ErrorKind::InvalidArgument, "record_every must be >= 1");
  Trajectory traj;
  GaussianState st = initial;
  traj.states.push_back(st);
  const long steps = std::lround(t_end / dt);
  auto deriv = [&](const GaussianState& y) {
    const MomentAccel a = sigma_rhs(y, v, kappa);
    return std::array<double, 4>{y.dsigma, a.ddsigma, y.ds, a.dds};
  };
  for (long step = 0; step < steps; ++step) {
    const auto k1 = deriv(st);
    auto at = [&](const std::array<double, 4>& k, double h) {
      GaussianState y = st;
      y.sigma += h * k[0];
      y.dsigma += h * k[1];
      y.s += h * k[2];
      y.ds += h * k[3];
      if (!(y.sigma > 0.0))
        fail(ErrorKind::NonpositiveWidth,
             "sigma went nonpositive at t=" + format_g17(st.t));
      return y;
    };
    const auto k2 = deriv(at(k1, 0.5 * dt));
    const auto k3 = deriv(at(k2, 0.5 * dt));
    const auto k4 = deriv(at(k3, dt));
    GaussianState next = st;
    next.t = initial.t + (step + 1) * dt;
    next.sigma += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    next.dsigma += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    next.s += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    next.ds += dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]);
    if (next.sigma < kCollapseThreshold) {
      traj.states.push_back(next);
      traj.reason = StopReason::Collapse;
      return traj;
    }
    if (next.sigma > kSpreadThreshold) {
      traj.states.push_back(next);
      traj.reason = StopReason::Spread;
      return traj;
    }
    if (std::abs(next.sigma - st.sigma) > 0.5 * st.sigma)
      fail(ErrorKind::StepSizeTooLarge,
           "sigma changed by more than 50% in one step at t=" + format_g17(next.t));
    st = next;
    if ((step + 1) % record_every == 0 || step + 1 == steps) traj.states.push_back(st);
  }
  return traj;
}

// --- phase reconstruction --------------------------------------------------------

struct PhaseCoefficients {
  double A = 0.0, B = 0.0, C = 0.0;
  double Adot = 0.0, Bdot = 0.0, Cdot = 0.0;
};

// A and B follow from matching x^2 and x^1 in the amplitude equation; their
// time derivatives use the moment accelerations; Cdot is the x^0 component
// of the phase equation.
inline PhaseCoefficients phase_coefficients(const GaussianState& st, const Invariants& v,
                                            double kappa, double C = 0.0) {
  if (!(st.sigma > 0.0)) fail(ErrorKind::NonpositiveWidth, "sigma must be positive");
  const double sg = st.sigma, dsg = st.dsigma;
  const MomentAccel acc = sigma_rhs(st, v, kappa);
  PhaseCoefficients pc;
  pc.A = -dsg / (4.0 * v.i0 * sg) - v.i2 / (2.0 * v.i0 * sg * sg);
  pc.B = -st.ds / (2.0 * v.i0) - 2.0 * pc.A * st.s;
  pc.Adot = -acc.ddsigma / (4.0 * v.i0 * sg) + dsg * dsg / (4.0 * v.i0 * sg * sg) +
            v.i2 * dsg / (v.i0 * sg * sg * sg);
  pc.Bdot = -acc.dds / (2.0 * v.i0) - 2.0 * pc.Adot * st.s - 2.0 * pc.A * st.ds;
  const double K =
      2.0 * v.i5 + 2.0 * v.i1 - 2.0 * v.i4 * v.i2 - v.i2 * v.i2 * (v.i3 - 1.0);
  pc.Cdot = (2.0 * v.i1 / (sg * sg) - K * st.s * st.s / (sg * sg * sg * sg) -
             2.0 * v.i4 * v.i0 * pc.B * st.s / (sg * sg) -
             (v.i3 - 1.0) * v.i0 * v.i0 * pc.B * pc.B) /
            v.i0;
  pc.C = C;
  return pc;
}

// Assemble the Gaussian theta field for one state, with analytic carrier and
// time-derivative channels.
inline ThetaField reconstruct_field(const GaussianState& st, const Invariants& v,
                                    double kappa, const Grid1D& grid, double C = 0.0) {
  grid.validate();
  const PhaseCoefficients pc = phase_coefficients(st, v, kappa, C);
  const int n = grid.n;
  ThetaField f{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               Carrier{}, Carrier{}, std::vector<double>(n), std::vector<double>(n)};
  f.carrier1->value.resize(n);
  f.carrier1->d1.resize(n);
  f.carrier1->d2.resize(n);
  f.carrier2->value.resize(n);
  f.carrier2->d1.resize(n);
  f.carrier2->d2.resize(n);
  const double sg = st.sigma;
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double u = x - st.s;
    f.carrier1->value[i] = -u * u / (2.0 * sg * sg) - 0.5 * std::log(sg);
    f.carrier1->d1[i] = -u / (sg * sg);
    f.carrier1->d2[i] = -1.0 / (sg * sg);
    f.carrier2->value[i] = v.i0 * (pc.A * x * x + pc.B * x + pc.C);
    f.carrier2->d1[i] = v.i0 * (2.0 * pc.A * x + pc.B);
    f.carrier2->d2[i] = 2.0 * v.i0 * pc.A;
    (*f.dt_theta1)[i] =
        u * st.ds / (sg * sg) + u * u * st.dsigma / (sg * sg * sg) - st.dsigma / (2.0 * sg);
    (*f.dt_theta2)[i] = v.i0 * (pc.Adot * x * x + pc.Bdot * x + pc.Cdot);
  }
  return f;
}

// Trajectory rows with phase coefficients; C accumulated by trapezoid.
struct TrajectoryRow {
  GaussianState state;
  PhaseCoefficients phase;
};

inline std::vector<TrajectoryRow> with_phase(const Trajectory& traj, const Invariants& v,
                                             double kappa) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(traj.states.size());
  double C = 0.0;
  std::optional<PhaseCoefficients> prev;
  double prev_t = 0.0;
  for (const auto& st : traj.states) {
    PhaseCoefficients pc = phase_coefficients(st, v, kappa);
    if (prev) C += 0.5 * (prev->Cdot + pc.Cdot) * (st.t - prev_t);
    pc.C = C;
    rows.push_back({st, pc});
    prev = pc;
    prev_t = st.t;
  }
  return rows;
}

inline std::string trajectory_to_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "t,sigma,dsigma,s,ds,A,B,C\n";
  for (const auto& r : rows)
    out += csv_row({r.state.t, r.state.sigma, r.state.dsigma, r.state.s, r.state.ds,
                    r.phase.A, r.phase.B, r.phase.C});
  return out;
}

// --- asymptotics ------------------------------------------------------------------

enum class AsymptoticKind {
  ConvergesToGroundState,
  Spreads,
  Collapses,
  PeriodicOrBounded,
  Undetermined,
};

inline const char* kind_name(AsymptoticKind k) {
  switch (k) {
    case AsymptoticKind::ConvergesToGroundState: return "ConvergesToGroundState";
    case AsymptoticKind::Spreads: return "Spreads";
    case AsymptoticKind::Collapses: return "Collapses";
    case AsymptoticKind::PeriodicOrBounded: return "PeriodicOrBounded";
    case AsymptoticKind::Undetermined: return "Undetermined";
  }
  return "?";
}

struct AsymptoticVerdict {
  AsymptoticKind kind = AsymptoticKind::Undetermined;
  std::optional<double> sigma_limit;
  std::optional<double> s_limit;
  double horizon = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"kind", kind_name(kind)}, {"horizon", horizon}};
    j["sigma_limit"] = sigma_limit ? nlohmann::json(*sigma_limit) : nlohmann::json();
    j["s_limit"] = s_limit ? nlohmann::json(*s_limit) : nlohmann::json();
    return j;
  }
};

// Fixed width of the dissipative ground state.
inline double sigma_infinity(const Invariants& v, double kappa) {
  if (!(kappa > 0.0 && v.i0 < 0.0 && v.i1 + v.i5 > 0.0))
    fail(ErrorKind::InvalidRegime, "sigma_infinity needs kappa > 0, i0 < 0 < i1 + i5");
  return std::pow(4.0 * (v.i1 + v.i5) / (-kappa * v.i0), 0.25);
}

// Integrate to the horizon and classify. In the dissipative regime
// (i0 < 0 < i1+i5, friction < 0, kappa > 0) the verdict is
// ConvergesToGroundState with the analytic sigma_infinity; otherwise the
// verdict comes from thresholds and the trend of the trajectory tail
// (free spreading grows like t and never reaches the spread threshold by a
// finite horizon, so a monotone-growth test is applied).
inline AsymptoticVerdict classify_asymptotics(const GaussianState& initial,
                                              const Invariants& v, double kappa,
                                              double horizon, double dt = 1e-3) {
  if (!(horizon > 0.0)) fail(ErrorKind::InvalidArgument, "horizon must be positive");
  AsymptoticVerdict verdict;
  verdict.horizon = horizon;
  Trajectory traj;
  bool step_failed = false;
  try {
    traj = integrate(initial, v, kappa, horizon, dt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::StepSizeTooLarge && e.kind() != ErrorKind::NonpositiveWidth)
      throw;
    step_failed = true;  // runaway dynamics; fall through to trend analysis
  }
  if (traj.states.empty()) {
    verdict.kind = AsymptoticKind::Undetermined;
    return verdict;
  }
  const auto& states = traj.states;
  const GaussianState last = states.back();
  if (traj.reason == StopReason::Collapse) {
    verdict.kind = AsymptoticKind::Collapses;
    verdict.sigma_limit = 0.0;
    return verdict;
  }
  if (traj.reason == StopReason::Spread) {
    verdict.kind = AsymptoticKind::Spreads;
    return verdict;
  }

  const bool dissipative_regime =
      v.i0 < 0.0 && v.i1 + v.i5 > 0.0 && v.friction() < 0.0 && kappa > 0.0;
  if (dissipative_regime && !step_failed) {
    const double s_inf = sigma_infinity(v, kappa);
    if (std::abs(last.sigma - s_inf) <= 1e-4 * std::max(1.0, s_inf) &&
        std::abs(last.dsigma) <= 1e-4 && std::abs(last.s) <= 1e-3) {
      verdict.kind = AsymptoticKind::ConvergesToGroundState;
      verdict.sigma_limit = s_inf;
      verdict.s_limit = 0.0;
      return verdict;
    }
  }

  // Trend of the final half of whatever trajectory we have.
  const size_t half = states.size() / 2;
  double lo = states[half].sigma, hi = states[half].sigma;
  bool nondecreasing = true, nonincreasing = true;
  for (size_t i = half + 1; i < states.size(); ++i) {
    if (states[i].sigma < states[i - 1].sigma) nondecreasing = false;
    if (states[i].sigma > states[i - 1].sigma) nonincreasing = false;
    lo = std::min(lo, states[i].sigma);
    hi = std::max(hi, states[i].sigma);
  }
  const double mid_sigma = states[half].sigma;
  if (nondecreasing && last.sigma > 1.2 * mid_sigma && last.dsigma > 0.0) {
    verdict.kind = AsymptoticKind::Spreads;
  } else if (nonincreasing && last.sigma < mid_sigma / 1.2 && last.dsigma < 0.0) {
    verdict.kind = AsymptoticKind::Collapses;
    verdict.sigma_limit = step_failed ? 0.0 : last.sigma;
  } else if (!step_failed && hi - lo <= 0.5 * std::max(1.0, hi)) {
    verdict.kind = AsymptoticKind::PeriodicOrBounded;
  } else {
    verdict.kind = AsymptoticKind::Undetermined;
  }
  return verdict;
}

}  // namespace dg
