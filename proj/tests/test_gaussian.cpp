#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "dg/catalog.hpp"
#include "dg/gaussian.hpp"
#include "dg/quadrature.hpp"
#include "support/oracles.hpp"

using namespace dg;
using oracles::Rng;

namespace {
const Invariants kLinear{-0.5, 0.125, 0.0, 0.0, 0.0, 0.0};

Trajectory run(const Invariants& v, double kappa, GaussianState y0, double t_end,
               double dt) {
  return integrate(y0, v, kappa, t_end, dt);
}
}  // namespace

TEST_CASE("sigma_rhs: worked values") {
  SECTION("linear class, kappa = 0, sigma = 1 at rest") {
    const MomentAccel a = sigma_rhs({0, 1.0, 0.0, 0.0, 0.0}, kLinear, 0.0);
    CHECK(a.ddsigma == 1.0);  // 8 (i1+i5) / sigma^3 = 1
    CHECK(a.dds == 0.0);
  }
  SECTION("sigma_infinity is a fixed point") {
    const Invariants v{-0.5, 0.125, 0.0, 0.0, -1.0, 0.0};
    const double kappa = 2.0;
    const double s_inf = sigma_infinity(v, kappa);
    const MomentAccel a = sigma_rhs({0, s_inf, 0.0, 0.0, 0.0}, v, kappa);
    CHECK(std::abs(a.ddsigma) < 1e-14);
  }
  SECTION("center at rest stays at rest") {
    const MomentAccel a = sigma_rhs({0, 2.0, 0.5, 0.0, 0.0}, kLinear, 0.0);
    CHECK(a.dds == 0.0);
  }
  SECTION("nonpositive width refused") {
    CHECK_THROWS_AS(sigma_rhs({0, -1.0, 0, 0, 0}, kLinear, 0.0), Error);
  }
}

TEST_CASE("integrate: free linear spreading matches the closed form") {
  const double sigma0 = 0.8;
  const Trajectory traj = run(kLinear, 0.0, {0, sigma0, 0.0, 0.0, 0.0}, 1.0, 1e-4);
  REQUIRE(traj.reason == StopReason::Completed);
  const GaussianState last = traj.states.back();
  const double exact = std::sqrt(sigma0 * sigma0 + 1.0 / (sigma0 * sigma0));
  CHECK_THAT(last.sigma, Catch::Matchers::WithinAbs(exact, 1e-8));
}

TEST_CASE("integrate: explicit solution for i3 = 1") {
  // sigma(t) = sqrt((exp(2 s1 t - s1 s2) + 2(i2+i4))/s1), constants fit from
  // the initial data: exp(-s1 s2) = sigma0 sigma0', s1 from sigma(0).
  const Invariants v{-0.5, 0.25, 0.3, 1.0, 0.2, -0.25};  // i1 + i5 = 0, i3 = 1
  const double sigma0 = 1.0, dsigma0 = 0.5;
  const double E0 = sigma0 * dsigma0;
  const double s1 = (E0 + 2.0 * (v.i2 + v.i4)) / (sigma0 * sigma0);
  auto exact = [&](double t) {
    return std::sqrt((E0 * std::exp(2.0 * s1 * t) + 2.0 * (v.i2 + v.i4)) / s1);
  };
  const Trajectory traj = run(v, 0.0, {0, sigma0, dsigma0, 0.0, 0.0}, 1.0, 1e-4);
  REQUIRE(traj.reason == StopReason::Completed);
  CHECK_THAT(traj.states.back().sigma, Catch::Matchers::WithinAbs(exact(1.0), 1e-7));
}

TEST_CASE("integrate: power law for i4 = -i2 i3") {
  SECTION("i3 = -1: square-root growth") {
    const Invariants v{-0.5, 0.2, 0.4, -1.0, 0.4, -0.2};  // friction = 0, i1+i5 = 0
    const double sigma0 = 1.0, dsigma0 = 0.3;
    const double s1 = (1.0 - v.i3) * dsigma0 / sigma0;
    const Trajectory traj = run(v, 0.0, {0, sigma0, dsigma0, 0.0, 0.0}, 2.0, 1e-4);
    const double exact = sigma0 * std::pow(s1 * 2.0 + 1.0, 1.0 / (1.0 - v.i3));
    CHECK_THAT(traj.states.back().sigma, Catch::Matchers::WithinAbs(exact, 1e-7));
  }
  SECTION("i3 = 0: linear growth") {
    const Invariants v{-0.5, 0.2, 0.7, 0.0, 0.0, -0.2};
    const Trajectory traj = run(v, 0.0, {0, 1.0, 0.25, 0.0, 0.0}, 2.0, 1e-4);
    CHECK_THAT(traj.states.back().sigma, Catch::Matchers::WithinAbs(1.5, 1e-8));
  }
}

TEST_CASE("implicit quadrature relation along trajectories") {
  // i1 + i5 = 0, i3 not +-1: int_{sigma0}^{sigma} 2x dx / (C1 x^(i3+1)
  // - 8 f/(1+i3)) = t - t0 with C1 fit at t0.
  const Invariants v{-0.5, 0.2, 0.4, 0.5, -0.1, -0.2};
  const double f = v.friction();
  REQUIRE_THAT(f, Catch::Matchers::WithinAbs(0.1, 1e-15));
  const double sigma0 = 1.0, dsigma0 = 0.6;
  const double C1 = (2.0 * sigma0 * dsigma0 + 8.0 * f / (1.0 + v.i3)) /
                    std::pow(sigma0, v.i3 + 1.0);
  const Trajectory traj = run(v, 0.0, {0, sigma0, dsigma0, 0.0, 0.0}, 1.5, 1e-4);
  auto denom = [&](double x) {
    return C1 * std::pow(x, v.i3 + 1.0) - 8.0 * f / (1.0 + v.i3);
  };
  for (size_t k = traj.states.size() / 4; k < traj.states.size();
       k += traj.states.size() / 4) {
    const GaussianState st = traj.states[k];
    const double integral =
        adaptive_simpson([&](double x) { return 2.0 * x / denom(x); }, sigma0, st.sigma,
                         1e-12);
    CHECK_THAT(integral, Catch::Matchers::WithinAbs(st.t, 1e-6));
  }
}

TEST_CASE("q form") {
  SECTION("i3 = 0 reduces to the sigma equation") {
    const Invariants v{-0.5, 0.2, 0.3, 0.0, -0.4, 0.1};
    const double q = 1.3, dq = -0.2, kappa = 0.7;
    const MomentAccel a = sigma_rhs({0, q, dq, 0, 0}, v, kappa);
    CHECK_THAT(q_form_rhs(q, dq, v, kappa), Catch::Matchers::WithinRel(a.ddsigma, 1e-13));
  }
  SECTION("fixed point q_inf") {
    const Invariants v{-0.5, 0.125, 0.0, -0.5, 0.0, 0.0};
    const double kappa = 2.0;
    const double s_inf = sigma_infinity(v, kappa);
    const double q_inf = std::pow(s_inf, 1.0 - v.i3);
    CHECK(std::abs(q_form_rhs(q_inf, 0.0, v, kappa)) < 1e-13);
  }
  SECTION("chain-rule oracle at random admissible points") {
    Rng rng(646);
    for (int trial = 0; trial < 100; ++trial) {
      Invariants v{rng.uniform(-1, -0.1), rng.uniform(-0.5, 0.5), rng.uniform(-1, 1),
                   rng.uniform(-3.0, 0.9), rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)};
      const double kappa = rng.uniform(0.0, 2.0);
      const double sigma = rng.uniform(0.4, 2.5), dsigma = rng.uniform(-0.8, 0.8);
      const MomentAccel a = sigma_rhs({0, sigma, dsigma, 0, 0}, v, kappa);
      const double e = 1.0 - v.i3;
      const double q = std::pow(sigma, e);
      const double dq = e * std::pow(sigma, e - 1.0) * dsigma;
      const double ddq_chain = e * ((e - 1.0) * std::pow(sigma, e - 2.0) * dsigma * dsigma +
                                    std::pow(sigma, e - 1.0) * a.ddsigma);
      CHECK(std::abs(q_form_rhs(q, dq, v, kappa) - ddq_chain) <
            1e-10 * std::max(1.0, std::abs(ddq_chain)));
    }
  }
  SECTION("i3 = 1 rejected") {
    const Invariants v{-0.5, 0.2, 0.3, 1.0, -0.4, 0.1};
    CHECK_THROWS_AS(q_form_rhs(1.0, 0.0, v, 0.0), Error);
  }
}

TEST_CASE("Newtonian picture") {
  SECTION("frictionless whenever i2 i3 + i4 = 0") {
    const Invariants v{-0.5, 0.2, 0.7, 0.4, -0.28, 0.1};
    CHECK(potential_and_friction(1.7, 0.9, v, 0.5).F_q == 0.0);
  }
  SECTION("generic branch example: i3 = 3, i1+i5 = 1/8, kappa = 0") {
    const Invariants v{-0.5, 0.125, 0.0, 3.0, 0.0, 0.0};
    const auto np = potential_and_friction(1.3, 0.0, v, 0.0);
    // U_q = 4 (1/8) (i3-1)^2/(i3+1) q^4 = q^4/2
    CHECK_THAT(np.U_q, Catch::Matchers::WithinRel(0.5 * std::pow(1.3, 4.0), 1e-13));
  }
  SECTION("logarithmic branch at i3 = -1") {
    const Invariants v{-0.5, 0.125, 0.0, -1.0, 0.0, 0.0};
    const double kappa = 2.0, q = 1.7;
    const auto np = potential_and_friction(q, 0.0, v, kappa);
    CHECK_THAT(np.U_q, Catch::Matchers::WithinRel(
                           -16.0 * 0.125 * std::log(q) - 2.0 * kappa * (-0.5) * q * q,
                           1e-13));
  }
  SECTION("force law q'' = -U_q' + F_q on all branches (FD oracle)") {
    Rng rng(757);
    for (double i3 : {-3.0, -1.0, 0.5, 2.0}) {
      for (int trial = 0; trial < 20; ++trial) {
        Invariants v{rng.uniform(-1, -0.1), rng.uniform(-0.5, 0.5), rng.uniform(-1, 1),
                     i3, rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)};
        const double kappa = rng.uniform(0.0, 2.0);
        const double q = rng.uniform(0.5, 2.0), dq = rng.uniform(-1.0, 1.0);
        const double h = 1e-5 * q;
        const double Up = (potential_and_friction(q + h, dq, v, kappa).U_q -
                           potential_and_friction(q - h, dq, v, kappa).U_q) /
                          (2.0 * h);
        const double Fq = potential_and_friction(q, dq, v, kappa).F_q;
        CHECK(std::abs(q_form_rhs(q, dq, v, kappa) - (-Up + Fq)) <
              1e-6 * std::max(1.0, std::abs(Up)));
      }
    }
  }
  SECTION("s sector: s'' = -U_s' + F_s reproduces the moment equation") {
    Rng rng(868);
    for (int trial = 0; trial < 30; ++trial) {
      Invariants v{rng.uniform(-1, -0.1), rng.uniform(-0.5, 0.5), rng.uniform(-1, 1),
                   rng.uniform(-2.0, 0.9), rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)};
      const double kappa = rng.uniform(0.0, 2.0);
      const GaussianState st{0, rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5),
                             rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double e = 1.0 - v.i3;
      const double q = std::pow(st.sigma, e);
      const double dq = e * std::pow(st.sigma, e - 1.0) * st.dsigma;
      const auto np = potential_and_friction(q, dq, v, kappa);
      const double dds = -2.0 * np.u_s_coeff * st.s + np.f_s_coeff * st.ds;
      CHECK(std::abs(sigma_rhs(st, v, kappa).dds - dds) < 1e-11);
    }
  }
  SECTION("frictionless energy conservation along a trajectory") {
    const Invariants v{-0.5, 0.125, 0.5, 0.4, -0.2, 0.0};  // friction = 0
    const double kappa = 1.5;
    const Trajectory traj = run(v, kappa, {0, 1.2, 0.0, 0.0, 0.0}, 2.0, 1e-4);
    const double e = 1.0 - v.i3;
    auto energy = [&](const GaussianState& st) {
      const double q = std::pow(st.sigma, e);
      const double dq = e * std::pow(st.sigma, e - 1.0) * st.dsigma;
      return 0.5 * dq * dq + potential_and_friction(q, dq, v, kappa).U_q;
    };
    const double E0 = energy(traj.states.front());
    for (size_t k = 0; k < traj.states.size(); k += 1000)
      CHECK(std::abs(energy(traj.states[k]) - E0) < 1e-9 * std::max(1.0, std::abs(E0)));
  }
}

TEST_CASE("q/sigma trajectory equivalence for random i3 in [-3, 0.9]") {
  Rng rng(979);
  for (int trial = 0; trial < 8; ++trial) {
    Invariants v{rng.uniform(-1, -0.1), rng.uniform(0.05, 0.3), rng.uniform(-0.5, 0.5),
                 rng.uniform(-3.0, 0.9), rng.uniform(-0.5, 0.5), rng.uniform(-0.1, 0.1)};
    const double kappa = rng.uniform(0.0, 1.5);
    const GaussianState y0{0, rng.uniform(0.7, 1.5), rng.uniform(-0.3, 0.3),
                           rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const double t_end = 1.0, dt = 1e-4;
    const Trajectory sig = run(v, kappa, y0, t_end, dt);
    REQUIRE(sig.reason == StopReason::Completed);
    // integrate the q form with a generic RK4 and map back
    const double e = 1.0 - v.i3;
    std::array<double, 4> y{std::pow(y0.sigma, e),
                            e * std::pow(y0.sigma, e - 1.0) * y0.dsigma, y0.s, y0.ds};
    std::function<std::array<double, 4>(double, const std::array<double, 4>&)> rhs =
        [&](double, const std::array<double, 4>& w) {
          const auto np = potential_and_friction(w[0], w[1], v, kappa);
          return std::array<double, 4>{
              w[1], q_form_rhs(w[0], w[1], v, kappa), w[3],
              -2.0 * np.u_s_coeff * w[2] + np.f_s_coeff * w[3]};
        };
    const long steps = std::lround(t_end / dt);
    for (long k = 0; k < steps; ++k) y = oracles::rk4_step(rhs, k * dt, y, dt);
    const double sigma_from_q = std::pow(y[0], 1.0 / e);
    CHECK(std::abs(sigma_from_q - sig.states.back().sigma) < 1e-8);
    CHECK(std::abs(y[2] - sig.states.back().s) < 1e-8);
  }
}

TEST_CASE("RK4 order on the closed-form spreading solution") {
  const double sigma0 = 1.0;
  auto error_at = [&](double dt) {
    const Trajectory traj = run(kLinear, 0.0, {0, sigma0, 0.0, 0.0, 0.0}, 1.0, dt);
    const double exact = std::sqrt(sigma0 * sigma0 + 1.0);
    return std::abs(traj.states.back().sigma - exact);
  };
  const double e1 = error_at(1e-2), e2 = error_at(5e-3), e3 = error_at(2.5e-3);
  const double slope12 = std::log2(e1 / e2), slope23 = std::log2(e2 / e3);
  INFO("slopes " << slope12 << " " << slope23);
  CHECK(std::abs(slope12 - 4.0) < 0.3);
  CHECK(std::abs(slope23 - 4.0) < 0.3);
}

TEST_CASE("classify_asymptotics") {
  SECTION("dissipative regime lands on sigma_infinity") {
    const Invariants v{-0.5, 0.125, 0.0, 0.0, -1.0, 0.0};
    const AsymptoticVerdict verdict = classify_asymptotics({0, 1.0, 0.0, 0.5, 0.0}, v,
                                                           2.0, 100.0);
    CHECK(verdict.kind == AsymptoticKind::ConvergesToGroundState);
    REQUIRE(verdict.sigma_limit.has_value());
    CHECK_THAT(*verdict.sigma_limit, Catch::Matchers::WithinAbs(0.840896, 1e-6));
    CHECK(verdict.s_limit.has_value());
  }
  SECTION("fixed-point start is stationary") {
    const Invariants v{-0.5, 0.125, 0.0, 0.0, -1.0, 0.0};
    const double s_inf = sigma_infinity(v, 2.0);
    const Trajectory traj = run(v, 2.0, {0, s_inf, 0.0, 0.0, 0.0}, 10.0, 1e-3);
    for (const auto& st : traj.states) {
      CHECK(std::abs(st.sigma - s_inf) < 1e-10);
      CHECK(std::abs(st.s) < 1e-12);
    }
  }
  SECTION("inverted potential is unstable: perturbations do not converge") {
    const Invariants v{0.5, -0.125, 0.0, 0.0, -1.0, 0.0};  // i0 > 0, i1+i5 < 0
    const double s_inf = std::pow(4.0 * 0.125 / (2.0 * 0.5), 0.25);
    const AsymptoticVerdict up =
        classify_asymptotics({0, 1.05 * s_inf, 0.0, 0.0, 0.0}, v, 2.0, 50.0);
    CHECK(up.kind != AsymptoticKind::ConvergesToGroundState);
    const AsymptoticVerdict down =
        classify_asymptotics({0, 0.95 * s_inf, 0.0, 0.0, 0.0}, v, 2.0, 50.0);
    CHECK(down.kind == AsymptoticKind::Collapses);
  }
  SECTION("free linear spreading is detected without reaching the threshold") {
    const AsymptoticVerdict verdict =
        classify_asymptotics({0, 1.0, 0.0, 0.0, 0.0}, kLinear, 0.0, 100.0);
    CHECK(verdict.kind == AsymptoticKind::Spreads);
  }
  SECTION("frictionless oscillation about sigma_infinity stays bounded") {
    const Invariants v{-0.5, 0.125, 0.0, 0.0, 0.0, 0.0};
    const AsymptoticVerdict verdict =
        classify_asymptotics({0, 1.2 * sigma_infinity(v, 2.0), 0.0, 0.0, 0.0}, v, 2.0,
                             50.0);
    CHECK(verdict.kind == AsymptoticKind::PeriodicOrBounded);
  }
}

TEST_CASE("constant-width center follows the damped-oscillator closed form") {
  const Invariants v{-0.5, 0.125, 0.0, 0.0, -0.5, 0.0};
  const double kappa = 2.0;
  const double s_inf = sigma_infinity(v, kappa);
  const double a = 2.0 * v.friction() / (s_inf * s_inf);  // s'' = a s' + b s
  const double b = 2.0 * kappa * v.i0;
  const std::complex<double> disc = std::sqrt(std::complex<double>(a * a + 4.0 * b, 0.0));
  const std::complex<double> lp = 0.5 * (a + disc), lm = 0.5 * (a - disc);
  const double s0 = 0.5, ds0 = 0.0;
  const std::complex<double> cp = (ds0 - lm * s0) / (lp - lm), cm = s0 - cp;
  const Trajectory traj = run(v, kappa, {0, s_inf, 0.0, s0, ds0}, 2.0, 1e-4);
  const GaussianState last = traj.states.back();
  const double exact = (cp * std::exp(lp * 2.0) + cm * std::exp(lm * 2.0)).real();
  CHECK_THAT(last.s, Catch::Matchers::WithinAbs(exact, 1e-9));
  CHECK(std::abs(last.sigma - s_inf) < 1e-10);
}

TEST_CASE("reconstruct_theta") {
  SECTION("fixed point reproduces the ground-state field up to constants") {
    const Invariants v{-0.5, 0.125, 0.7, 0.0, -0.3, 0.0};
    const double kappa = 2.0;
    const double s_inf = sigma_infinity(v, kappa);
    const Grid1D g{-8.0, 8.0, 256, Boundary::Periodic};
    const ThetaField rec = reconstruct_field({0, s_inf, 0.0, 0.0, 0.0}, v, kappa, g);
    const ThetaField ho = sample(ho_ground_state(v, kappa), g, 0.0);
    for (int i = 0; i < g.n; ++i) {
      // derivatives agree pointwise; values differ by additive constants
      CHECK(std::abs(rec.carrier1->d1[i] - ho.carrier1->d1[i]) < 1e-12);
      CHECK(std::abs(rec.carrier2->d1[i] - ho.carrier2->d1[i]) < 1e-12);
      CHECK(std::abs((*rec.dt_theta1)[i] - (*ho.dt_theta1)[i]) < 1e-12);
      CHECK(std::abs((*rec.dt_theta2)[i] - (*ho.dt_theta2)[i]) < 1e-12);
    }
  }
  SECTION("B vanishes for a centered symmetric state") {
    const PhaseCoefficients pc = phase_coefficients({0, 1.0, 0.0, 0.0, 0.0}, kLinear, 0.0);
    CHECK(pc.B == 0.0);
  }
  SECTION("ap_residual along a dissipative trajectory stays below 1e-8") {
    const Invariants v{-0.5, 0.125, 0.4, 0.3, -1.12, 0.0};  // friction = -1
    const double kappa = 2.0;
    const Grid1D g{-10.0, 10.0, 512, Boundary::Periodic};
    const Trajectory traj = run(v, kappa, {0, 1.3, 0.2, 0.4, -0.1}, 2.0, 1e-4);
    const auto V = harmonic_potential(g, kappa);
    for (size_t k = 0; k < traj.states.size(); k += 5000) {
      const ThetaField f = reconstruct_field(traj.states[k], v, kappa, g);
      CHECK(ap_residual(f, v, V).linf < 1e-8);
    }
  }
  SECTION("linear free wavepacket matches the textbook equation in the physical gauge") {
    const Grid1D g{-10.0, 10.0, 512, Boundary::Periodic};
    const Trajectory traj = run(kLinear, 0.0, {0, 1.0, 0.0, 0.0, 0.0}, 1.0, 1e-3);
    const NuMuParams fixed = reconstruct(kLinear);
    const NuMuParams physical = from_physical(PhysicalParams{});
    const auto a = find_gauge(fixed, physical);
    REQUIRE(a.has_value());
    const ThetaField f = reconstruct_field(traj.states.back(), kLinear, 0.0, g);
    const ThetaField pushed = push_gauge(f, *a);
    CHECK(nse_residual(pushed, physical, zero_potential(g)).linf < 1e-8);
  }
}

TEST_CASE("trajectory CSV carries phase coefficients") {
  const Invariants v{-0.5, 0.125, 0.3, 0.0, -1.0, 0.0};
  const Trajectory traj = run(v, 2.0, {0, 1.0, 0.0, 0.3, 0.0}, 0.1, 1e-3);
  const auto rows = with_phase(traj, v, 2.0);
  REQUIRE(rows.size() == traj.states.size());
  const std::string csv = trajectory_to_csv(rows);
  CHECK(csv.substr(0, 28) == "t,sigma,dsigma,s,ds,A,B,C\n0,");
  CHECK(rows.front().phase.C == 0.0);
  CHECK(rows.back().phase.C != 0.0);
}

TEST_CASE("step-size guard") {
  // blow the step up deliberately: strong collapse with a huge dt
  const Invariants v{-0.5, -2.0, 0.0, 0.0, 0.0, 0.0};  // i1+i5 < 0 pulls sigma down
  CHECK_THROWS_AS(integrate({0, 1.0, 0.0, 0.0, 0.0}, v, 0.0, 1.0, 0.2), Error);
}
