#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dg/catalog.hpp"
#include "dg/evolver.hpp"
#include "dg/gaussian.hpp"

using namespace dg;

namespace {
const Invariants kLinear{-0.5, 0.125, 0.0, 0.0, 0.0, 0.0};
}

TEST_CASE("plane wave: phase advances at the dispersion rate, theta1 static") {
  const Invariants inv{-0.5, 0.125, 0.0, 0.0, 0.0, 0.0};
  const double k = 1.0;
  const AnalyticSolution sol = plane_wave(inv, k);
  const Grid1D g{-M_PI, M_PI, 64, Boundary::Periodic};
  EvolverConfig cfg{g, 5e-4, 1.0, inv, 0.0, 200};
  const EvolutionTrace trace = evolve(sample(sol, g, 0.0), cfg);
  REQUIRE_FALSE(trace.diverged);
  REQUIRE(trace.fields.size() == 11);
  const auto t2_0 = trace.fields.front().theta2_total();
  const auto t2_T = trace.fields.back().theta2_total();
  const auto t1_T = trace.fields.back().theta1_total();
  const double omega_measured = (t2_T[10] - t2_0[10]) / 1.0;
  CHECK_THAT(omega_measured, Catch::Matchers::WithinAbs(sol.omega, 1e-8));
  for (int i = 0; i < g.n; ++i) CHECK(std::abs(t1_T[i]) < 1e-10);
  // the final snapshot carries PDE-consistent dt channels
  CHECK(ap_residual(trace.fields.back(), inv, zero_potential(g)).linf < 1e-8);
}

TEST_CASE("mass is conserved on a stable periodic run") {
  const Invariants inv{-0.5, 0.125, 0.0, 0.0, 0.0, -0.25};
  const AnalyticSolution sol = cosh_soliton(inv, 1.0, 1.0);
  const Grid1D g{-16.0, 16.0, 256, Boundary::Periodic};
  EvolverConfig cfg{g, 1e-3, 0.5, inv, 0.0, 100};
  const EvolutionTrace trace = evolve(sample(sol, g, 0.0), cfg);
  REQUIRE_FALSE(trace.diverged);
  for (double m : trace.mass)
    CHECK(std::abs(m - trace.mass.front()) < 1e-9 * trace.mass.front());
}

TEST_CASE("soliton density translates rigidly (coarse, short run)") {
  const Invariants inv{-0.5, 0.125, 0.0, 0.0, 0.0, -0.25};
  const double v = 1.0;
  const AnalyticSolution sol = cosh_soliton(inv, 1.0, v);
  const Grid1D g{-16.0, 16.0, 256, Boundary::Periodic};
  EvolverConfig cfg{g, 1e-3, 0.5, inv, 0.0, 500};
  const EvolutionTrace trace = evolve(sample(sol, g, 0.0), cfg);
  REQUIRE_FALSE(trace.diverged);
  const ThetaField expected = sample(sol, g, 0.5);
  const auto t1e = expected.theta1_total();
  const auto t1n = trace.fields.back().theta1_total();
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    err = std::max(err, std::abs(std::exp(2.0 * t1n[i]) - std::exp(2.0 * t1e[i])));
  CHECK(err < 1e-3);
}

TEST_CASE("evolved Gaussian follows the moment ODEs") {
  const Grid1D g{-12.0, 12.0, 256, Boundary::Periodic};
  const GaussianState y0{0, 1.0, 0.0, 0.0, 0.5};
  const double t_end = 0.5;
  EvolverConfig cfg{g, 5e-4, t_end, kLinear, 0.0, 250};
  const EvolutionTrace trace = evolve(reconstruct_field(y0, kLinear, 0.0, g), cfg);
  REQUIRE_FALSE(trace.diverged);
  const Observables obs = observables(trace);
  const Trajectory traj = integrate(y0, kLinear, 0.0, t_end, 1e-4);
  const GaussianState ode = traj.states.back();
  CHECK_THAT(obs.width.back(),
             Catch::Matchers::WithinAbs(ode.sigma / std::sqrt(2.0), 1e-6));
  CHECK_THAT(obs.center.back(), Catch::Matchers::WithinAbs(ode.s, 1e-6));
  CHECK_THAT(obs.mass.back(), Catch::Matchers::WithinRel(obs.mass.front(), 1e-10));
}

TEST_CASE("temporal order: halving dt cuts the error ~16x") {
  const Grid1D g{-12.0, 12.0, 128, Boundary::Periodic};
  const GaussianState y0{0, 1.0, 0.0, 0.0, 0.0};
  auto width_err = [&](double dt) {
    EvolverConfig cfg{g, dt, 0.5, kLinear, 0.0, 1 << 20};
    EvolverConfig full = cfg;
    full.record_every = std::lround(0.5 / dt);
    const EvolutionTrace trace = evolve(reconstruct_field(y0, kLinear, 0.0, g), full);
    const Observables obs = observables(trace);
    const double exact = std::sqrt(1.0 + 0.25) / std::sqrt(2.0);  // sigma(:0.5)/sqrt2
    return std::abs(obs.width.back() - exact);
  };
  const double e1 = width_err(4e-3);
  const double e2 = width_err(2e-3);
  const double ratio = e1 / e2;
  INFO("errors " << e1 << " " << e2 << " ratio " << ratio);
  CHECK(ratio > 11.0);
  CHECK(ratio < 22.0);
}

TEST_CASE("snapshot count follows floor(t_end/(dt*record_every)) + 1") {
  const Grid1D g{-4.0, 4.0, 64, Boundary::Periodic};
  ThetaField f{g, std::vector<double>(g.n, 0.0), std::vector<double>(g.n, 0.0),
               {}, {}, {}, {}};
  EvolverConfig cfg{g, 1e-3, 0.2, kLinear, 0.0, 50};
  const EvolutionTrace trace = evolve(f, cfg);
  CHECK(trace.fields.size() == 5);
  CHECK_THAT(trace.times.back(), Catch::Matchers::WithinAbs(0.2, 1e-12));
}

TEST_CASE("stability guard rejects an oversized step") {
  const Grid1D g{-4.0, 4.0, 256, Boundary::Periodic};
  EvolverConfig cfg{g, 1e-2, 1.0, kLinear, 0.0, 1};
  ThetaField f{g, std::vector<double>(g.n, 0.0), std::vector<double>(g.n, 0.0),
               {}, {}, {}, {}};
  CHECK_THROWS_AS(evolve(f, cfg), Error);
}

TEST_CASE("non-finite values abort with a partial trace and the diverged flag") {
  const Grid1D g{-4.0, 4.0, 64, Boundary::Periodic};
  const Invariants inv{-0.5, 0.125, 1.0, 0.0, 0.0, 0.0};
  ThetaField f{g, std::vector<double>(g.n), std::vector<double>(g.n, 0.0), {}, {}, {}, {}};
  for (int i = 0; i < g.n; ++i) f.theta1[i] = 1e200 * std::sin(2.0 * M_PI * i / g.n);
  EvolverConfig cfg{g, 1e-4, 0.1, inv, 0.0, 1};
  const EvolutionTrace trace = evolve(f, cfg);
  CHECK(trace.diverged);
  CHECK(trace.fields.size() >= 1);
}

TEST_CASE("dealias flag leaves smooth runs unchanged") {
  const Grid1D g{-12.0, 12.0, 128, Boundary::Periodic};
  const GaussianState y0{0, 1.0, 0.0, 0.0, 0.0};
  EvolverConfig plain{g, 1e-3, 0.1, kLinear, 0.0, 100};
  EvolverConfig filtered = plain;
  filtered.dealias = true;
  const auto a = evolve(reconstruct_field(y0, kLinear, 0.0, g), plain);
  const auto b = evolve(reconstruct_field(y0, kLinear, 0.0, g), filtered);
  const auto ta = a.fields.back().theta1_total();
  const auto tb = b.fields.back().theta1_total();
  for (int i = 0; i < g.n; ++i) CHECK(std::abs(ta[i] - tb[i]) < 1e-9);
}

TEST_CASE("observables CSV format") {
  Observables obs;
  obs.t = {0.0, 0.5};
  obs.mass = {1.0, 1.0};
  obs.center = {0.0, 0.25};
  obs.width = {0.7, 0.8};
  const std::string csv = observables_to_csv(obs);
  CHECK(csv.rfind("t,mass,center,width\n", 0) == 0);
}
