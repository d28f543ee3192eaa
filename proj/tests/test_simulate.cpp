#include <doctest.h>

#include "fluxq/simulate.hpp"
#include "support.hpp"

using namespace fluxq;
using Mode = GeometricPolicy::Mode;
using Rep = Representation;

namespace {

std::map<std::string, double> default_ics(const Circuit& c) {
  std::map<std::string, double> ics;
  for (const auto& comp : c.components()) ics[comp.id] = comp.is_capacitor() ? 2e-3 : 0.0;
  return ics;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("FIG2B closed form") {
  const auto c = support::load("fig2b");
  for (auto rep : {Rep::NodeFlux, Rep::LoopCharge}) {
    const auto s = support::solve(c, rep);
    const auto z0 = initial_state(s.lag, default_ics(c));
    const auto times = uniform_times(4e-9, 2001);
    const auto traj = evolve_modes(s.h, s.modes, z0, times);
    const auto obs = observables(s.lag, s.h, traj);
    const double w = 1.0 / std::sqrt(6e-12 * 4e-9);
    const double amp = 2e-3 * std::sqrt(6e-12 / 4e-9);
    CHECK(support::rel(amp, 7.745967e-5) < 1e-6);
    const auto vc = obs.voltage.col(obs.column("C"));
    const auto il = obs.current.col(obs.column("L"));
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      CHECK(std::abs(vc(ii) - 2e-3 * std::cos(w * times[i])) < 1e-12 * 2e-3 * 1e3);
      CHECK(std::abs(il(ii) - amp * std::sin(w * times[i])) < 1e-9 * amp);
    }
  }
}

TEST_CASE("mode solution") {
  const auto c = support::load("fig2b");
  const auto s = support::solve(c, Rep::NodeFlux);
  const auto z0 = initial_state(s.lag, default_ics(c));
  const auto sol = mode_solution(s.h, s.modes, z0);
  // Flux starts at 0 with rate 2 mV: a pure sine, phase -pi/2.
  const double w = s.modes.omegas(0);
  CHECK(support::rel(sol.omega(0), w) < 1e-15);
  CHECK(sol.phase(0) == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-12));
  CHECK(support::rel(sol.amplitude(0), 2e-3 / w * std::sqrt(6e-12)) < 1e-12);
}

TEST_CASE("initial conditions round-trip") {
  for (auto rep : {Rep::NodeFlux, Rep::LoopCharge, Rep::ExtendedNodeFlux}) {
    const auto c = support::load("fig2a");
    const auto s = support::solve(c, rep);
    const auto z0 = initial_state(s.lag, default_ics(c));
    const auto traj = evolve_modes(s.h, s.modes, z0, {0.0});
    const auto obs = observables(s.lag, s.h, traj);
    for (const char* cap : {"C1", "C2"}) CHECK(support::rel(obs.voltage(0, obs.column(cap)), 2e-3) < 1e-9);
    for (const char* ind : {"L3", "L4"}) CHECK(std::abs(obs.current(0, obs.column(ind))) < 1e-9 * 1e-4);
  }

  const auto c = parse_netlist("C 2 0 6pF\nL 2 0 4nH\n.ic C 1mV\n.ic L 10uA\n");
  for (auto rep : {Rep::NodeFlux, Rep::LoopCharge}) {
    const auto s = support::solve(c, rep);
    const auto obs = observables(s.lag, s.h, evolve_modes(s.h, s.modes, initial_state(s.lag, c.initial_conditions()), {0.0}));
    CHECK(support::rel(obs.voltage(0, obs.column("C")), 1e-3) < 1e-9);
    // The capacitor's current points node a -> b, opposite to the inductor's around the loop.
    CHECK(support::rel(obs.current(0, obs.column("L")), 10e-6) < 1e-9);
    CHECK(support::rel(obs.current(0, obs.column("C")), -10e-6) < 1e-9);
  }
}

TEST_CASE("inconsistent initial conditions") {
  const auto c = support::load("fig2a");
  const auto s = support::solve(c, Rep::NodeFlux);
  CHECK_THROWS_AS(initial_state(s.lag, {{"C1", 1e-3}, {"C2", 2e-3}}), InconsistentInitialConditions);
  const auto wheel = support::load("wheel");
  const auto w = support::solve(wheel, Rep::NodeFlux);
  CHECK_THROWS_AS(initial_state(w.lag, default_ics(wheel)), InconsistentInitialConditions);
  CHECK_NOTHROW(initial_state(w.lag, {{"Ca", 1e-3}, {"Cb", 1e-3}, {"Cc", -2e-3}}));
}

TEST_CASE("single sample") {
  const auto c = support::load("fig2b");
  const auto s = support::solve(c, Rep::NodeFlux);
  const auto traj = evolve_modes(s.h, s.modes, initial_state(s.lag, default_ics(c)), uniform_times(4e-9, 1));
  REQUIRE(traj.samples() == 1);
  CHECK(traj.times[0] == 0.0);
}

TEST_CASE("analytic evolution conserves energy") {
  for (const char* name : {"fig2b", "fig2a"})
    for (auto rep : {Rep::NodeFlux, Rep::LoopCharge, Rep::ExtendedNodeFlux}) {
      const auto c = support::load(name);
      const auto s = support::solve(c, rep);
      const auto traj = evolve_modes(s.h, s.modes, initial_state(s.lag, default_ics(c)), uniform_times(4e-9, 4000));
      const double e0 = traj.energy.front();
      REQUIRE(e0 > 0.0);
      double worst = 0.0;
      for (double e : traj.energy) worst = std::max(worst, std::abs(e - e0) / e0);
      CHECK_MESSAGE(worst < 1e-10, name, " ", to_string(rep), " ", worst);
    }
}

TEST_CASE("leapfrog agrees with the mode solution on FIG2B") {
  const auto c = support::load("fig2b");
  const auto s = support::solve(c, Rep::NodeFlux);
  const auto z0 = initial_state(s.lag, default_ics(c));
  const double period = 2.0 * std::numbers::pi / s.modes.omegas(0);
  const double dt = period / 2000.0;
  const std::size_t steps = 2000 * 3;
  const auto lf = evolve_leapfrog(s.h, z0, dt, steps, 10);
  const auto exact = evolve_modes(s.h, s.modes, z0, lf.times);
  const double scale = max_abs(exact.coords.col(0));
  CHECK((lf.coords - exact.coords).cwiseAbs().maxCoeff() < 1e-4 * scale);
}

TEST_CASE("leapfrog step limit") {
  const auto s = support::solve(support::load("fig2a"), Rep::NodeFlux);
  const double w_max = s.modes.omegas.maxCoeff();
  const PhasePoint z0{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(evolve_leapfrog(s.h, z0, 1.01 * 2 * std::numbers::pi / (20 * w_max), 10), StepTooLarge);
  CHECK_NOTHROW(evolve_leapfrog(s.h, z0, 0.99 * 2 * std::numbers::pi / (20 * w_max), 10));
  CHECK_THROWS_AS(evolve_leapfrog(s.h, z0, 0.0, 10), StepTooLarge);
}

TEST_CASE("voltages along the series chain add up") {
  const auto c = support::load("fig2a");
  const auto s = support::solve(c, Rep::NodeFlux);
  const auto traj = evolve_modes(s.h, s.modes, initial_state(s.lag, default_ics(c)), uniform_times(4e-9, 2000));
  const auto obs = observables(s.lag, s.h, traj);
  const Eigen::VectorXd sum = obs.voltage.col(obs.column("L3")) + obs.voltage.col(obs.column("L4"));
  const Eigen::VectorXd across = obs.voltage.col(obs.column("C1"));
  CHECK((sum - across).cwiseAbs().maxCoeff() < 1e-9 * max_abs(across));
  // Individually each inductor voltage is far from the chain voltage (high-frequency content).
  CHECK((obs.voltage.col(obs.column("L3")) - 0.25 * across).cwiseAbs().maxCoeff() > 0.1 * max_abs(across));
}

TEST_CASE("currents into parallel capacitors add up in the loop representation") {
  const auto c = support::load("fig2a");
  const auto s = support::solve(c, Rep::LoopCharge);
  const auto traj = evolve_modes(s.h, s.modes, initial_state(s.lag, default_ics(c)), uniform_times(4e-9, 2000));
  const auto obs = observables(s.lag, s.h, traj);
  const Eigen::VectorXd sum = obs.current.col(obs.column("C1")) + obs.current.col(obs.column("C2"));
  const Eigen::VectorXd chain = obs.current.col(obs.column("L3"));
  CHECK((sum + chain).cwiseAbs().maxCoeff() < 1e-9 * max_abs(chain));
}

TEST_CASE("flux law residuals") {
  const auto c = support::load("fig2a");
  const auto s = support::solve(c, Rep::NodeFlux);
  const auto traj = evolve_modes(s.h, s.modes, initial_state(s.lag, default_ics(c)), uniform_times(4e-9, 500));
  const auto r = flux_law_residual(s.aug.design, s.aug.loops, s.lag, traj);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-12 * traj.coords.cwiseAbs().maxCoeff());

  const auto e = support::solve(c, Rep::ExtendedNodeFlux, support::policy(Mode::AllPairs));
  const auto te = evolve_modes(e.h, e.modes, initial_state(e.lag, default_ics(c)), uniform_times(4e-9, 500));
  const auto re = flux_law_residual(e.aug.design, e.aug.loops, e.lag, te);
  for (Eigen::Index l = 0; l < re.cols(); ++l) {
    const Eigen::VectorXd phi = te.coords.col(2 + l);
    CHECK((re.col(l) + phi).cwiseAbs().maxCoeff() <= 1e-10 * std::max(max_abs(phi), 1e-300));
  }
  CHECK_THROWS_AS(flux_law_residual(c, s.aug.loops, support::solve(c, Rep::LoopCharge).lag, traj),
                  std::invalid_argument);
}

TEST_CASE("charge law residuals") {
  const auto c = support::load("fig2a");
  const auto s = support::solve(c, Rep::LoopCharge);
  const auto traj = evolve_modes(s.h, s.modes, initial_state(s.lag, default_ics(c)), uniform_times(4e-9, 500));
  const auto r = charge_law_residual(s.aug.design, s.lag, traj);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-12 * traj.coords.cwiseAbs().maxCoeff());
}
