#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluxq/lagrangian.hpp"
#include "fluxq/quantize.hpp"

namespace fluxq {

class InconsistentInitialConditions : public std::runtime_error {
 public:
  InconsistentInitialConditions(const std::string& what, double relative_residual);
  double relative_residual() const { return residual_; }

 private:
  double residual_;
};

class StepTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhasePoint {
  Eigen::VectorXd x;
  Eigen::VectorXd p;
};

/// Canonical coordinates from component initial conditions (V on capacitors,
/// A on inductors; missing entries are 0). Geometric branches are left free
/// and the minimum-norm solution is taken.
PhasePoint initial_state(const QuadraticLagrangian& lagrangian, const std::map<std::string, double>& ics);

/// x_k(t) = A_k cos(w_k t + theta_k) in mass-normalised mode coordinates.
struct ModeSolution {
  Eigen::VectorXd amplitude;
  Eigen::VectorXd phase;
  Eigen::VectorXd omega;
  /// Zero modes drift linearly: x_k(t) = offset_k + drift_k t.
  Eigen::VectorXd offset;
  Eigen::VectorXd drift;
};

ModeSolution mode_solution(const HamiltonianSystem& h, const ModeDecomposition& modes, const PhasePoint& z0);

/// Samples x rows; columns follow the Hamiltonian's labels.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd coords;
  Eigen::MatrixXd momenta;
  std::vector<double> energy;

  std::size_t samples() const { return times.size(); }
};

std::vector<double> uniform_times(double t_max, std::size_t samples);

Trajectory evolve_modes(const HamiltonianSystem& h, const ModeDecomposition& modes, const PhasePoint& z0,
                        const std::vector<double>& times);

/// Kick-drift-kick leapfrog; records every `record_every` steps (and step 0).
/// Throws StepTooLarge when dt > 2 pi / (20 w_max).
Trajectory evolve_leapfrog(const HamiltonianSystem& h, const PhasePoint& z0, double dt, std::size_t steps,
                           std::size_t record_every = 1);

/// Per-branch voltage (V) and current (A) series, samples x branches.
struct Observables {
  std::vector<std::string> ids;
  Eigen::MatrixXd voltage;
  Eigen::MatrixXd current;

  Eigen::Index column(const std::string& id) const;
};

/// Rates come from the Hamiltonian (xdot = M^-1 p, xddot = -M^-1 K x), never
/// from differencing samples. Geometric loop inductances are omitted.
Observables observables(const QuadraticLagrangian& lagrangian, const HamiltonianSystem& h,
                        const Trajectory& trajectory);

}  // namespace fluxq
