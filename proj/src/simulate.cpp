#include "fluxq/simulate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fluxq {

InconsistentInitialConditions::InconsistentInitialConditions(const std::string& what, double residual)
    : std::runtime_error(what), residual_(residual) {}

namespace {

constexpr double kIcTolerance = 1e-9;

struct Constraints {
  std::vector<const Branch*> branches;
  std::vector<double> targets;
};

// Minimum-norm least-squares solution of rows . x = targets.
Eigen::VectorXd solve_constraints(const Constraints& cs, Eigen::Index dim, const char* what) {
  if (cs.branches.empty()) return Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd a(cs.branches.size(), dim);
  Eigen::VectorXd b(cs.branches.size());
  for (std::size_t i = 0; i < cs.branches.size(); ++i) {
    a.row(i) = cs.branches[i]->row.transpose();
    b(i) = cs.targets[i];
  }
  const double scale = b.norm();
  if (scale == 0.0) return Eigen::VectorXd::Zero(dim);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd x = cod.solve(b);
  const double residual = (a * x - b).norm() / scale;
  if (residual > kIcTolerance) {
    std::ostringstream msg;
    msg << "inconsistent " << what << " initial conditions on";
    for (const auto* br : cs.branches) msg << ' ' << br->id;
    msg << " (relative residual " << residual << ")";
    throw InconsistentInitialConditions(msg.str(), residual);
  }
  return x;
}

double ic_value(const std::map<std::string, double>& ics, const std::string& id) {
  auto it = ics.find(id);
  return it == ics.end() ? 0.0 : it->second;
}

}  // namespace

PhasePoint initial_state(const QuadraticLagrangian& lag, const std::map<std::string, double>& ics) {
  const auto dim = static_cast<Eigen::Index>(lag.dimension());
  Constraints position, velocity;
  const bool loop = lag.representation == Representation::LoopCharge;
  for (const auto& b : lag.branches) {
    if (b.geometric) continue;
    const double ic = ic_value(ics, b.id);
    if (b.kind == ComponentKind::Inductor) {
      // Inductor current fixes its flux (phi = L i) or, in loop form, a charge rate.
      (loop ? velocity : position).branches.push_back(&b);
      (loop ? velocity : position).targets.push_back(loop ? ic : b.value * ic);
    } else {
      // Capacitor voltage fixes a flux rate or, in loop form, its charge Q = C V.
      (loop ? position : velocity).branches.push_back(&b);
      (loop ? position : velocity).targets.push_back(loop ? b.value * ic : ic);
    }
  }
  PhasePoint z;
  z.x = solve_constraints(position, dim, loop ? "capacitor" : "inductor");
  const Eigen::VectorXd rate = solve_constraints(velocity, dim, loop ? "inductor" : "capacitor");
  z.p = lag.mass * rate;
  return z;
}

ModeSolution mode_solution(const HamiltonianSystem& h, const ModeDecomposition& md, const PhasePoint& z0) {
  const auto n = static_cast<Eigen::Index>(h.dimension());
  const Eigen::VectorXd xt = md.modes.transpose() * (h.mass * z0.x);
  const Eigen::VectorXd pt = md.modes.transpose() * z0.p;
  ModeSolution s{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), md.omegas, Eigen::VectorXd::Zero(n),
                 Eigen::VectorXd::Zero(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    if (md.is_zero_mode(k)) {
      s.offset(k) = xt(k);
      s.drift(k) = pt(k);
      continue;
    }
    const double w = md.omegas(k);
    s.amplitude(k) = std::hypot(xt(k), pt(k) / w);
    s.phase(k) = std::atan2(-pt(k) / w, xt(k));
  }
  return s;
}

std::vector<double> uniform_times(double t_max, std::size_t samples) {
  std::vector<double> t(samples, 0.0);
  for (std::size_t i = 1; i < samples; ++i)
    t[i] = t_max * static_cast<double>(i) / static_cast<double>(samples - 1);
  return t;
}

Trajectory evolve_modes(const HamiltonianSystem& h, const ModeDecomposition& md, const PhasePoint& z0,
                        const std::vector<double>& times) {
  const auto n = static_cast<Eigen::Index>(h.dimension());
  const auto m = static_cast<Eigen::Index>(times.size());
  const Eigen::VectorXd xt0 = md.modes.transpose() * (h.mass * z0.x);
  const Eigen::VectorXd pt0 = md.modes.transpose() * z0.p;
  const Eigen::MatrixXd mv = h.mass * md.modes;

  Trajectory traj;
  traj.times = times;
  traj.coords.resize(m, n);
  traj.momenta.resize(m, n);
  traj.energy.resize(times.size());
  Eigen::VectorXd xt(n), pt(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = times[i];
    for (Eigen::Index k = 0; k < n; ++k) {
      if (md.is_zero_mode(k)) {
        xt(k) = xt0(k) + pt0(k) * t;
        pt(k) = pt0(k);
        continue;
      }
      const double w = md.omegas(k);
      const double c = std::cos(w * t);
      const double s = std::sin(w * t);
      xt(k) = xt0(k) * c + pt0(k) / w * s;
      pt(k) = -w * xt0(k) * s + pt0(k) * c;
    }
    const Eigen::VectorXd x = md.modes * xt;
    const Eigen::VectorXd p = mv * pt;
    traj.coords.row(i) = x.transpose();
    traj.momenta.row(i) = p.transpose();
    traj.energy[i] = h.energy(x, p);
  }
  return traj;
}

Trajectory evolve_leapfrog(const HamiltonianSystem& h, const PhasePoint& z0, double dt, std::size_t steps,
                           std::size_t record_every) {
  if (record_every == 0) record_every = 1;
  const auto md = normal_modes(h);
  const double w_max = md.omegas.size() ? md.omegas.maxCoeff() : 0.0;
  if (!(dt > 0.0) || (w_max > 0.0 && dt > 2.0 * std::numbers::pi / (20.0 * w_max))) {
    std::ostringstream msg;
    msg << "leapfrog step " << dt << " s exceeds 2 pi / (20 w_max) = "
        << 2.0 * std::numbers::pi / (20.0 * w_max) << " s";
    throw StepTooLarge(msg.str());
  }

  const auto n = static_cast<Eigen::Index>(h.dimension());
  const std::size_t records = steps / record_every + 1;
  Trajectory traj;
  traj.times.reserve(records);
  traj.energy.reserve(records);
  traj.coords.resize(static_cast<Eigen::Index>(records), n);
  traj.momenta.resize(static_cast<Eigen::Index>(records), n);

  Eigen::VectorXd x = z0.x;
  Eigen::VectorXd p = z0.p;
  Eigen::VectorXd force = -(h.stiffness * x);
  Eigen::Index row = 0;
  auto record = [&](std::size_t step) {
    traj.times.push_back(static_cast<double>(step) * dt);
    traj.coords.row(row) = x.transpose();
    traj.momenta.row(row) = p.transpose();
    traj.energy.push_back(h.energy(x, p));
    ++row;
  };
  record(0);
  for (std::size_t step = 1; step <= steps; ++step) {
    p.noalias() += 0.5 * dt * force;
    x.noalias() += dt * (h.inv_mass * p);
    force.noalias() = -(h.stiffness * x);
    p.noalias() += 0.5 * dt * force;
    if (step % record_every == 0) record(step);
  }
  return traj;
}

Eigen::Index Observables::column(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<Eigen::Index>(i);
  throw std::out_of_range("no observable for '" + id + "'");
}

Observables observables(const QuadraticLagrangian& lag, const HamiltonianSystem& h, const Trajectory& traj) {
  if (traj.coords.cols() != static_cast<Eigen::Index>(lag.dimension()))
    throw std::invalid_argument("trajectory does not match the Lagrangian's coordinates");

  std::vector<const Branch*> branches;
  for (const auto& b : lag.branches)
    if (b.id.rfind("Lg_", 0) != 0) branches.push_back(&b);
  const auto nb = static_cast<Eigen::Index>(branches.size());
  Eigen::MatrixXd rows(nb, lag.dimension());
  for (Eigen::Index i = 0; i < nb; ++i) rows.row(i) = branches[i]->row.transpose();

  // Branch quantity (flux or charge) and its first two time derivatives.
  const Eigen::MatrixXd q = traj.coords * rows.transpose();
  const Eigen::MatrixXd qd = traj.momenta * h.inv_mass * rows.transpose();
  const Eigen::MatrixXd qdd = -(traj.coords * h.stiffness * h.inv_mass) * rows.transpose();

  Observables obs;
  obs.voltage.resize(traj.coords.rows(), nb);
  obs.current.resize(traj.coords.rows(), nb);
  const bool loop = lag.representation == Representation::LoopCharge;
  for (Eigen::Index i = 0; i < nb; ++i) {
    const Branch& b = *branches[i];
    obs.ids.push_back(b.id);
    const bool cap = b.kind == ComponentKind::Capacitor;
    if (!loop) {
      obs.voltage.col(i) = qd.col(i);
      obs.current.col(i) = cap ? Eigen::VectorXd(b.value * qdd.col(i)) : Eigen::VectorXd(q.col(i) / b.value);
    } else {
      obs.current.col(i) = qd.col(i);
      obs.voltage.col(i) = cap ? Eigen::VectorXd(q.col(i) / b.value) : Eigen::VectorXd(b.value * qdd.col(i));
    }
  }
  return obs;
}

}  // namespace fluxq
