#include "fluxq/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace fluxq {

std::string QuantizabilityDiagnosis::summary() const {
  if (quantizable) return std::string("quantizable in ") + to_string(representation) + " representation";
  std::ostringstream out;
  out << "not quantizable in " << to_string(representation) << " representation:";
  for (const auto& nd : null_space) out << "\n  " << nd.attribution;
  return out.str();
}

SingularKineticMatrix::SingularKineticMatrix(QuantizabilityDiagnosis diagnosis)
    : std::runtime_error("singular kinetic matrix: " + diagnosis.summary()),
      diagnosis_(std::move(diagnosis)) {}

namespace {

std::string strip_prefix(const std::string& label) {
  const auto pos = label.find('_');
  return pos == std::string::npos ? label : label.substr(pos + 1);
}

std::string attribute(const QuadraticLagrangian& lag, const Eigen::VectorXd& v) {
  std::vector<std::string> coords;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) coords.push_back(lag.labels[i]);
  std::vector<std::string> carriers;
  for (const auto& b : lag.branches)
    if (std::abs(b.row.dot(v)) > 0.0) carriers.push_back(b.id);

  std::ostringstream out;
  auto list = [&out](const std::vector<std::string>& xs, auto&& f) {
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << f(xs[i]);
  };
  const bool single = coords.size() == 1;
  if (lag.representation == Representation::LoopCharge) {
    out << (single ? "loop " : "loops ");
    list(coords, strip_prefix);
    out << ": no inductance around the loop";
    if (!carriers.empty()) {
      out << " (";
      list(carriers, [](const std::string& s) { return s; });
      out << ")";
    }
    out << "; its conjugate inductive flux is identically 0";
  } else if (single && coords[0].rfind("phi_", 0) == 0) {
    out << "node " << strip_prefix(coords[0])
        << ": no attached capacitance; its conjugate node charge is identically 0";
  } else {
    out << "coordinates ";
    list(coords, [](const std::string& s) { return s; });
    out << ": no capacitive path to ground; conjugate charge is identically 0";
  }
  return out.str();
}

}  // namespace

QuantizabilityDiagnosis diagnose_quantizability(const QuadraticLagrangian& lag) {
  QuantizabilityDiagnosis d;
  d.representation = lag.representation;
  const auto dim = static_cast<Eigen::Index>(lag.dimension());
  if (dim == 0) return d;

  std::vector<const Branch*> kinetic;
  for (const auto& b : lag.branches)
    if (b.kinetic) kinetic.push_back(&b);
  Eigen::MatrixXd rows(kinetic.size(), dim);
  for (std::size_t i = 0; i < kinetic.size(); ++i) rows.row(i) = kinetic[i]->row.transpose();

  for (auto& v : exact_null_space(rows)) d.null_space.push_back({v, attribute(lag, v)});
  d.quantizable = d.null_space.empty();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lag.mass, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (!(top > 0.0) || ev(i) < 1e-12 * top) ++d.numeric_nullity;
  return d;
}

double HamiltonianSystem::energy(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const {
  return 0.5 * p.dot(inv_mass * p) + 0.5 * x.dot(stiffness * x);
}

HamiltonianSystem legendre_transform(const QuadraticLagrangian& lag) {
  auto diagnosis = diagnose_quantizability(lag);
  if (!diagnosis.quantizable || diagnosis.numeric_nullity > 0)
    throw SingularKineticMatrix(std::move(diagnosis));

  HamiltonianSystem h;
  h.representation = lag.representation;
  h.labels = lag.labels;
  h.mass = lag.mass;
  h.stiffness = lag.stiffness;
  Eigen::LLT<Eigen::MatrixXd> llt(lag.mass);
  if (llt.info() != Eigen::Success) throw SingularKineticMatrix(std::move(diagnosis));
  const auto n = lag.mass.rows();
  h.inv_mass = llt.solve(Eigen::MatrixXd::Identity(n, n));
  h.inv_mass = 0.5 * (h.inv_mass + h.inv_mass.transpose()).eval();

  std::vector<const Branch*> kin, pot;
  for (const auto& b : lag.branches) (b.kinetic ? kin : pot).push_back(&b);
  auto fill = [n](const std::vector<const Branch*>& bs, Eigen::MatrixXd& rows, Eigen::VectorXd& w) {
    rows.resize(static_cast<Eigen::Index>(bs.size()), n);
    w.resize(static_cast<Eigen::Index>(bs.size()));
    for (std::size_t i = 0; i < bs.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = bs[i]->row.transpose();
      w(static_cast<Eigen::Index>(i)) = bs[i]->weight();
    }
  };
  fill(kin, h.kinetic_rows, h.kinetic_weights);
  fill(pot, h.potential_rows, h.potential_weights);
  return h;
}

namespace {

bool has_factors(const HamiltonianSystem& h) {
  const auto n = h.mass.rows();
  return h.kinetic_rows.cols() == n && h.potential_rows.cols() == n &&
         h.kinetic_weights.size() == h.kinetic_rows.rows() && h.potential_weights.size() == h.potential_rows.rows();
}

bool integer_valued(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double x) { return x == std::round(x) ? 0.0 : 1.0; }).sum() == 0.0;
}

}  // namespace

ModeDecomposition normal_modes(const HamiltonianSystem& h) {
  const auto n = h.mass.rows();
  ModeDecomposition md;
  if (n == 0) return md;

  // M = L L^T;  L^-1 K L^-T u = w^2 u;  v = L^-T u.
  Eigen::LLT<Eigen::MatrixXd> llt(h.mass);
  const Eigen::MatrixXd lower = llt.matrixL();
  Eigen::MatrixXd a = llt.matrixL().solve(h.stiffness);
  a = llt.matrixL().solve(a.transpose()).eval();
  a = 0.5 * (a + a.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::MatrixXd v = lower.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());

  // Rayleigh quotients on the original pencil: the eigenvector error is O(eps),
  // so the quotient is accurate to O(eps^2 lambda_max) even for widely spread modes.
  const bool factors = has_factors(h);
  Eigen::VectorXd lambda(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd col = v.col(k);
    const double t = factors ? h.kinetic_weights.dot((h.kinetic_rows * col).cwiseAbs2()) : col.dot(h.mass * col);
    const double u = factors ? h.potential_weights.dot((h.potential_rows * col).cwiseAbs2())
                             : std::max(0.0, col.dot(h.stiffness * col));
    v.col(k) /= std::sqrt(t);
    lambda(k) = u / t;
  }

  std::size_t nullity = 0;
  if (factors && integer_valued(h.potential_rows)) {
    nullity = static_cast<std::size_t>(n) - exact_rank(h.potential_rows);
  } else {
    const double top = lambda.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < n; ++k)
      if (!(top > 0.0) || lambda(k) < 1e-12 * top) ++nullity;
  }

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index k = 0; k < n; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return lambda(i) < lambda(j); });

  md.modes.resize(n, n);
  md.omegas.resize(n);
  md.zero_modes = nullity;
  for (Eigen::Index k = 0; k < n; ++k) {
    md.modes.col(k) = v.col(order[k]);
    md.omegas(k) = md.is_zero_mode(k) ? 0.0 : std::sqrt(lambda(order[k]));
  }
  // Fix the sign so each mode's largest component is positive.
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index imax = 0;
    md.modes.col(k).cwiseAbs().maxCoeff(&imax);
    if (md.modes(imax, k) < 0) md.modes.col(k) *= -1.0;
  }
  return md;
}

GaussianState ground_state(const ModeDecomposition& md, const HamiltonianSystem& h) {
  const auto n = h.mass.rows();
  Eigen::VectorXd var_x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd var_p = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (md.is_zero_mode(k)) continue;
    var_x(k) = h.hbar / (2.0 * md.omegas(k));
    var_p(k) = h.hbar * md.omegas(k) / 2.0;
  }
  const Eigen::MatrixXd& v = md.modes;
  const Eigen::MatrixXd mv = h.mass * v;
  GaussianState s;
  s.mean = Eigen::VectorXd::Zero(2 * n);
  s.cov = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  s.cov.topLeftCorner(n, n) = v * var_x.asDiagonal() * v.transpose();
  s.cov.bottomRightCorner(n, n) = mv * var_p.asDiagonal() * mv.transpose();
  return s;
}

Eigen::VectorXd mode_uncertainty_products(const GaussianState& state, const ModeDecomposition& md,
                                          const HamiltonianSystem& h) {
  const auto n = h.mass.rows();
  // x~ = V^T M x, p~ = V^T p.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  t.topLeftCorner(n, n) = md.modes.transpose() * h.mass;
  t.bottomRightCorner(n, n) = md.modes.transpose();
  const Eigen::MatrixXd c = t * state.cov * t.transpose();
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) out(k) = std::sqrt(c(k, k) * c(n + k, n + k) - c(k, n + k) * c(n + k, k));
  return out;
}

CoordinateSpread coordinate_spreads(const GaussianState& state) {
  const auto n = state.cov.rows() / 2;
  CoordinateSpread s{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    s.delta_x(i) = std::sqrt(state.cov(i, i));
    s.delta_p(i) = std::sqrt(state.cov(n + i, n + i));
  }
  return s;
}

std::vector<ModeAttribution> mode_attribution(const ModeDecomposition& md, const HamiltonianSystem& h) {
  const auto n = h.mass.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.mass);
  const Eigen::MatrixXd weights = (es.operatorSqrt() * md.modes).cwiseAbs();

  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> candidates;  // (-w, coord, mode)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) candidates.emplace_back(-weights(i, k), i, k);
  std::sort(candidates.begin(), candidates.end());

  std::vector<Eigen::Index> mode_of(n, -1);
  std::vector<bool> mode_taken(n, false);
  for (const auto& [w, i, k] : candidates) {
    if (mode_of[i] >= 0 || mode_taken[k]) continue;
    mode_of[i] = k;
    mode_taken[k] = true;
  }
  std::vector<ModeAttribution> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back({h.labels[i], mode_of[i], md.omegas(mode_of[i])});
  return out;
}

Eigen::MatrixXd evolution_matrix(const HamiltonianSystem& h, const ModeDecomposition& md, double t) {
  const auto n = h.mass.rows();
  Eigen::VectorXd c(n), s_over_w(n), w_s(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = md.omegas(k);
    if (md.is_zero_mode(k)) {
      c(k) = 1.0;
      s_over_w(k) = t;
      w_s(k) = 0.0;
    } else {
      c(k) = std::cos(w * t);
      s_over_w(k) = std::sin(w * t) / w;
      w_s(k) = w * std::sin(w * t);
    }
  }
  const Eigen::MatrixXd& v = md.modes;
  const Eigen::MatrixXd mv = h.mass * v;
  Eigen::MatrixXd phi(2 * n, 2 * n);
  phi.topLeftCorner(n, n) = v * c.asDiagonal() * mv.transpose();
  phi.topRightCorner(n, n) = v * s_over_w.asDiagonal() * v.transpose();
  phi.bottomLeftCorner(n, n) = -mv * w_s.asDiagonal() * mv.transpose();
  phi.bottomRightCorner(n, n) = mv * c.asDiagonal() * v.transpose();
  return phi;
}

GaussianState evolve_state(const GaussianState& state, const HamiltonianSystem& h,
                           const ModeDecomposition& md, double t) {
  const Eigen::MatrixXd phi = evolution_matrix(h, md, t);
  return {phi * state.mean, phi * state.cov * phi.transpose()};
}

}  // namespace fluxq
