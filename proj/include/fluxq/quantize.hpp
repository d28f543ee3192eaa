#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxq/lagrangian.hpp"

namespace fluxq {

inline constexpr double kHbar = 1.054571817e-34;  // J s

struct NullDirection {
  Eigen::VectorXd vector;
  std::string attribution;
};

struct QuantizabilityDiagnosis {
  Representation representation;
  bool quantizable = true;
  std::vector<NullDirection> null_space;  ///< structural kernel of M
  std::size_t numeric_nullity = 0;        ///< eigenvalues of M below 1e-12 x max

  std::string summary() const;
};

QuantizabilityDiagnosis diagnose_quantizability(const QuadraticLagrangian& lagrangian);

class SingularKineticMatrix : public std::runtime_error {
 public:
  explicit SingularKineticMatrix(QuantizabilityDiagnosis diagnosis);
  const QuantizabilityDiagnosis& diagnosis() const { return diagnosis_; }

 private:
  QuantizabilityDiagnosis diagnosis_;
};

/// H = p^T M^-1 p / 2 + x^T K x / 2 with p = M xdot.
struct HamiltonianSystem {
  Representation representation;
  std::vector<std::string> labels;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd inv_mass;
  Eigen::MatrixXd stiffness;
  double hbar = kHbar;
  /// Branch rows (one per row) and weights with M = Bk^T diag(wk) Bk and
  /// K = Bp^T diag(wp) Bp. Optional; used for accurate Rayleigh quotients and
  /// the structural zero-mode count.
  Eigen::MatrixXd kinetic_rows;
  Eigen::VectorXd kinetic_weights;
  Eigen::MatrixXd potential_rows;
  Eigen::VectorXd potential_weights;

  std::size_t dimension() const { return labels.size(); }
  double energy(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const;
};

/// Throws SingularKineticMatrix when M has a kernel.
HamiltonianSystem legendre_transform(const QuadraticLagrangian& lagrangian);

/// Solutions of K v = w^2 M v, ascending, with V^T M V = I.
struct ModeDecomposition {
  Eigen::VectorXd omegas;
  Eigen::MatrixXd modes;
  std::size_t zero_modes = 0;

  bool is_zero_mode(Eigen::Index k) const { return k < static_cast<Eigen::Index>(zero_modes); }
};

ModeDecomposition normal_modes(const HamiltonianSystem& h);

/// Phase-space Gaussian over (x..., p...).
struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Vacuum of every oscillating mode. Zero modes carry no spread.
GaussianState ground_state(const ModeDecomposition& modes, const HamiltonianSystem& h);

/// sqrt(det) of each mode's 2x2 covariance block in mass-normalised coordinates;
/// equals sqrt(<x~_k^2><p~_k^2>) for uncorrelated states.
Eigen::VectorXd mode_uncertainty_products(const GaussianState& state, const ModeDecomposition& modes,
                                          const HamiltonianSystem& h);

struct CoordinateSpread {
  Eigen::VectorXd delta_x;
  Eigen::VectorXd delta_p;
};

CoordinateSpread coordinate_spreads(const GaussianState& state);

struct ModeAttribution {
  std::string coordinate;
  Eigen::Index mode;
  double omega;
};

/// One mode per coordinate, by descending |(M^{1/2} V)_ik|.
std::vector<ModeAttribution> mode_attribution(const ModeDecomposition& modes, const HamiltonianSystem& h);

/// Exact propagator z(t) = Phi(t) z(0) on z = (x, p).
Eigen::MatrixXd evolution_matrix(const HamiltonianSystem& h, const ModeDecomposition& modes, double t);

GaussianState evolve_state(const GaussianState& state, const HamiltonianSystem& h,
                           const ModeDecomposition& modes, double t);

}  // namespace fluxq
