#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxq/lagrangian.hpp"
#include "fluxq/netlist.hpp"
#include "fluxq/quantize.hpp"
#include "fluxq/simulate.hpp"
#include "fluxq/topology.hpp"

namespace support {

inline std::string fixture(const std::string& name) { return std::string(FLUXQ_FIXTURES) + "/" + name + ".net"; }

inline fluxq::Circuit load(const std::string& name) { return fluxq::load_netlist(fixture(name)); }

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline double ghz(double omega) { return omega / (2.0 * std::numbers::pi) / 1e9; }

/// Independent oracle for a 2x2 pencil K v = w^2 M v: roots of
/// det(M) l^2 - (K11 M22 + K22 M11 - 2 K12 M12) l + det(K) = 0, as GHz, ascending.
inline std::array<double, 2> pencil_ghz(const Eigen::MatrixXd& m, const Eigen::MatrixXd& k) {
  const long double a = (long double)m(0, 0) * m(1, 1) - (long double)m(0, 1) * m(1, 0);
  const long double b = -((long double)k(0, 0) * m(1, 1) + (long double)k(1, 1) * m(0, 0) -
                          2.0L * k(0, 1) * m(0, 1));
  const long double c = (long double)k(0, 0) * k(1, 1) - (long double)k(0, 1) * k(1, 0);
  const long double disc = std::sqrt(b * b - 4.0L * a * c);
  // Stable pair: large root from the non-cancelling branch, small root from Vieta.
  const long double big = (-b + disc) / (2.0L * a);
  const long double small = c / (a * big);
  auto f = [](long double l) { return static_cast<double>(std::sqrt(l) / (2.0L * std::numbers::pi_v<long double>) / 1e9L); };
  return {f(small), f(big)};
}

struct Solved {
  fluxq::Augmentation aug;
  fluxq::QuadraticLagrangian lag;
  fluxq::HamiltonianSystem h;
  fluxq::ModeDecomposition modes;
};

inline Solved solve(const fluxq::Circuit& c, fluxq::Representation rep,
                    fluxq::GeometricPolicy policy = {}) {
  Solved s;
  s.aug = fluxq::augment_geometric(c, policy);
  s.lag = fluxq::build_lagrangian(s.aug, rep);
  s.h = fluxq::legendre_transform(s.lag);
  s.modes = fluxq::normal_modes(s.h);
  return s;
}

inline fluxq::GeometricPolicy policy(fluxq::GeometricPolicy::Mode mode, double cg = 8.9e-20, double lg = 1e-15) {
  fluxq::GeometricPolicy p;
  p.mode = mode;
  p.default_cg = cg;
  p.default_lg = lg;
  return p;
}

/// Nonzero mode frequencies in GHz, ascending.
inline std::vector<double> nonzero_ghz(const fluxq::ModeDecomposition& md) {
  std::vector<double> out;
  for (Eigen::Index k = 0; k < md.omegas.size(); ++k)
    if (!md.is_zero_mode(k)) out.push_back(ghz(md.omegas(k)));
  std::sort(out.begin(), out.end());
  return out;
}

/// Capacitor spanning tree rooted at ground plus random inductors: every node is
/// capacitively grounded and every loop holds its own chord inductor.
inline fluxq::Circuit random_active_circuit(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nodes_dist(2, 8);
  std::uniform_real_distribution<double> cap(0.5e-12, 10e-12), ind(0.5e-9, 10e-9);
  const int n = nodes_dist(rng);  // including ground
  fluxq::Circuit c;
  std::vector<std::string> names{"0"};
  for (int i = 1; i < n; ++i) {
    names.push_back(std::to_string(i));
    std::uniform_int_distribution<int> parent(0, i - 1);
    const int p = parent(rng);
    c.add_component({"C" + std::to_string(i), fluxq::ComponentKind::Capacitor, cap(rng), names[i], names[p], false});
  }
  std::uniform_int_distribution<int> extra(1, n + 1), pick(0, n - 1);
  const int inductors = extra(rng);
  for (int k = 0; k < inductors; ++k) {
    int a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    c.add_component({"L" + std::to_string(k + 1), fluxq::ComponentKind::Inductor, ind(rng), names[a], names[b], false});
  }
  return c;
}

}  // namespace support
