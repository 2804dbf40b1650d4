#include "loattack/cloner_oracle.hpp"

#include "loattack/errors.hpp"

#include <cmath>
#include <sstream>

namespace loattack::cloner {
namespace {

using gaussian::CovarianceMatrix;

std::array<double, 2> symplectic_pair(double delta, double det) {
  double radicand = delta * delta - 4.0 * det;
  if (radicand < 0.0 && radicand > -gaussian::kClampTolerance) radicand = 0.0;
  const double root = std::sqrt(radicand);
  double lo = 0.5 * (delta - root);
  if (lo < 0.0 && lo > -gaussian::kClampTolerance) lo = 0.0;
  return {std::sqrt(lo), std::sqrt(0.5 * (delta + root))};
}

CovarianceMatrix eve_matrix(double v_e1_q, double v_e1_p, double z, double n) {
  Eigen::Matrix4d g;
  g << v_e1_q, 0, z, 0,
       0, v_e1_p, 0, -z,
       z, 0, n, 0,
       0, -z, 0, n;
  return CovarianceMatrix(g);
}

}  // namespace

ClonerState eve_covariance(double v, double t, double n) {
  if (!(t > 0.0 && t < 1.0)) {
    std::ostringstream msg;
    msg << "entangling cloner needs 0 < T < 1, got " << t;
    throw SingularityError(msg.str());
  }
  if (!(v >= 1.0) || !(n >= 1.0)) {
    throw ContractViolation("entangling cloner needs V >= 1 and N >= 1");
  }
  const double epr = std::sqrt(n * n - 1.0);
  const double v_e1 = (1.0 - t) * v + t * n;
  const double z_e1e2 = std::sqrt(t) * epr;
  return ClonerState{
      .v_e1 = v_e1,
      .v_e1_given_a = (1.0 - t) + t * n,
      .z_e1e2 = z_e1e2,
      .z_e1b = std::sqrt(t * (1.0 - t)) * (n - v),
      .z_e2b = std::sqrt(1.0 - t) * epr,
      .v_b = t * v + (1.0 - t) * n,
      .gamma_e = eve_matrix(v_e1, v_e1, z_e1e2, n),
  };
}

CovarianceMatrix eve_given_alice(const ClonerState& s) {
  return eve_matrix(s.v_e1_given_a, s.v_e1, s.z_e1e2, s.gamma_e(2, 2));
}

CovarianceMatrix eve_given_bob(const ClonerState& s) {
  const double n = s.gamma_e(2, 2);
  const Eigen::Matrix2d f{{s.v_e1 - s.z_e1b * s.z_e1b / s.v_b, 0.0}, {0.0, s.v_e1}};
  const Eigen::Matrix2d g{{n - s.z_e2b * s.z_e2b / s.v_b, 0.0}, {0.0, n}};
  const Eigen::Matrix2d h{{s.z_e1e2 - s.z_e1b * s.z_e2b / s.v_b, 0.0}, {0.0, -s.z_e1e2}};
  Eigen::Matrix4d m;
  m << f, h.transpose(), h, g;
  return CovarianceMatrix(m);
}

std::array<double, 2> eve_symplectic_eigenvalues(const ClonerState& s) {
  const double n = s.gamma_e(2, 2);
  const double z2 = s.z_e1e2 * s.z_e1e2;
  const double delta = s.v_e1 * s.v_e1 + n * n - 2.0 * z2;
  const double root_d = s.v_e1 * n - z2;
  return symplectic_pair(delta, root_d * root_d);
}

std::array<double, 2> eve_given_alice_symplectic_eigenvalues(const ClonerState& s) {
  const double n = s.gamma_e(2, 2);
  const double z2 = s.z_e1e2 * s.z_e1e2;
  const double a = s.v_e1_given_a * s.v_e1 + n * n - 2.0 * z2;
  const double b = (s.v_e1_given_a * n - z2) * (s.v_e1 * n - z2);
  return symplectic_pair(a, b);
}

std::array<double, 2> eve_given_bob_symplectic_eigenvalues(const ClonerState& s) {
  const auto cond = eve_given_bob(s);
  const double c = cond.block(0, 0).determinant() + cond.block(1, 1).determinant() +
                   2.0 * cond.block(1, 0).determinant();
  const double d = cond.matrix().determinant();
  return symplectic_pair(c, d);
}

double eve_entropy(double v, double t, double n) {
  return gaussian::entropy_from_spectrum(eve_symplectic_eigenvalues(eve_covariance(v, t, n)));
}

double holevo_ae_cloner(double v, double t, double n) {
  const auto s = eve_covariance(v, t, n);
  return gaussian::entropy_from_spectrum(eve_symplectic_eigenvalues(s)) -
         gaussian::entropy_from_spectrum(eve_given_alice_symplectic_eigenvalues(s));
}

double holevo_be_cloner(double v, double t, double n) {
  const auto s = eve_covariance(v, t, n);
  return gaussian::entropy_from_spectrum(eve_symplectic_eigenvalues(s)) -
         gaussian::entropy_from_spectrum(eve_given_bob_symplectic_eigenvalues(s));
}

}  // namespace loattack::cloner
