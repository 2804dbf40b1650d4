#include "loattack/keyrate.hpp"

#include "loattack/errors.hpp"

#include <cmath>
#include <sstream>

namespace loattack::keyrate {
namespace {

using gaussian::CovarianceMatrix;

struct AbInvariants {
  double a;
  double b;
  double c;
};

AbInvariants ab_invariants(double v, double t, double n) {
  if (!(v >= 1.0) || !(t > 0.0 && t <= 1.0) || !(n >= 1.0)) {
    std::ostringstream msg;
    msg << "keyrate: parameters out of range (V=" << v << ", T=" << t << ", N=" << n << ")";
    throw ContractViolation(msg.str());
  }
  return {v, t * v + (1.0 - t) * n, std::sqrt(t * (v * v - 1.0))};
}

double clamped(double x) {
  return (x < 0.0 && x > -gaussian::kClampTolerance) ? 0.0 : x;
}

// sqrt((s -+ sqrt(s^2 - 4 p)) / 2)
std::array<double, 2> pair_from_invariants(double s, double p) {
  const double root = std::sqrt(clamped(s * s - 4.0 * p));
  return {std::sqrt(clamped(0.5 * (s - root))), std::sqrt(clamped(0.5 * (s + root)))};
}

double entropy_ab(double v, double t, double n) {
  const auto nus = ab_symplectic_eigenvalues(v, t, n);
  return gaussian::entropy_from_spectrum(nus);
}

}  // namespace

KeyRateReport make_report(double i_ab, double holevo_true, double holevo_pseudo) {
  KeyRateReport r;
  r.i_ab = i_ab;
  r.holevo_true = holevo_true;
  r.holevo_pseudo = holevo_pseudo;
  r.k_true = i_ab - holevo_true;
  r.k_pseudo = i_ab - holevo_pseudo;
  r.intercepted = r.k_pseudo - r.k_true;
  r.secure = r.k_true > 0.0;
  return r;
}

double mutual_info_ab(const ProtocolParams& p, Monitoring m) {
  const auto vb = channel::bob_variances(p, m);
  return 0.5 * std::log2(vb.v_b / vb.v_b_given_a);
}

std::array<double, 2> ab_symplectic_eigenvalues(double v, double t, double n) {
  const auto [a, b, c] = ab_invariants(v, t, n);
  const double big_a = a * a + b * b - 2.0 * c * c;
  const double big_b = a * b - c * c;
  return pair_from_invariants(big_a, big_b * big_b);
}

double a_given_b_symplectic_eigenvalue(double v, double t, double n) {
  const double b = ab_invariants(v, t, n).b;
  return std::sqrt(((1.0 - t) * n * v * v + t * v) / b);
}

CovarianceMatrix conditional_bc_given_a(double v, double t, double n) {
  const auto [a, b, c] = ab_invariants(v, t, n);
  const double s2 = std::sqrt(2.0);
  Eigen::Matrix4d g;
  g << b - c * c / (a + 1.0), 0, s2 * c / (a + 1.0), 0,
       0, b, 0, -c / s2,
       s2 * c / (a + 1.0), 0, 2.0 * a / (a + 1.0), 0,
       0, -c / s2, 0, (a + 1.0) / 2.0;
  return CovarianceMatrix(g);
}

CovarianceMatrix conditional_bc_given_a_from_beam_splitter(double v, double t, double n) {
  ProtocolParams p;
  p.modulation_variance = v - 1.0;
  p.transmission = t;
  p.noise = n;
  // modes: A0, B, C0
  const auto a0_b_c0 =
      gaussian::direct_sum(channel::covariance_ab(p, Monitoring::Monitored),
                           CovarianceMatrix::vacuum(1));
  const std::size_t reorder[] = {0, 2, 1};
  // modes: A, C, B after mixing A0 with C0
  const auto acb = gaussian::symplectic_transform(gaussian::select_modes(a0_b_c0, reorder),
                                                  gaussian::beam_splitter(3, 0, 1, 0.5));
  const auto cb = gaussian::conditional_covariance_homodyne(acb, 0, gaussian::Quadrature::Q);
  const std::size_t bc[] = {1, 0};
  return gaussian::select_modes(cb, bc);
}

std::array<double, 2> bc_given_a_symplectic_eigenvalues(double v, double t, double n) {
  const auto [a, b, c] = ab_invariants(v, t, n);
  const double big_a = a * a + b * b - 2.0 * c * c;
  const double big_b = a * b - c * c;
  const double big_c = (a + b * big_b + big_a) / (a + 1.0);
  const double big_d = big_b * (b + big_b) / (a + 1.0);
  return pair_from_invariants(big_c, big_d);
}

double holevo_be(double v, double t, double n) {
  const double lambda3 = a_given_b_symplectic_eigenvalue(v, t, n);
  const double conditional = gaussian::entropy_from_spectrum(std::span<const double>(&lambda3, 1));
  return entropy_ab(v, t, n) - conditional;
}

double holevo_ae(double v, double t, double n) {
  const auto nus = bc_given_a_symplectic_eigenvalues(v, t, n);
  return entropy_ab(v, t, n) - gaussian::entropy_from_spectrum(nus);
}

double holevo(Direction d, double v, double t, double n) {
  return d == Direction::Direct ? holevo_ae(v, t, n) : holevo_be(v, t, n);
}

KeyRateReport keyrates(const ProtocolParams& p) {
  p.validate();
  const double v = p.total_variance();
  const double t = p.transmission;
  const double eta = p.lo_transmission;
  const double n = p.resolved_noise();
  const double i_ab = mutual_info_ab(p, Monitoring::Monitored);
  const double chi_true = holevo(p.direction, v, t, n);
  const double chi_pseudo = holevo(p.direction, v, eta * t, 1.0);
  return make_report(i_ab, chi_true, chi_pseudo);
}

}  // namespace loattack::keyrate
