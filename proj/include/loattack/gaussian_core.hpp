#pragma once

// Symplectic linear algebra and entropy primitives for Gaussian states.
//
// All covariance matrices are in shot-noise units (vacuum quadrature
// variance = 1) with modes ordered (Q1, P1, Q2, P2, ...).

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace loattack::gaussian {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kClampTolerance = 1e-9;
inline constexpr double kPhysicalityTolerance = 1e-6;

enum class Quadrature { Q, P };

class CovarianceMatrix {
 public:
  // Throws ContractViolation if `m` is not square, of even size, finite and
  // symmetric to within kSymmetryTolerance (relative to the entry scale).
  explicit CovarianceMatrix(Eigen::MatrixXd m);

  static CovarianceMatrix vacuum(std::size_t n_modes);

  std::size_t n_modes() const { return static_cast<std::size_t>(m_.rows()) / 2; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  // 2x2 block coupling mode i (rows) to mode j (columns).
  Eigen::Matrix2d block(std::size_t i, std::size_t j) const;

 private:
  Eigen::MatrixXd m_;
};

struct SymplecticSpectrum {
  std::vector<double> eigenvalues;  // ascending, one per mode

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

// (x+1)log2(x+1) - x log2 x, with G(0) = 0. Negatives above -1e-12 clamp to 0;
// anything lower throws std::domain_error.
double g_entropy(double x);

// Generic route: absolute values of the spectrum of i*Omega*cov, paired.
SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cov);

// Two-mode closed form from the symplectic invariants
// Delta = det A + det B + 2 det C and det(cov).
std::array<double, 2> two_mode_symplectic_eigenvalues(const CovarianceMatrix& cov);

// Sum of g((nu-1)/2). Throws PhysicalityError if any nu < 1 - 1e-6.
double entropy_from_spectrum(std::span<const double> nus);

double von_neumann_entropy(const CovarianceMatrix& cov);

bool is_physical(const CovarianceMatrix& cov, double tolerance = kClampTolerance);

// gamma_kept - sigma^T (X gamma_m X)^MP sigma for a homodyne measurement of
// `quadrature` on `measured_mode`. Remaining modes keep their relative order.
CovarianceMatrix conditional_covariance_homodyne(const CovarianceMatrix& cov_joint,
                                                 std::size_t measured_mode,
                                                 Quadrature quadrature);

Eigen::MatrixXd symplectic_form(std::size_t n_modes);

// Beam splitter on modes (i, j) mapping
//   x_i -> sqrt(t) x_i + sqrt(1-t) x_j,   x_j -> sqrt(1-t) x_i - sqrt(t) x_j
// for both quadratures. The reflected port carries a pi phase so that
// the transform is its own inverse.
Eigen::MatrixXd beam_splitter(std::size_t n_modes, std::size_t i, std::size_t j,
                              double transmissivity);

// S * cov * S^T.
CovarianceMatrix symplectic_transform(const CovarianceMatrix& cov, const Eigen::MatrixXd& s);

CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b);

// Covariance of the listed modes, in the listed order.
CovarianceMatrix select_modes(const CovarianceMatrix& cov, std::span<const std::size_t> modes);

}  // namespace loattack::gaussian
