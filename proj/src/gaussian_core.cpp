#include "loattack/gaussian_core.hpp"

#include "loattack/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace loattack::gaussian {

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0 || m_.rows() % 2 != 0) {
    throw ContractViolation("covariance matrix must be square with even, nonzero size");
  }
  if (!m_.allFinite()) {
    throw ContractViolation("covariance matrix has non-finite entries");
  }
  for (Eigen::Index r = 0; r < m_.rows(); ++r) {
    for (Eigen::Index c = r + 1; c < m_.cols(); ++c) {
      const double scale = std::max({1.0, std::abs(m_(r, c)), std::abs(m_(c, r))});
      if (std::abs(m_(r, c) - m_(c, r)) > kSymmetryTolerance * scale) {
        std::ostringstream msg;
        msg << "covariance matrix not symmetric at (" << r << ", " << c << ")";
        throw ContractViolation(msg.str());
      }
    }
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return CovarianceMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

Eigen::Matrix2d CovarianceMatrix::block(std::size_t i, std::size_t j) const {
  return m_.block<2, 2>(static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * j));
}

double g_entropy(double x) {
  if (!(x >= -1e-12)) {
    throw std::domain_error("g_entropy: argument below zero");
  }
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

Eigen::MatrixXd symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cov) {
  const std::size_t n = cov.n_modes();
  // Omega*cov is real with eigenvalues +-i*nu_k.
  const Eigen::MatrixXd w = symplectic_form(n) * cov.matrix();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(w, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symplectic_eigenvalues: eigen decomposition failed");
  }
  std::vector<double> mags;
  mags.reserve(2 * n);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    mags.push_back(std::abs(solver.eigenvalues()[k]));
  }
  std::sort(mags.begin(), mags.end());
  SymplecticSpectrum out;
  out.eigenvalues.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues.push_back(0.5 * (mags[2 * k] + mags[2 * k + 1]));
  }
  return out;
}

std::array<double, 2> two_mode_symplectic_eigenvalues(const CovarianceMatrix& cov) {
  if (cov.n_modes() != 2) {
    throw ContractViolation("two_mode_symplectic_eigenvalues: expected two modes");
  }
  const double delta = cov.block(0, 0).determinant() + cov.block(1, 1).determinant() +
                       2.0 * cov.block(0, 1).determinant();
  const double det = cov.matrix().determinant();
  double radicand = delta * delta - 4.0 * det;
  if (radicand < 0.0 && radicand > -kClampTolerance) radicand = 0.0;
  const double root = std::sqrt(radicand);
  double lo = 0.5 * (delta - root);
  if (lo < 0.0 && lo > -kClampTolerance) lo = 0.0;
  return {std::sqrt(lo), std::sqrt(0.5 * (delta + root))};
}

double entropy_from_spectrum(std::span<const double> nus) {
  double s = 0.0;
  for (double nu : nus) {
    if (!(nu >= 1.0 - kPhysicalityTolerance)) {
      std::ostringstream msg;
      msg << "unphysical symplectic eigenvalue " << nu;
      throw PhysicalityError(msg.str());
    }
    s += g_entropy(std::max(0.0, 0.5 * (nu - 1.0)));
  }
  return s;
}

double von_neumann_entropy(const CovarianceMatrix& cov) {
  const auto spectrum = symplectic_eigenvalues(cov);
  return entropy_from_spectrum(spectrum.eigenvalues);
}

bool is_physical(const CovarianceMatrix& cov, double tolerance) {
  return symplectic_eigenvalues(cov).min() >= 1.0 - tolerance;
}

CovarianceMatrix conditional_covariance_homodyne(const CovarianceMatrix& cov_joint,
                                                 std::size_t measured_mode,
                                                 Quadrature quadrature) {
  const std::size_t n = cov_joint.n_modes();
  if (measured_mode >= n) {
    throw ContractViolation("conditional_covariance_homodyne: measured mode out of range");
  }
  if (n == 1) {
    throw ContractViolation("conditional_covariance_homodyne: nothing left after measurement");
  }
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < n; ++k) {
    if (k != measured_mode) kept.push_back(k);
  }
  const Eigen::MatrixXd kept_block = select_modes(cov_joint, kept).matrix();

  // Correlations between the measured quadrature and every kept quadrature.
  const auto row = static_cast<Eigen::Index>(2 * measured_mode +
                                             (quadrature == Quadrature::Q ? 0 : 1));
  const double v = cov_joint(row, row);
  Eigen::VectorXd sigma(static_cast<Eigen::Index>(2 * kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(2 * kept[k]);
    sigma(static_cast<Eigen::Index>(2 * k)) = cov_joint(row, col);
    sigma(static_cast<Eigen::Index>(2 * k + 1)) = cov_joint(row, col + 1);
  }
  // Moore-Penrose inverse of diag(v, 0) is diag(1/v, 0), or zero when v = 0.
  const double pinv = v > 0.0 ? 1.0 / v : 0.0;
  Eigen::MatrixXd out = kept_block - pinv * sigma * sigma.transpose();
  out = 0.5 * (out + out.transpose()).eval();
  return CovarianceMatrix(std::move(out));
}

Eigen::MatrixXd beam_splitter(std::size_t n_modes, std::size_t i, std::size_t j,
                              double transmissivity) {
  if (i >= n_modes || j >= n_modes || i == j) {
    throw ContractViolation("beam_splitter: invalid mode pair");
  }
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
    throw ContractViolation("beam_splitter: transmissivity outside [0, 1]");
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
  const double t = std::sqrt(transmissivity);
  const double r = std::sqrt(1.0 - transmissivity);
  for (Eigen::Index q = 0; q < 2; ++q) {
    const auto a = static_cast<Eigen::Index>(2 * i) + q;
    const auto b = static_cast<Eigen::Index>(2 * j) + q;
    s(a, a) = t;
    s(a, b) = r;
    s(b, a) = r;
    s(b, b) = -t;
  }
  return s;
}

CovarianceMatrix symplectic_transform(const CovarianceMatrix& cov, const Eigen::MatrixXd& s) {
  if (s.rows() != cov.matrix().rows() || s.cols() != cov.matrix().cols()) {
    throw ContractViolation("symplectic_transform: dimension mismatch");
  }
  Eigen::MatrixXd out = s * cov.matrix() * s.transpose();
  out = 0.5 * (out + out.transpose()).eval();
  return CovarianceMatrix(std::move(out));
}

CovarianceMatrix direct_sum(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  const auto na = a.matrix().rows();
  const auto nb = b.matrix().rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(na + nb, na + nb);
  out.topLeftCorner(na, na) = a.matrix();
  out.bottomRightCorner(nb, nb) = b.matrix();
  return CovarianceMatrix(std::move(out));
}

CovarianceMatrix select_modes(const CovarianceMatrix& cov, std::span<const std::size_t> modes) {
  const std::size_t n = cov.n_modes();
  const auto dim = static_cast<Eigen::Index>(2 * modes.size());
  Eigen::MatrixXd out(dim, dim);
  for (std::size_t r = 0; r < modes.size(); ++r) {
    for (std::size_t c = 0; c < modes.size(); ++c) {
      if (modes[r] >= n || modes[c] >= n) {
        throw ContractViolation("select_modes: mode index out of range");
      }
      out.block<2, 2>(static_cast<Eigen::Index>(2 * r), static_cast<Eigen::Index>(2 * c)) =
          cov.block(modes[r], modes[c]);
    }
  }
  return CovarianceMatrix(std::move(out));
}

}  // namespace loattack::gaussian
