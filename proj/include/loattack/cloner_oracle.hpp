#pragma once

// Entangling-cloner model of Eve: the channel is replaced by a beam splitter
// of transmission T whose second input is one half (E0) of an EPR pair of
// variance N. Eve keeps the reflected output E1 and the other half E2.
//
// Both Holevo bounds are computed here from Eve's own covariance matrices and
// serve as an independent check of the keyrate module. Nothing in this file
// calls into keyrate.

#include "loattack/gaussian_core.hpp"

#include <array>

namespace loattack::cloner {

struct ClonerState {
  double v_e1;          // (1-T)V + TN
  double v_e1_given_a;  // (1-T) + TN
  double z_e1e2;        // sqrt(T(N^2-1))
  double z_e1b;         // sqrt(T(1-T))(N-V)
  double z_e2b;         // sqrt(1-T) sqrt(N^2-1)
  double v_b;           // TV + (1-T)N
  gaussian::CovarianceMatrix gamma_e;
};

// Throws SingularityError for T outside (0, 1).
ClonerState eve_covariance(double v, double t, double n);

// E1 block diag(V_E1|A, V_E1): Eve's state after Alice's homodyne.
gaussian::CovarianceMatrix eve_given_alice(const ClonerState& s);

// Eve's state after Bob's homodyne of Q, assembled from the F, G, H blocks.
gaussian::CovarianceMatrix eve_given_bob(const ClonerState& s);

// Closed forms from the two-mode invariants (Delta, D).
std::array<double, 2> eve_symplectic_eigenvalues(const ClonerState& s);
std::array<double, 2> eve_given_alice_symplectic_eigenvalues(const ClonerState& s);
// C = det F + det G + 2 det H, D' = det(gamma_E^{X_B}).
std::array<double, 2> eve_given_bob_symplectic_eigenvalues(const ClonerState& s);

double eve_entropy(double v, double t, double n);

// S(E) - S(E|A)
double holevo_ae_cloner(double v, double t, double n);

// S(E) - S(E|B)
double holevo_be_cloner(double v, double t, double n);

}  // namespace loattack::cloner
