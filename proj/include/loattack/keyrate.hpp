#pragma once

// Mutual information, Holevo bounds and secret key rates for direct (DR) and
// reverse (RR) reconciliation with and without LO monitoring.
//
// Holevo bounds take (V, T, N): total variance V = V_S + 1, channel
// transmission T and the variance N of Eve's injected noise.

#include "loattack/channel_model.hpp"
#include "loattack/gaussian_core.hpp"

#include <array>

namespace loattack::keyrate {

// "true" quantities use the actual channel (T, N); "pseudo" ones use what an
// unmonitoring Bob infers, i.e. (eta T, 1) under zero apparent excess noise.
struct KeyRateReport {
  double i_ab = 0.0;
  double holevo_true = 0.0;
  double holevo_pseudo = 0.0;
  double k_true = 0.0;
  double k_pseudo = 0.0;
  double intercepted = 0.0;  // k_pseudo - k_true
  bool secure = false;       // k_true > 0
};

// Fills the derived fields. Negative key rates are kept as they are.
KeyRateReport make_report(double i_ab, double holevo_true, double holevo_pseudo);

// 0.5 log2(V_B / V_B|A). The ratio does not depend on eta.
double mutual_info_ab(const ProtocolParams& p, Monitoring m = Monitoring::Monitored);

// lambda_{1,2} of gamma_AB(V, T, N) in closed form.
std::array<double, 2> ab_symplectic_eigenvalues(double v, double t, double n);

// Symplectic eigenvalue of gamma_A conditioned on Bob's homodyne outcome.
double a_given_b_symplectic_eigenvalue(double v, double t, double n);

// gamma_BC conditioned on Alice's homodyne of mode A, entry by entry.
gaussian::CovarianceMatrix conditional_bc_given_a(double v, double t, double n);

// The same matrix built from gamma_A0B (+) vacuum_C0, a balanced beam splitter
// on (A0, C0), then homodyne of the Q quadrature of A.
gaussian::CovarianceMatrix conditional_bc_given_a_from_beam_splitter(double v, double t,
                                                                     double n);

// lambda_{4,5} of conditional_bc_given_a in closed form.
std::array<double, 2> bc_given_a_symplectic_eigenvalues(double v, double t, double n);

// chi_BE = S(AB) - S(A|B).
double holevo_be(double v, double t, double n);

// chi_AE = S(AB) - S(BC|A).
double holevo_ae(double v, double t, double n);

double holevo(Direction d, double v, double t, double n);

// Pseudo and true key rates for p.direction. N comes from p.resolved_noise().
KeyRateReport keyrates(const ProtocolParams& p);

}  // namespace loattack::keyrate
