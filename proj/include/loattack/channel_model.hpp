#pragma once

// Entanglement-based covariance matrices and the channel parameters Bob
// infers with and without local-oscillator (LO) intensity monitoring.

#include "loattack/gaussian_core.hpp"

#include <optional>
#include <string_view>

namespace loattack {

enum class Direction { Direct, Reverse };

enum class Monitoring { Monitored, Unmonitored };

std::string_view to_string(Direction d);
// Accepts "dr"/"direct" and "rr"/"reverse". Throws ConfigError otherwise.
Direction parse_direction(std::string_view text);

// One analysis point. Variances are in shot-noise units.
struct ProtocolParams {
  double modulation_variance = 20.0;  // V_S >= 0
  double transmission = 1.0;          // channel T in (0, 1]
  double lo_transmission = 1.0;       // LO eta in (0, 1]
  // Eve's injected-noise variance N >= 1. Unset means "tune for zero
  // apparent excess noise", see channel::noise_for_zero_excess.
  std::optional<double> noise;
  Direction direction = Direction::Reverse;

  double total_variance() const { return modulation_variance + 1.0; }

  // N actually used: the override if set, otherwise the zero-excess tuning.
  double resolved_noise() const;

  // Throws ConfigError on out-of-range fields.
  void validate() const;
};

struct LinkBudget {
  double distance_km = 0.0;
  double loss_db_per_km = 0.2;
};

namespace channel {

struct BobVariances {
  double v_b;
  double v_b_given_a;
};

double transmission_from_distance(const LinkBudget& link);

BobVariances bob_variances(const ProtocolParams& p, Monitoring m);

// Two-mode (A, B) covariance of the entanglement-based scheme.
gaussian::CovarianceMatrix covariance_ab(const ProtocolParams& p, Monitoring m);

// eps = (1-T)(N-1)/T
double excess_noise(double transmission, double noise);

// eps^w = eps - (1/eta - 1)/T
double excess_noise_unmonitored(double eps, double transmission, double eta);

// N = (1 - eta T) / (eta (1 - T)). Throws SingularityError at T = 1.
double noise_for_zero_excess(double eta, double transmission);

}  // namespace channel
}  // namespace loattack
