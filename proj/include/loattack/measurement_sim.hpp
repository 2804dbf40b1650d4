#pragma once

// Monte Carlo model of the prepare-and-measure pipeline: Gaussian
// modulation, Eve's channel, LO attenuation and Bob's homodyne outputs, plus
// covariance-based parameter estimation.
//
// Outputs are in shot-noise units. The homodyne gain and the LO amplitude
// are normalized out; only the LO transmission eta survives, as a sqrt(eta)
// factor on the outputs of a Bob who scales with the calibrated LO power.
//
// Random draws are organised in fixed sub-batches of kSubBatchSize pulses,
// each with its own engine seeded from (seed, sub-batch index, stream). The
// result is independent of how many threads generate the batch.

#include "loattack/channel_model.hpp"
#include "loattack/gaussian_core.hpp"
#include "loattack/keyrate.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace loattack::sim {

inline constexpr std::size_t kSubBatchSize = 1u << 16;
inline constexpr std::size_t kMinEstimationSamples = 10'000;

struct PulseBatch {
  std::vector<double> x_alice;                     // encoding X_S of the measured quadrature
  std::vector<gaussian::Quadrature> quad_choice;   // Bob's quadrature per pulse
  std::vector<double> eta_per_pulse;               // LO transmission per pulse, in (0, 1]
  std::uint64_t seed = 0;

  std::size_t size() const { return x_alice.size(); }
};

struct Measurements {
  std::vector<double> x_bob_raw;  // quadrature reaching the detector, before LO scaling
  std::vector<double> x_bob;      // what Bob records
  Monitoring monitoring = Monitoring::Monitored;
};

struct EstimatorOutput {
  double t_hat = 0.0;
  double eps_hat = 0.0;
  double v_b_hat = 0.0;
  double v_s_hat = 0.0;  // sample variance of Alice's encodings
  double residual = 0.0; // variance of x_B conditioned on x_S
  std::size_t n_used = 0;
};

// x_alice ~ Normal(0, V_S), uniform quadrature choice, constant eta.
// `threads` = 0 picks std::thread::hardware_concurrency().
PulseBatch generate_batch(const ProtocolParams& p, std::size_t n, std::uint64_t seed,
                          unsigned threads = 0);

// Per pulse: x_A = X_S + vacuum, E ~ Normal(0, N), x_B = sqrt(T) x_A + sqrt(1-T) E.
// Unmonitored outputs are sqrt(eta_i) x_B. The noise stream depends only on
// batch.seed, so monitored and unmonitored runs see the same noise.
Measurements channel_and_measure(const PulseBatch& batch, const ProtocolParams& p,
                                 Monitoring monitoring, unsigned threads = 0);

// t_hat = (cov(X_S, X_B) / V_S)^2 and eps_hat = (var(X_B) - t_hat V_S - N0) / t_hat,
// with V_S the sample variance of the encodings. Throws EstimationError on
// fewer than kMinEstimationSamples pulses or on zero modulation.
EstimatorOutput estimate_channel(std::span<const double> x_alice,
                                 std::span<const double> measurements,
                                 double assumed_shot_noise = 1.0);

// (T, N) implied by an estimate: eps = (1-T)(N-1)/T solved for N, with
// negative apparent excess noise read as N = 1 and t_hat capped at 1.
struct ImpliedChannel {
  double transmission;
  double noise;
};
ImpliedChannel implied_channel(const EstimatorOutput& e);

struct SimulationResult {
  EstimatorOutput monitored;
  EstimatorOutput unmonitored;
  keyrate::KeyRateReport report;
};

// Key rates from simulated data: the monitored estimate gives the actual
// (T, N), the ratio of unmonitored to monitored t_hat gives eta, and the
// resulting point goes through keyrate::keyrates.
SimulationResult simulate(const ProtocolParams& p, std::size_t n, std::uint64_t seed,
                          unsigned threads = 0);

keyrate::KeyRateReport simulated_keyrates(const ProtocolParams& p, std::size_t n,
                                          std::uint64_t seed);

}  // namespace loattack::sim
