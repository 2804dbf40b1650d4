#include "loattack/measurement_sim.hpp"

#include "loattack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace loattack::sim {
namespace {

enum class Stream : std::uint32_t { Alice = 0, Channel = 1 };

std::mt19937_64 make_engine(std::uint64_t seed, std::size_t sub_batch, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sub_batch),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(sub_batch) >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Calls fn(sub_batch_index, begin, end) for every sub-batch, spread over threads.
template <typename Fn>
void for_each_sub_batch(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t count = (n + kSubBatchSize - 1) / kSubBatchSize;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  auto run = [&](std::size_t first) {
    for (std::size_t k = first; k < count; k += threads) {
      fn(k, k * kSubBatchSize, std::min(n, (k + 1) * kSubBatchSize));
    }
  };
  if (threads <= 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run, w);
}

}  // namespace

PulseBatch generate_batch(const ProtocolParams& p, std::size_t n, std::uint64_t seed,
                          unsigned threads) {
  if (n == 0) throw ContractViolation("generate_batch: need at least one pulse");
  if (!(p.modulation_variance >= 0.0)) throw ConfigError("generate_batch: V_S must be >= 0");
  if (!(p.lo_transmission > 0.0 && p.lo_transmission <= 1.0)) {
    throw ConfigError("generate_batch: eta must lie in (0, 1]");
  }
  PulseBatch batch;
  batch.seed = seed;
  batch.x_alice.resize(n);
  batch.quad_choice.resize(n);
  batch.eta_per_pulse.assign(n, p.lo_transmission);
  const double sd = std::sqrt(p.modulation_variance);
  for_each_sub_batch(n, threads, [&](std::size_t k, std::size_t begin, std::size_t end) {
    auto engine = make_engine(seed, k, Stream::Alice);
    std::normal_distribution<double> normal;
    std::bernoulli_distribution coin;
    for (std::size_t i = begin; i < end; ++i) {
      batch.x_alice[i] = sd * normal(engine);
      batch.quad_choice[i] = coin(engine) ? gaussian::Quadrature::P : gaussian::Quadrature::Q;
    }
  });
  return batch;
}

Measurements channel_and_measure(const PulseBatch& batch, const ProtocolParams& p,
                                 Monitoring monitoring, unsigned threads) {
  const std::size_t n = batch.size();
  if (batch.quad_choice.size() != n || batch.eta_per_pulse.size() != n) {
    throw ContractViolation("channel_and_measure: batch arrays differ in length");
  }
  for (double eta : batch.eta_per_pulse) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw ContractViolation("channel_and_measure: per-pulse eta outside (0, 1]");
    }
  }
  const double t = p.transmission;
  if (!(t > 0.0 && t <= 1.0)) throw ConfigError("channel_and_measure: T must lie in (0, 1]");
  const double noise_sd = std::sqrt(t < 1.0 ? p.resolved_noise() : p.noise.value_or(1.0));
  const double sqrt_t = std::sqrt(t);
  const double sqrt_loss = std::sqrt(1.0 - t);

  Measurements out;
  out.monitoring = monitoring;
  out.x_bob_raw.resize(n);
  out.x_bob.resize(n);
  for_each_sub_batch(n, threads, [&](std::size_t k, std::size_t begin, std::size_t end) {
    auto engine = make_engine(batch.seed, k, Stream::Channel);
    std::normal_distribution<double> normal;
    for (std::size_t i = begin; i < end; ++i) {
      const double vacuum = normal(engine);
      const double eve = noise_sd * normal(engine);
      const double x_a = batch.x_alice[i] + vacuum;
      const double x_b = sqrt_t * x_a + sqrt_loss * eve;
      out.x_bob_raw[i] = x_b;
      out.x_bob[i] =
          monitoring == Monitoring::Monitored ? x_b : std::sqrt(batch.eta_per_pulse[i]) * x_b;
    }
  });
  return out;
}

EstimatorOutput estimate_channel(std::span<const double> x_alice,
                                 std::span<const double> measurements,
                                 double assumed_shot_noise) {
  const std::size_t n = x_alice.size();
  if (measurements.size() != n) {
    throw ContractViolation("estimate_channel: encodings and measurements differ in length");
  }
  if (n < kMinEstimationSamples) {
    throw EstimationError("estimate_channel: need at least 10^4 samples");
  }
  double mean_s = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_s += x_alice[i];
    mean_b += measurements[i];
  }
  mean_s /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double var_s = 0.0;
  double var_b = 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ds = x_alice[i] - mean_s;
    const double db = measurements[i] - mean_b;
    var_s += ds * ds;
    var_b += db * db;
    cov += ds * db;
  }
  const double dof = static_cast<double>(n - 1);
  var_s /= dof;
  var_b /= dof;
  cov /= dof;
  if (!(var_s > 0.0)) {
    throw EstimationError("estimate_channel: encodings have zero variance (no modulation)");
  }
  EstimatorOutput out;
  out.n_used = n;
  out.v_s_hat = var_s;
  out.v_b_hat = var_b;
  const double gain = cov / var_s;
  out.t_hat = gain * gain;
  out.residual = var_b - out.t_hat * var_s;
  if (!(out.t_hat > 0.0)) {
    throw EstimationError("estimate_channel: no correlation between encodings and outputs");
  }
  out.eps_hat = (out.residual - assumed_shot_noise) / out.t_hat;
  return out;
}

ImpliedChannel implied_channel(const EstimatorOutput& e) {
  if (!(e.t_hat > 0.0) || !std::isfinite(e.eps_hat)) {
    throw EstimationError("implied_channel: estimate is degenerate");
  }
  const double t = std::min(e.t_hat, 1.0);
  if (t >= 1.0) return {1.0, 1.0};
  return {t, std::max(1.0, 1.0 + t * e.eps_hat / (1.0 - t))};
}

SimulationResult simulate(const ProtocolParams& p, std::size_t n, std::uint64_t seed,
                          unsigned threads) {
  p.validate();
  const auto batch = generate_batch(p, n, seed, threads);
  const auto monitored = channel_and_measure(batch, p, Monitoring::Monitored, threads);
  const auto unmonitored = channel_and_measure(batch, p, Monitoring::Unmonitored, threads);

  SimulationResult result;
  result.monitored = estimate_channel(batch.x_alice, monitored.x_bob);
  result.unmonitored = estimate_channel(batch.x_alice, unmonitored.x_bob);

  const auto actual = implied_channel(result.monitored);
  ProtocolParams inferred = p;
  inferred.transmission = actual.transmission;
  inferred.noise = actual.noise;
  inferred.lo_transmission = std::min(1.0, result.unmonitored.t_hat / result.monitored.t_hat);
  result.report = keyrate::keyrates(inferred);
  return result;
}

keyrate::KeyRateReport simulated_keyrates(const ProtocolParams& p, std::size_t n,
                                          std::uint64_t seed) {
  return simulate(p, n, seed).report;
}

}  // namespace loattack::sim
