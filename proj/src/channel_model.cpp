#include "loattack/channel_model.hpp"

#include "loattack/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace loattack {

std::string_view to_string(Direction d) {
  return d == Direction::Direct ? "dr" : "rr";
}

Direction parse_direction(std::string_view text) {
  if (text == "dr" || text == "direct") return Direction::Direct;
  if (text == "rr" || text == "reverse") return Direction::Reverse;
  throw ConfigError("unknown reconciliation direction '" + std::string(text) + "'");
}

double ProtocolParams::resolved_noise() const {
  if (noise) return *noise;
  return channel::noise_for_zero_excess(lo_transmission, transmission);
}

void ProtocolParams::validate() const {
  auto fail = [](const char* what, double value) {
    std::ostringstream msg;
    msg << what << " out of range: " << value;
    throw ConfigError(msg.str());
  };
  if (!(modulation_variance >= 0.0) || !std::isfinite(modulation_variance)) {
    fail("modulation variance V_S", modulation_variance);
  }
  if (!(transmission > 0.0 && transmission <= 1.0)) fail("channel transmission T", transmission);
  if (!(lo_transmission > 0.0 && lo_transmission <= 1.0)) fail("LO transmission eta", lo_transmission);
  if (noise && !(*noise >= 1.0 && std::isfinite(*noise))) fail("noise N", *noise);
}

namespace channel {

double transmission_from_distance(const LinkBudget& link) {
  if (!(link.distance_km >= 0.0) || !(link.loss_db_per_km > 0.0)) {
    throw ConfigError("link budget needs distance >= 0 and loss > 0");
  }
  return std::pow(10.0, -link.loss_db_per_km * link.distance_km / 10.0);
}

BobVariances bob_variances(const ProtocolParams& p, Monitoring m) {
  const double t = p.transmission;
  const double n = p.resolved_noise();
  BobVariances out{t * p.total_variance() + (1.0 - t) * n, t + (1.0 - t) * n};
  if (m == Monitoring::Unmonitored) {
    out.v_b *= p.lo_transmission;
    out.v_b_given_a *= p.lo_transmission;
  }
  return out;
}

gaussian::CovarianceMatrix covariance_ab(const ProtocolParams& p, Monitoring m) {
  const double v = p.total_variance();
  const double eta = m == Monitoring::Unmonitored ? p.lo_transmission : 1.0;
  const double b = eta * (p.transmission * v + (1.0 - p.transmission) * p.resolved_noise());
  const double c = std::sqrt(eta * p.transmission * (v * v - 1.0));
  Eigen::Matrix4d g;
  g << v, 0, c, 0,
       0, v, 0, -c,
       c, 0, b, 0,
       0, -c, 0, b;
  return gaussian::CovarianceMatrix(g);
}

double excess_noise(double transmission, double noise) {
  return (1.0 - transmission) * (noise - 1.0) / transmission;
}

double excess_noise_unmonitored(double eps, double transmission, double eta) {
  return eps - (1.0 / eta - 1.0) / transmission;
}

double noise_for_zero_excess(double eta, double transmission) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ConfigError("noise_for_zero_excess: eta must lie in (0, 1]");
  }
  if (!(transmission > 0.0 && transmission < 1.0)) {
    throw SingularityError(
        "noise_for_zero_excess: T must lie in (0, 1); a lossless channel leaves no port for "
        "the entangling cloner");
  }
  return (1.0 - eta * transmission) / (eta * (1.0 - transmission));
}

}  // namespace channel
}  // namespace loattack
