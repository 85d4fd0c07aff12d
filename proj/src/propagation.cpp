#include "cfj/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cfj/error.hpp"

namespace cfj {

double wavelength(double frequency_hz) {
  if (!(frequency_hz > 0.0)) {
    throw Error(ErrorCategory::range,
                "frequency must be positive (got " + std::to_string(frequency_hz) + " Hz)");
  }
  return kSpeedOfLight / frequency_hz;
}

double received_power(double p_t, const RadioParams& radio, double d) {
  if (p_t == 0.0) return 0.0;
  const double lambda = wavelength(radio.frequency_hz);
  const double a = lambda / (4.0 * std::numbers::pi);
  const double dc = std::max(d, radio.d_min_meters);
  return p_t * radio.gain_tx * radio.gain_rx * a * a * std::pow(1.0 / dc, radio.path_loss_exp);
}

double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) {
    throw Error(ErrorCategory::range,
                "watts_to_dbm needs a positive power (got " + std::to_string(watts) + " W)");
  }
  return 10.0 * std::log10(watts) + 30.0;
}

GainMatrix::GainMatrix(std::size_t n_aps, std::size_t n_users, std::size_t n_eves)
    : n_aps_(n_aps),
      n_users_(n_users),
      n_eves_(n_eves),
      user_(n_aps * n_users, 0.0),
      eve_(n_aps * n_eves, 0.0) {}

GainMatrix gain_matrix(const Scenario& scenario) {
  const auto& radio = scenario.radio();
  GainMatrix g(scenario.n_aps(), scenario.n_users(), scenario.n_eves());
  for (std::size_t n = 0; n < scenario.n_aps(); ++n) {
    const auto& ap = scenario.aps()[n];
    for (std::size_t k = 0; k < scenario.n_users(); ++k) {
      g.user(n, k) = received_power(1.0, radio, distance(ap, scenario.users()[k]));
    }
    for (std::size_t j = 0; j < scenario.n_eves(); ++j) {
      g.eve(n, j) = received_power(1.0, radio, distance(ap, scenario.eves()[j]));
    }
  }
  return g;
}

}  // namespace cfj
