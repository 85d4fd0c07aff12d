#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cfj/scenario.hpp"

namespace cfj {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// c / f. Throws Error(range) for a non-positive frequency.
double wavelength(double frequency_hz);

/// Friis free-space law generalised to exponent γ:
///   p_r = p_t · G_t · G_r · (λ / 4π)² · (1 / d)^γ
/// with d clamped to radio.d_min_meters.
double received_power(double p_t, const RadioParams& radio, double d);

double dbm_to_watts(double dbm) noexcept;
/// Throws Error(range) unless watts > 0.
double watts_to_dbm(double watts);

/// Received watts per transmitted watt for every AP→user and AP→eve link.
class GainMatrix {
 public:
  GainMatrix(std::size_t n_aps, std::size_t n_users, std::size_t n_eves);

  std::size_t n_aps() const noexcept { return n_aps_; }
  std::size_t n_users() const noexcept { return n_users_; }
  std::size_t n_eves() const noexcept { return n_eves_; }

  double user(std::size_t ap, std::size_t k) const noexcept { return user_[ap * n_users_ + k]; }
  double eve(std::size_t ap, std::size_t j) const noexcept { return eve_[ap * n_eves_ + j]; }
  double& user(std::size_t ap, std::size_t k) noexcept { return user_[ap * n_users_ + k]; }
  double& eve(std::size_t ap, std::size_t j) noexcept { return eve_[ap * n_eves_ + j]; }

  /// Row-major [n_aps × n_users] / [n_aps × n_eves] storage.
  std::span<const double> user_gains() const noexcept { return user_; }
  std::span<const double> eve_gains() const noexcept { return eve_; }

  friend bool operator==(const GainMatrix&, const GainMatrix&) = default;

 private:
  std::size_t n_aps_;
  std::size_t n_users_;
  std::size_t n_eves_;
  std::vector<double> user_;
  std::vector<double> eve_;
};

GainMatrix gain_matrix(const Scenario& scenario);

}  // namespace cfj
