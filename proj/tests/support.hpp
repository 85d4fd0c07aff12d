#pragma once

#include <random>
#include <vector>

#include "cfj/scenario.hpp"
#include "oracle.hpp"

namespace testing_support {

inline oracle::Radio to_oracle(const cfj::RadioParams& r) {
  return {r.frequency_hz, r.gain_tx, r.gain_rx, r.path_loss_exp, r.noise_watts, r.bandwidth_hz,
          r.d_min_meters};
}

inline std::vector<oracle::Pt> to_oracle(const std::vector<cfj::Position>& ps) {
  std::vector<oracle::Pt> out;
  for (const auto& p : ps) out.push_back({p.x, p.y});
  return out;
}

/// Random scenario with counts drawn from [1, max_n] × [1, max_k] × [0, max_j].
inline cfj::Scenario random_small(std::mt19937_64& rng, std::size_t max_n, std::size_t max_k,
                                  std::size_t max_j) {
  std::uniform_int_distribution<std::size_t> dn(1, max_n), dk(1, max_k), dj(0, max_j);
  cfj::RandomSpec spec;
  spec.n_aps = dn(rng);
  spec.n_users = dk(rng);
  spec.n_eves = dj(rng);
  return cfj::generate_random_scenario(spec, rng());
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testing_support
