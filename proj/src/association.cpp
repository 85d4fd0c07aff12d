#include "cfj/association.hpp"

#include "cfj/error.hpp"

namespace cfj {

Association associate_strongest_signal(const GainMatrix& g) {
  Association a;
  a.ap.resize(g.n_users());
  for (std::size_t k = 0; k < g.n_users(); ++k) {
    std::size_t best = 0;
    for (std::size_t n = 1; n < g.n_aps(); ++n) {
      if (g.user(n, k) > g.user(best, k)) best = n;
    }
    a.ap[k] = best;
  }
  return a;
}

Association associate_max_secrecy(const Scenario& scenario, const GainMatrix& g) {
  const auto& radio = scenario.radio();
  const auto full = PowerAllocation::uniform(g.n_aps(), radio.p_max_watts);

  std::vector<double> eve_worst(g.n_aps());
  for (std::size_t n = 0; n < g.n_aps(); ++n) eve_worst[n] = max_eve_capacity(g, full, n, radio);

  Association a;
  a.ap.resize(g.n_users());
  for (std::size_t k = 0; k < g.n_users(); ++k) {
    std::size_t best = 0;
    double best_margin = user_capacity(g, full, 0, k, radio) - eve_worst[0];
    for (std::size_t n = 1; n < g.n_aps(); ++n) {
      const double margin = user_capacity(g, full, n, k, radio) - eve_worst[n];
      if (margin > best_margin) {
        best = n;
        best_margin = margin;
      }
    }
    a.ap[k] = best;
  }
  return a;
}

PowerAllocation idle_ap_powers(const Association& a, std::size_t n_aps, IdleMode mode,
                               double p_max) {
  if (mode == IdleMode::jamming) return PowerAllocation::uniform(n_aps, p_max);
  PowerAllocation p = PowerAllocation::uniform(n_aps, 0.0);
  for (auto n : a.ap) {
    if (n >= n_aps) {
      throw Error(ErrorCategory::dimension,
                  "association refers to AP " + std::to_string(n + 1) + " of " +
                      std::to_string(n_aps));
    }
    p.watts[n] = p_max;
  }
  return p;
}

}  // namespace cfj
