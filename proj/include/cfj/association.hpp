#pragma once

#include <cstddef>

#include "cfj/capacity.hpp"
#include "cfj/propagation.hpp"
#include "cfj/scenario.hpp"

namespace cfj {

/// Normal Wi-Fi: every user joins the AP it hears loudest at equal transmit
/// power (the nearest AP when all gains are equal). Ties go to the lower index.
Association associate_strongest_signal(const GainMatrix& g);

/// Secrecy-aware selection: every user joins the AP maximising
/// C(n,k) - C^e(n) with all APs at p_max. The difference is not clamped, so a
/// user with no positive option still gets the least-bad AP. Ties go to the
/// lower index.
Association associate_max_secrecy(const Scenario& scenario, const GainMatrix& g);

enum class IdleMode {
  baseline,  // APs serving nobody stay silent
  jamming,   // every AP transmits at p_max
};

PowerAllocation idle_ap_powers(const Association& a, std::size_t n_aps, IdleMode mode,
                               double p_max);

}  // namespace cfj
