#include "cfj/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cfj/error.hpp"
#include "cfj/kernels.hpp"

namespace cfj {
namespace {

void check_index(std::size_t i, std::size_t bound, const char* what) {
  if (i >= bound) {
    throw Error(ErrorCategory::range, std::string(what) + " index " + std::to_string(i) +
                                          " out of range (size " + std::to_string(bound) + ")");
  }
}

void check_power_size(const GainMatrix& g, const PowerAllocation& p) {
  if (p.size() != g.n_aps()) {
    throw Error(ErrorCategory::dimension, "power allocation has " + std::to_string(p.size()) +
                                              " entries, network has " +
                                              std::to_string(g.n_aps()) + " APs");
  }
}

double shannon(double signal, double interference, const RadioParams& radio) {
  if (signal == 0.0) return 0.0;
  return radio.bandwidth_hz * std::log2(1.0 + signal / (interference + radio.noise_watts));
}

}  // namespace

std::vector<std::string> PowerAllocation::violations(double p_max) const {
  std::vector<std::string> out;
  for (std::size_t n = 0; n < watts.size(); ++n) {
    const double w = watts[n];
    if (!(w >= 0.0 && w <= p_max)) {
      std::ostringstream os;
      os << "p[" << n + 1 << "] = " << w << " outside [0, " << p_max << "]";
      out.push_back(os.str());
    }
  }
  return out;
}

double user_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t n,
                     std::size_t k, const RadioParams& radio) {
  check_power_size(g, p);
  check_index(n, g.n_aps(), "AP");
  check_index(k, g.n_users(), "user");
  double interference = 0.0;
  for (std::size_t v = 0; v < g.n_aps(); ++v) {
    if (v != n) interference += p[v] * g.user(v, k);
  }
  return shannon(p[n] * g.user(n, k), interference, radio);
}

double eve_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t n,
                    std::size_t j, const RadioParams& radio) {
  check_power_size(g, p);
  check_index(n, g.n_aps(), "AP");
  check_index(j, g.n_eves(), "eavesdropper");
  double interference = 0.0;
  for (std::size_t v = 0; v < g.n_aps(); ++v) {
    if (v != n) interference += p[v] * g.eve(v, j);
  }
  return shannon(p[n] * g.eve(n, j), interference, radio);
}

double max_eve_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t n,
                        const RadioParams& radio) {
  double worst = 0.0;
  for (std::size_t j = 0; j < g.n_eves(); ++j) {
    worst = std::max(worst, eve_capacity(g, p, n, j, radio));
  }
  return worst;
}

double secrecy_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t k,
                        std::size_t serving, const RadioParams& radio) {
  const double c = user_capacity(g, p, serving, k, radio);
  const double ce = max_eve_capacity(g, p, serving, radio);
  return std::max(c - ce, 0.0);
}

void check_dimensions(const GainMatrix& g, const PowerAllocation& p, const Association& a) {
  check_power_size(g, p);
  if (a.size() != g.n_users()) {
    throw Error(ErrorCategory::dimension, "association has " + std::to_string(a.size()) +
                                              " entries, network has " +
                                              std::to_string(g.n_users()) + " users");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] >= g.n_aps()) {
      throw Error(ErrorCategory::dimension, "user " + std::to_string(k + 1) +
                                                " associated with non-existent AP " +
                                                std::to_string(a[k] + 1));
    }
  }
}

double sum_secrecy(const GainMatrix& g, const PowerAllocation& p, const Association& a,
                   const RadioParams& radio) {
  check_dimensions(g, p, a);
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) total += secrecy_capacity(g, p, k, a[k], radio);
  return total;
}

SecrecyReport report(const Scenario& scenario, const GainMatrix& g, const PowerAllocation& p,
                     const Association& a) {
  check_dimensions(g, p, a);
  const auto& radio = scenario.radio();
  const std::size_t n_users = g.n_users();

  SecrecyReport r;
  r.eve_worst_per_ap.resize(g.n_aps());
  for (std::size_t n = 0; n < g.n_aps(); ++n) r.eve_worst_per_ap[n] = max_eve_capacity(g, p, n, radio);

  r.user_capacity.resize(n_users);
  r.user_secrecy.resize(n_users);
  std::size_t positive = 0;
  for (std::size_t k = 0; k < n_users; ++k) {
    r.user_capacity[k] = user_capacity(g, p, a[k], k, radio);
    r.user_secrecy[k] = std::max(r.user_capacity[k] - r.eve_worst_per_ap[a[k]], 0.0);
    r.sum_secrecy += r.user_secrecy[k];
    if (r.user_secrecy[k] > 0.0) ++positive;
  }

  // Each eavesdropper is charged with its best wiretap over the K served links.
  for (std::size_t j = 0; j < g.n_eves(); ++j) {
    double best = 0.0;
    for (std::size_t k = 0; k < n_users; ++k) best = std::max(best, eve_capacity(g, p, a[k], j, radio));
    r.sum_eve_capacity += best;
  }
  r.secrecy_ratio = 100.0 * static_cast<double>(positive) / static_cast<double>(n_users);
  return r;
}

RevenueEvaluator::RevenueEvaluator(const GainMatrix& g, const Association& a,
                                   const RadioParams& radio)
    : n_aps_(g.n_aps()),
      n_users_(g.n_users()),
      n_eves_(g.n_eves()),
      noise_(radio.noise_watts),
      bandwidth_(radio.bandwidth_hz),
      serving_(a.ap) {
  check_dimensions(g, PowerAllocation::uniform(g.n_aps(), 0.0), a);

  served_aps_ = serving_;
  std::sort(served_aps_.begin(), served_aps_.end());
  served_aps_.erase(std::unique(served_aps_.begin(), served_aps_.end()), served_aps_.end());
  served_slot_.resize(n_users_);
  for (std::size_t k = 0; k < n_users_; ++k) {
    served_slot_[k] = static_cast<std::size_t>(
        std::lower_bound(served_aps_.begin(), served_aps_.end(), serving_[k]) -
        served_aps_.begin());
  }

  for (std::size_t k = 0; k < n_users_; ++k) links_.push_back({serving_[k], g.user(serving_[k], k)});
  for (auto s : served_aps_) {
    for (std::size_t j = 0; j < n_eves_; ++j) links_.push_back({s, g.eve(s, j)});
  }

  const std::size_t n_links = links_.size();
  interference_gain_.assign(n_aps_ * n_links, 0.0);
  for (std::size_t v = 0; v < n_aps_; ++v) {
    for (std::size_t k = 0; k < n_users_; ++k) {
      if (v != serving_[k]) interference_gain_[v * n_links + k] = g.user(v, k);
    }
    for (std::size_t s = 0; s < served_aps_.size(); ++s) {
      for (std::size_t j = 0; j < n_eves_; ++j) {
        if (v != served_aps_[s]) {
          interference_gain_[v * n_links + n_users_ + s * n_eves_ + j] = g.eve(v, j);
        }
      }
    }
  }
}

void RevenueEvaluator::evaluate(std::span<const double> powers, std::span<double> revenue) const {
  if (powers.size() != revenue.size() * n_aps_) {
    throw Error(ErrorCategory::dimension, "candidate batch shape does not match " +
                                              std::to_string(n_aps_) + " APs");
  }
  const std::size_t m = revenue.size();
  const std::size_t n_links = links_.size();
  std::vector<double> interference(m * n_links);
  kernels::matmul(powers, interference_gain_, interference, m, n_aps_, n_links);

  std::vector<double> eve_worst(served_aps_.size());
  for (std::size_t i = 0; i < m; ++i) {
    const double* p = powers.data() + i * n_aps_;
    const double* in = interference.data() + i * n_links;
    auto cap = [&](std::size_t l) {
      const double signal = p[links_[l].ap] * links_[l].signal_gain;
      if (signal == 0.0) return 0.0;
      return bandwidth_ * std::log2(1.0 + signal / (in[l] + noise_));
    };
    for (std::size_t s = 0; s < served_aps_.size(); ++s) {
      double worst = 0.0;
      for (std::size_t j = 0; j < n_eves_; ++j) {
        worst = std::max(worst, cap(n_users_ + s * n_eves_ + j));
      }
      eve_worst[s] = worst;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < n_users_; ++k) {
      total += std::max(cap(k) - eve_worst[served_slot_[k]], 0.0);
    }
    revenue[i] = total;
  }
}

double RevenueEvaluator::evaluate(const PowerAllocation& p) const {
  if (p.size() != n_aps_) {
    throw Error(ErrorCategory::dimension, "power allocation has " + std::to_string(p.size()) +
                                              " entries, network has " +
                                              std::to_string(n_aps_) + " APs");
  }
  double out = 0.0;
  evaluate(p.watts, std::span<double>(&out, 1));
  return out;
}

}  // namespace cfj
