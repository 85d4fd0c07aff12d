#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfj/propagation.hpp"
#include "cfj/scenario.hpp"

namespace cfj {

/// Transmit power per AP, watts. Feasible when every entry is in [0, p_max].
struct PowerAllocation {
  std::vector<double> watts;

  std::size_t size() const noexcept { return watts.size(); }
  double operator[](std::size_t n) const noexcept { return watts[n]; }

  static PowerAllocation uniform(std::size_t n_aps, double p) {
    return {std::vector<double>(n_aps, p)};
  }

  std::vector<std::string> violations(double p_max) const;
  bool feasible(double p_max) const { return violations(p_max).empty(); }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;
};

/// Serving AP per user. Stored 0-based; files and reports print them 1-based.
struct Association {
  std::vector<std::size_t> ap;

  std::size_t size() const noexcept { return ap.size(); }
  std::size_t operator[](std::size_t k) const noexcept { return ap[k]; }

  friend bool operator==(const Association&, const Association&) = default;
};

struct SecrecyReport {
  std::vector<double> user_capacity;     // C at the serving AP, per user
  std::vector<double> eve_worst_per_ap;  // worst-case eavesdropper capacity, per AP
  std::vector<double> user_secrecy;      // clamped secrecy, per user
  double sum_secrecy = 0.0;
  double sum_eve_capacity = 0.0;
  double secrecy_ratio = 0.0;  // percent of users with strictly positive secrecy
};

/// W·log2(1 + SINR) of AP n's downlink at user k. Every other AP counts as
/// interference. Zero when AP n is silent.
double user_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t n,
                     std::size_t k, const RadioParams& radio);

/// Same as user_capacity, seen from eavesdropper j.
double eve_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t n,
                    std::size_t j, const RadioParams& radio);

/// Best eavesdropper on AP n's traffic; 0 with no eavesdroppers.
double max_eve_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t n,
                        const RadioParams& radio);

/// [C(n,k) - C^e(n)]^+ for user k served by AP `serving`.
double secrecy_capacity(const GainMatrix& g, const PowerAllocation& p, std::size_t k,
                        std::size_t serving, const RadioParams& radio);

/// Sum of clamped secrecy over users. This is the RL revenue.
double sum_secrecy(const GainMatrix& g, const PowerAllocation& p, const Association& a,
                   const RadioParams& radio);

SecrecyReport report(const Scenario& scenario, const GainMatrix& g, const PowerAllocation& p,
                     const Association& a);

/// Throws Error(dimension) when p or a do not fit g, or an association index is
/// out of range.
void check_dimensions(const GainMatrix& g, const PowerAllocation& p, const Association& a);

/// Sum secrecy for many candidate allocations at once.
///
/// For a fixed association every capacity the revenue needs is one "link"
/// (serving AP -> receiver). The interference at each link is a dot product of
/// the power vector with the receiver's gain column, with the serving AP's row
/// zeroed. Stacking all links gives one [N × L] matrix, so a batch of M
/// candidates is a single [M × N]·[N × L] product on the active kernels,
/// followed by a scalar log/max/sum epilogue.
class RevenueEvaluator {
 public:
  RevenueEvaluator(const GainMatrix& g, const Association& a, const RadioParams& radio);

  std::size_t n_aps() const noexcept { return n_aps_; }

  /// powers is row-major [M × n_aps]; writes M revenues.
  void evaluate(std::span<const double> powers, std::span<double> revenue) const;
  double evaluate(const PowerAllocation& p) const;

 private:
  struct Link {
    std::size_t ap;
    double signal_gain;
  };

  std::size_t n_aps_;
  std::size_t n_users_;
  std::size_t n_eves_;
  double noise_;
  double bandwidth_;
  std::vector<std::size_t> serving_;       // per user
  std::vector<std::size_t> served_slot_;   // per user: index into served_aps_
  std::vector<std::size_t> served_aps_;    // distinct serving APs, ascending
  std::vector<Link> links_;                // users first, then served_aps × eves
  std::vector<double> interference_gain_;  // [n_aps × links]
};

}  // namespace cfj
