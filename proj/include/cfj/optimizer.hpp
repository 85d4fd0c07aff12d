#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfj/capacity.hpp"
#include "cfj/propagation.hpp"
#include "cfj/scenario.hpp"

namespace cfj {

inline constexpr double kDefaultMapSide = 50.0;  // meters

/// Maps a unit coordinate onto [0, p_max]:
///   p = p_max · (10^(decades·u) - 1) / (10^decades - 1)
/// u = 0 is exactly silent and u = 1 exactly p_max; in between, equal steps in
/// u cover equal numbers of decades. decades = 0 is the plain linear map.
struct PowerScale {
  double p_max = 1.0;
  double decades = 0.0;

  double to_watts(double unit) const;
  double to_unit(double watts) const;
};

struct CemConfig {
  std::size_t population = 200;
  double elite_fraction = 0.1;
  std::size_t iterations = 50;
  double init_std = 1.0;   // on the unit coordinate
  double min_std = 0.002;  // on the unit coordinate
  double power_decades = 6.0;
};

struct SacConfig {
  std::size_t hidden_layers = 3;
  std::size_t hidden_units = 0;  // 0 picks default_hidden_units(N)
  std::size_t replay_capacity = 100'000;
  std::size_t batch_size = 64;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double alpha_lr = 3e-3;
  double discount = 0.99;
  double target_smoothing = 5e-3;
  std::optional<double> entropy_target;  // unset means -N
  double initial_alpha = 0.1;
  double reward_scale = 1.0;
  std::size_t train_episodes = 4000;
  std::size_t warmup_episodes = 256;
  std::size_t updates_per_episode = 1;
  std::size_t eval_episodes = 32;
  double power_decades = 6.0;  // action scale, see PowerScale
  // The squashed action covers [-margin, 1 + margin] of the unit coordinate
  // and is clipped to [0, 1], so silent and full-power APs are reachable
  // without saturating tanh.
  double action_margin = 0.25;
};

struct SolverConfig {
  double grid_step_watts = 0.05;
  double grid_budget = 1e8;  // max lattice points the oracle may visit
  CemConfig cem;
  SacConfig sac;
  std::uint64_t seed = 0;

  /// Empty when valid.
  std::vector<std::string> violations() const;
};

/// 32 units per four APs, clamped to [32, 256].
std::size_t default_hidden_units(std::size_t n_aps) noexcept;

/// Strict JSON round trip; unknown keys are rejected. Missing keys keep their
/// defaults.
SolverConfig parse_solver_config(const std::string& json_text);
SolverConfig load_solver_config(const std::filesystem::path& path);
std::string solver_config_to_json(const SolverConfig& config);
/// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const SolverConfig& config);

/// Snap every node to the centre of its 1 m × 1 m cell, then flatten
/// (APs, users, eves) as x,y pairs normalised by the map side.
/// Throws Error(range) for a node outside [0, map_side]².
std::vector<double> encode_observation(const Scenario& scenario,
                                       double map_side = kDefaultMapSide);

/// Single-step power-allocation environment with a fixed association.
class PowerEnv {
 public:
  PowerEnv(Scenario scenario, Association association, double map_side = kDefaultMapSide);
  PowerEnv(Scenario scenario, GainMatrix gains, Association association,
           double map_side = kDefaultMapSide);

  /// Association from the secrecy-aware rule at uniform p_max.
  static PowerEnv with_max_secrecy(Scenario scenario, double map_side = kDefaultMapSide);

  const Scenario& scenario() const noexcept { return scenario_; }
  const GainMatrix& gains() const noexcept { return gains_; }
  const Association& association() const noexcept { return association_; }
  const RevenueEvaluator& evaluator() const noexcept { return *evaluator_; }
  double p_max() const noexcept { return scenario_.radio().p_max_watts; }
  std::size_t action_dim() const noexcept { return scenario_.n_aps(); }

  /// Throws Error(range) when a node lies outside the observation map. Such
  /// scenarios can still be optimised by grid/CEM.
  const std::vector<double>& observation() const;
  double map_side() const noexcept { return map_side_; }

  /// Revenue of one action; the episode ends after it. Entries outside
  /// [0, p_max] are clipped and counted (first clip logs a warning).
  double step(const PowerAllocation& action) const;
  std::size_t clipped_steps() const noexcept { return clipped_->load(); }

 private:
  Scenario scenario_;
  GainMatrix gains_;
  Association association_;
  double map_side_;
  std::shared_ptr<const RevenueEvaluator> evaluator_;
  std::optional<std::vector<double>> observation_;
  std::string observation_error_;
  std::shared_ptr<std::atomic<std::size_t>> clipped_;
};

struct SolveResult {
  PowerAllocation powers;
  double revenue = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> best_history;  // best-so-far revenue per iteration (CEM)
};

/// Lattice {0, step, 2·step, …, p_max}^N (p_max is always a level). Returns the
/// lexicographically smallest maximiser. Throws Error(budget) when the lattice
/// is larger than `budget` points.
SolveResult grid_search_oracle(const PowerEnv& env, double grid_step_watts,
                               double budget = 1e8);

/// Per-coordinate power levels visited by grid_search_oracle.
std::vector<double> grid_levels(double p_max, double grid_step_watts);

/// Cross-entropy method. Each coordinate is sampled from a Gaussian on the
/// PowerScale unit coordinate and clipped to [0, 1], so the box faces (silent
/// AP, full power) carry probability mass; elites refit mean and std there.
/// Uniform p_max and every `warm_starts` entry are evaluated before sampling,
/// so the result never loses to them.
SolveResult cem_optimize(const PowerEnv& env, const CemConfig& config, std::uint64_t seed,
                         std::span<const PowerAllocation> warm_starts = {});

}  // namespace cfj
