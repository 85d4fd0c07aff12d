#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cfj/capacity.hpp"
#include "cfj/nn.hpp"
#include "cfj/optimizer.hpp"

namespace cfj {

/// Squashed action a in [-1, 1] to watts: a is stretched over
/// [-margin, 1 + margin], clipped to [0, 1] and passed through the PowerScale.
struct ActionMap {
  PowerScale scale;
  double margin = 0.0;

  double to_watts(double squashed) const;
};

/// Squashed Gaussian policy over the power box. The actor emits a mean and a
/// log-std per AP; u ~ N(mean, std) goes through tanh and then the ActionMap,
/// so every action is feasible by construction.
class Policy {
 public:
  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  Policy() = default;
  Policy(nn::Mlp actor, ActionMap map, std::string config_hash);

  std::size_t observation_dim() const noexcept { return actor_.input_dim(); }
  std::size_t action_dim() const noexcept { return actor_.output_dim() / 2; }
  double p_max() const noexcept { return map_.scale.p_max; }
  const ActionMap& action_map() const noexcept { return map_; }
  const std::string& config_hash() const noexcept { return config_hash_; }
  const nn::Mlp& actor() const noexcept { return actor_; }

  /// Squashed distribution mean.
  PowerAllocation act_deterministic(std::span<const double> observation) const;
  /// One reparameterised sample.
  PowerAllocation act_stochastic(std::span<const double> observation, std::mt19937_64& rng) const;

 private:
  void check_observation(std::span<const double> observation) const;

  nn::Mlp actor_;
  ActionMap map_;
  std::string config_hash_;
};

PowerAllocation policy_act(const Policy& policy, std::span<const double> observation,
                           bool stochastic, std::mt19937_64& rng);

/// Self-describing JSON checkpoint: format tag, version, dimensions, config
/// hash, layer sizes and every parameter (doubles round-trip exactly).
void save_policy(const Policy& policy, const std::filesystem::path& path);
Policy load_policy(const std::filesystem::path& path);
std::string policy_to_json(const Policy& policy);
Policy parse_policy(const std::string& json_text);

struct Transition {
  std::vector<double> observation;
  std::vector<double> action;  // normalised to [-1, 1] (pre-scaling tanh output)
  double reward = 0.0;
  std::vector<double> next_observation;
  bool done = true;
};

/// Fixed-capacity ring buffer with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const Transition& operator[](std::size_t i) const { return data_[i]; }

  /// Indices drawn uniformly with replacement.
  std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

struct TrainingRecord {
  std::size_t episode = 0;
  double revenue = 0.0;
  double actor_loss = 0.0;   // NaN before the first update
  double critic_loss = 0.0;  // NaN before the first update
};

struct SacResult {
  Policy policy;
  std::vector<TrainingRecord> curve;
  double deterministic_revenue = 0.0;
  double mean_stochastic_revenue = 0.0;  // over eval_episodes samples
  double final_alpha = 0.0;
};

/// Soft actor-critic on single-step episodes: twin critics with Polyak-averaged
/// targets, reparameterised actor, automatic entropy temperature. Throws
/// Error(solver) with a state dump if a loss goes non-finite.
SacResult sac_train(const PowerEnv& env, const SolverConfig& config, std::uint64_t seed);

/// episode,revenue,actor_loss,critic_loss
std::string training_curve_csv(std::span<const TrainingRecord> curve);

}  // namespace cfj
