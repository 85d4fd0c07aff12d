#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cfj {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b) noexcept;

/// Physical constants shared by every node of a deployment.
struct RadioParams {
  double frequency_hz = 2.4e9;
  double gain_tx = 1.0;
  double gain_rx = 1.0;
  double path_loss_exp = 2.0;
  double noise_watts = 3.16e-12;  // -85 dBm
  double bandwidth_hz = 1.0;      // capacities come out in bps/Hz
  double p_max_watts = 1.0;
  double d_min_meters = 0.1;      // distances are clamped to at least this

  friend bool operator==(const RadioParams&, const RadioParams&) = default;

  /// Empty when valid.
  std::vector<std::string> violations() const;
};

/// Node geometry plus radio constants. Immutable once built; use make() to get
/// a validated instance.
class Scenario {
 public:
  /// Throws ValidationError listing every violated invariant.
  static Scenario make(std::string name, std::vector<Position> aps,
                       std::vector<Position> users, std::vector<Position> eves,
                       RadioParams radio = {});

  const std::string& name() const noexcept { return name_; }
  const std::vector<Position>& aps() const noexcept { return aps_; }
  const std::vector<Position>& users() const noexcept { return users_; }
  const std::vector<Position>& eves() const noexcept { return eves_; }
  const RadioParams& radio() const noexcept { return radio_; }

  std::size_t n_aps() const noexcept { return aps_.size(); }
  std::size_t n_users() const noexcept { return users_.size(); }
  std::size_t n_eves() const noexcept { return eves_.size(); }

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  Scenario() = default;

  std::string name_;
  std::vector<Position> aps_;
  std::vector<Position> users_;
  std::vector<Position> eves_;
  RadioParams radio_;
};

struct RandomSpec {
  std::size_t n_aps = 4;
  std::size_t n_users = 2;
  std::size_t n_eves = 2;
  double map_side_meters = 50.0;
  RadioParams radio;
};

// Scenario files are strict JSON: unknown keys are rejected.

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Directory holding the bundled scenario files (scenario1.json … scenario6.json).
std::filesystem::path default_scenario_dir();

/// One of the six bundled deployments (ids 1..6).
Scenario builtin_scenario(int id);
Scenario builtin_scenario(int id, const std::filesystem::path& dir);

/// Users and eves uniform over the square map; APs on a jittered grid so they
/// cover the map and stay at least map_side/(ceil(sqrt(n_aps))+1) apart.
Scenario generate_random_scenario(const RandomSpec& spec, std::uint64_t seed);

}  // namespace cfj
