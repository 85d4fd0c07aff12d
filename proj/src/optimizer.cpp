#include "cfj/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cfj/association.hpp"
#include "cfj/error.hpp"

namespace cfj {
namespace {

using json = nlohmann::json;

constexpr std::size_t kBatchRows = 1024;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCategory::parse, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCategory::parse, "unknown field '" + key + "' in " + where);
    }
  }
}

template <typename T>
void take(const json& obj, const char* key, T& field, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw Error(ErrorCategory::parse, where + "." + key + " must be a number");
  } else {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw Error(ErrorCategory::parse,
                  where + "." + key + " must be a non-negative integer");
    }
  }
  field = v.get<T>();
}

}  // namespace

std::size_t default_hidden_units(std::size_t n_aps) noexcept {
  const std::size_t quarters = (n_aps + 3) / 4;
  return std::min<std::size_t>(256, std::max<std::size_t>(32, 32 * quarters));
}

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> out;
  auto at_least_one = [&](std::size_t v, const char* name) {
    if (v < 1) out.push_back(std::string(name) + " >= 1 (got 0)");
  };
  if (!(grid_step_watts > 0.0)) out.emplace_back("grid_step_watts > 0");
  if (!(grid_budget >= 1.0)) out.emplace_back("grid_budget >= 1");
  at_least_one(cem.population, "cem.population");
  at_least_one(cem.iterations, "cem.iterations");
  if (!(cem.elite_fraction > 0.0 && cem.elite_fraction <= 1.0)) {
    out.emplace_back("0 < cem.elite_fraction <= 1");
  }
  if (!(cem.init_std > 0.0)) out.emplace_back("cem.init_std > 0");
  if (!(cem.min_std >= 0.0)) out.emplace_back("cem.min_std >= 0");
  if (!(cem.power_decades >= 0.0)) out.emplace_back("cem.power_decades >= 0");
  at_least_one(sac.hidden_layers, "sac.hidden_layers");
  at_least_one(sac.replay_capacity, "sac.replay_capacity");
  at_least_one(sac.batch_size, "sac.batch_size");
  at_least_one(sac.train_episodes, "sac.train_episodes");
  at_least_one(sac.updates_per_episode, "sac.updates_per_episode");
  at_least_one(sac.eval_episodes, "sac.eval_episodes");
  if (!(sac.actor_lr > 0.0)) out.emplace_back("sac.actor_lr > 0");
  if (!(sac.critic_lr > 0.0)) out.emplace_back("sac.critic_lr > 0");
  if (!(sac.alpha_lr > 0.0)) out.emplace_back("sac.alpha_lr > 0");
  if (!(sac.discount >= 0.0 && sac.discount <= 1.0)) out.emplace_back("0 <= sac.discount <= 1");
  if (!(sac.target_smoothing > 0.0 && sac.target_smoothing <= 1.0)) {
    out.emplace_back("0 < sac.target_smoothing <= 1");
  }
  if (!(sac.initial_alpha > 0.0)) out.emplace_back("sac.initial_alpha > 0");
  if (!(sac.reward_scale > 0.0)) out.emplace_back("sac.reward_scale > 0");
  if (!(sac.power_decades >= 0.0)) out.emplace_back("sac.power_decades >= 0");
  if (!(sac.action_margin >= 0.0)) out.emplace_back("sac.action_margin >= 0");
  return out;
}

SolverConfig parse_solver_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::parse, std::string("malformed solver config: ") + e.what());
  }
  reject_unknown_keys(doc, {"grid_step_watts", "grid_budget", "seed", "cem", "sac"}, "config");
  SolverConfig c;
  take(doc, "grid_step_watts", c.grid_step_watts, "config");
  take(doc, "grid_budget", c.grid_budget, "config");
  take(doc, "seed", c.seed, "config");
  if (doc.contains("cem")) {
    const auto& j = doc["cem"];
    reject_unknown_keys(j, {"population", "elite_fraction", "iterations", "init_std", "min_std",
                         "power_decades"},
                        "cem");
    take(j, "population", c.cem.population, "cem");
    take(j, "elite_fraction", c.cem.elite_fraction, "cem");
    take(j, "iterations", c.cem.iterations, "cem");
    take(j, "init_std", c.cem.init_std, "cem");
    take(j, "min_std", c.cem.min_std, "cem");
    take(j, "power_decades", c.cem.power_decades, "cem");
  }
  if (doc.contains("sac")) {
    const auto& j = doc["sac"];
    reject_unknown_keys(j,
                        {"hidden_layers", "hidden_units", "replay_capacity", "batch_size",
                         "actor_lr", "critic_lr", "alpha_lr", "discount", "target_smoothing",
                         "entropy_target", "initial_alpha", "reward_scale", "train_episodes",
                         "warmup_episodes", "updates_per_episode", "eval_episodes",
                         "power_decades", "action_margin"},
                        "sac");
    auto& s = c.sac;
    take(j, "hidden_layers", s.hidden_layers, "sac");
    take(j, "hidden_units", s.hidden_units, "sac");
    take(j, "replay_capacity", s.replay_capacity, "sac");
    take(j, "batch_size", s.batch_size, "sac");
    take(j, "actor_lr", s.actor_lr, "sac");
    take(j, "critic_lr", s.critic_lr, "sac");
    take(j, "alpha_lr", s.alpha_lr, "sac");
    take(j, "discount", s.discount, "sac");
    take(j, "target_smoothing", s.target_smoothing, "sac");
    if (j.contains("entropy_target") && !j["entropy_target"].is_null()) {
      double t = 0.0;
      take(j, "entropy_target", t, "sac");
      s.entropy_target = t;
    }
    take(j, "initial_alpha", s.initial_alpha, "sac");
    take(j, "reward_scale", s.reward_scale, "sac");
    take(j, "train_episodes", s.train_episodes, "sac");
    take(j, "warmup_episodes", s.warmup_episodes, "sac");
    take(j, "updates_per_episode", s.updates_per_episode, "sac");
    take(j, "eval_episodes", s.eval_episodes, "sac");
    take(j, "power_decades", s.power_decades, "sac");
    take(j, "action_margin", s.action_margin, "sac");
  }
  if (auto bad = c.violations(); !bad.empty()) throw ValidationError(std::move(bad));
  return c;
}

SolverConfig load_solver_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open solver config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solver_config(buf.str());
}

std::string solver_config_to_json(const SolverConfig& c) {
  const auto& s = c.sac;
  json doc = {
      {"grid_step_watts", c.grid_step_watts},
      {"grid_budget", c.grid_budget},
      {"seed", c.seed},
      {"cem",
       {{"population", c.cem.population},
        {"elite_fraction", c.cem.elite_fraction},
        {"iterations", c.cem.iterations},
        {"init_std", c.cem.init_std},
        {"min_std", c.cem.min_std},
        {"power_decades", c.cem.power_decades}}},
      {"sac",
       {{"hidden_layers", s.hidden_layers},
        {"hidden_units", s.hidden_units},
        {"replay_capacity", s.replay_capacity},
        {"batch_size", s.batch_size},
        {"actor_lr", s.actor_lr},
        {"critic_lr", s.critic_lr},
        {"alpha_lr", s.alpha_lr},
        {"discount", s.discount},
        {"target_smoothing", s.target_smoothing},
        {"entropy_target", s.entropy_target ? json(*s.entropy_target) : json(nullptr)},
        {"initial_alpha", s.initial_alpha},
        {"reward_scale", s.reward_scale},
        {"train_episodes", s.train_episodes},
        {"warmup_episodes", s.warmup_episodes},
        {"updates_per_episode", s.updates_per_episode},
        {"eval_episodes", s.eval_episodes},
        {"power_decades", s.power_decades},
        {"action_margin", s.action_margin}}},
  };
  return doc.dump(2) + "\n";
}

std::string config_hash(const SolverConfig& config) {
  const std::string text = json::parse(solver_config_to_json(config)).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> encode_observation(const Scenario& scenario, double map_side) {
  if (!(map_side > 0.0)) throw Error(ErrorCategory::range, "map side must be positive");
  const auto cells = static_cast<double>(std::ceil(map_side));
  std::vector<double> obs;
  obs.reserve(2 * (scenario.n_aps() + scenario.n_users() + scenario.n_eves()));
  auto push = [&](const std::vector<Position>& nodes, const char* kind) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& p = nodes[i];
      if (!(p.x >= 0.0 && p.x <= map_side && p.y >= 0.0 && p.y <= map_side)) {
        std::ostringstream os;
        os << kind << "[" << i + 1 << "] at (" << p.x << ", " << p.y
           << ") lies outside the " << map_side << " m observation map";
        throw Error(ErrorCategory::range, os.str());
      }
      for (double c : {p.x, p.y}) {
        const double cell = std::min(std::floor(c), cells - 1.0);
        obs.push_back((cell + 0.5) / map_side);
      }
    }
  };
  push(scenario.aps(), "aps");
  push(scenario.users(), "users");
  push(scenario.eves(), "eves");
  return obs;
}

PowerEnv::PowerEnv(Scenario scenario, Association association, double map_side)
    : PowerEnv(scenario, gain_matrix(scenario), std::move(association), map_side) {}

PowerEnv::PowerEnv(Scenario scenario, GainMatrix gains, Association association,
                   double map_side)
    : scenario_(std::move(scenario)),
      gains_(std::move(gains)),
      association_(std::move(association)),
      map_side_(map_side),
      clipped_(std::make_shared<std::atomic<std::size_t>>(0)) {
  evaluator_ = std::make_shared<const RevenueEvaluator>(gains_, association_, scenario_.radio());
  try {
    observation_ = encode_observation(scenario_, map_side_);
  } catch (const Error& e) {
    observation_error_ = e.what();
  }
}

PowerEnv PowerEnv::with_max_secrecy(Scenario scenario, double map_side) {
  auto g = gain_matrix(scenario);
  auto a = associate_max_secrecy(scenario, g);
  return PowerEnv(std::move(scenario), std::move(g), std::move(a), map_side);
}

const std::vector<double>& PowerEnv::observation() const {
  if (!observation_) throw Error(ErrorCategory::range, observation_error_);
  return *observation_;
}

double PowerEnv::step(const PowerAllocation& action) const {
  if (action.size() != action_dim()) {
    throw Error(ErrorCategory::dimension, "action has " + std::to_string(action.size()) +
                                              " entries, environment has " +
                                              std::to_string(action_dim()) + " APs");
  }
  PowerAllocation clipped = action;
  bool any = false;
  for (auto& w : clipped.watts) {
    const double c = std::isnan(w) ? 0.0 : std::clamp(w, 0.0, p_max());
    if (c != w) {
      any = true;
      w = c;
    }
  }
  if (any && clipped_->fetch_add(1) == 0) {
    std::clog << "warning: action outside [0, " << p_max()
              << "] W clipped to the power box\n";
  }
  return evaluator_->evaluate(clipped);
}

double PowerScale::to_watts(double unit) const {
  const double u = std::clamp(unit, 0.0, 1.0);
  if (decades <= 0.0) return p_max * u;
  const double k = decades * std::numbers::ln10;
  return std::clamp(p_max * (std::expm1(k * u) / std::expm1(k)), 0.0, p_max);
}

double PowerScale::to_unit(double watts) const {
  const double w = std::clamp(watts / p_max, 0.0, 1.0);
  if (decades <= 0.0) return w;
  const double k = decades * std::numbers::ln10;
  return std::clamp(std::log1p(w * std::expm1(k)) / k, 0.0, 1.0);
}

std::vector<double> grid_levels(double p_max, double grid_step_watts) {
  if (!(grid_step_watts > 0.0)) {
    throw Error(ErrorCategory::range, "grid step must be positive");
  }
  std::vector<double> levels;
  const auto steps = static_cast<std::size_t>(std::floor(p_max / grid_step_watts + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    levels.push_back(std::min(static_cast<double>(i) * grid_step_watts, p_max));
  }
  if (p_max - levels.back() > 1e-12 * p_max) {
    levels.push_back(p_max);
  } else {
    levels.back() = p_max;
  }
  return levels;
}

SolveResult grid_search_oracle(const PowerEnv& env, double grid_step_watts, double budget) {
  const auto levels = grid_levels(env.p_max(), grid_step_watts);
  const std::size_t n = env.action_dim();
  const double points = std::pow(static_cast<double>(levels.size()), static_cast<double>(n));
  if (points > budget) {
    std::ostringstream os;
    os << "grid search needs " << levels.size() << "^" << n << " = " << points
       << " evaluations, budget is " << budget;
    throw Error(ErrorCategory::budget, os.str());
  }
  const auto total = static_cast<std::size_t>(points);

  std::vector<std::size_t> digits(n, 0);
  std::vector<double> batch(kBatchRows * n);
  std::vector<double> revenue(kBatchRows);

  SolveResult best;
  best.revenue = -1.0;
  std::size_t done = 0;
  while (done < total) {
    const std::size_t rows = std::min(kBatchRows, total - done);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t d = 0; d < n; ++d) batch[r * n + d] = levels[digits[d]];
      // Odometer with the first AP as the most significant digit.
      for (std::size_t d = n; d-- > 0;) {
        if (++digits[d] < levels.size()) break;
        digits[d] = 0;
      }
    }
    env.evaluator().evaluate(std::span<const double>(batch.data(), rows * n),
                             std::span<double>(revenue.data(), rows));
    for (std::size_t r = 0; r < rows; ++r) {
      if (revenue[r] > best.revenue) {
        best.revenue = revenue[r];
        best.powers.watts.assign(batch.begin() + static_cast<std::ptrdiff_t>(r * n),
                                 batch.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
      }
    }
    done += rows;
  }
  best.evaluations = total;
  return best;
}

SolveResult cem_optimize(const PowerEnv& env, const CemConfig& config, std::uint64_t seed,
                         std::span<const PowerAllocation> warm_starts) {
  const std::size_t n = env.action_dim();
  const double p_max = env.p_max();
  const std::size_t pop = config.population;
  const std::size_t n_elite = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(config.elite_fraction * static_cast<double>(pop))), 1,
      pop);

  SolveResult best;
  best.powers = PowerAllocation::uniform(n, p_max);
  best.revenue = env.evaluator().evaluate(best.powers);
  best.evaluations = 1;
  for (const auto& w : warm_starts) {
    if (w.size() != n) {
      throw Error(ErrorCategory::dimension, "warm start has wrong number of APs");
    }
    PowerAllocation clipped = w;
    for (auto& x : clipped.watts) x = std::clamp(x, 0.0, p_max);
    const double r = env.evaluator().evaluate(clipped);
    ++best.evaluations;
    if (r > best.revenue) {
      best.revenue = r;
      best.powers = std::move(clipped);
    }
  }

  // Search runs on unit coordinates; the scale maps them to watts.
  const PowerScale scale{p_max, config.power_decades};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> mean(n, 1.0);
  std::vector<double> stddev(n, config.init_std);

  std::vector<double> unit(pop * n);
  std::vector<double> watts(pop * n);
  std::vector<double> revenue(pop);
  std::vector<std::size_t> order(pop);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t i = 0; i < pop * n; ++i) {
      const std::size_t d = i % n;
      unit[i] = std::clamp(mean[d] + stddev[d] * normal(rng), 0.0, 1.0);
      watts[i] = scale.to_watts(unit[i]);
    }
    env.evaluator().evaluate(watts, revenue);
    best.evaluations += pop;

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return revenue[a] > revenue[b]; });
    if (revenue[order[0]] > best.revenue) {
      best.revenue = revenue[order[0]];
      best.powers.watts.assign(watts.begin() + static_cast<std::ptrdiff_t>(order[0] * n),
                               watts.begin() + static_cast<std::ptrdiff_t>((order[0] + 1) * n));
    }
    best.best_history.push_back(best.revenue);

    for (std::size_t d = 0; d < n; ++d) {
      double m = 0.0;
      for (std::size_t e = 0; e < n_elite; ++e) m += unit[order[e] * n + d];
      m /= static_cast<double>(n_elite);
      double var = 0.0;
      for (std::size_t e = 0; e < n_elite; ++e) {
        const double dx = unit[order[e] * n + d] - m;
        var += dx * dx;
      }
      var /= static_cast<double>(n_elite);
      mean[d] = m;
      stddev[d] = std::max(std::sqrt(var), config.min_std);
    }
  }
  return best;
}

}  // namespace cfj
