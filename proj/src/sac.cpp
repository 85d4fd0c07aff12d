#include "cfj/sac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cfj/error.hpp"

namespace cfj {
namespace {

using json = nlohmann::json;

constexpr double kLogProbEps = 1e-6;
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5·log(2π)
constexpr char kCheckpointFormat[] = "cfj-policy";
constexpr int kCheckpointVersion = 1;

double log_std_from_raw(double raw) {
  return Policy::kLogStdMin +
         0.5 * (Policy::kLogStdMax - Policy::kLogStdMin) * (std::tanh(raw) + 1.0);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class Learner {
 public:
  Learner(std::size_t obs_dim, std::size_t act_dim, const SacConfig& cfg, std::mt19937_64& rng)
      : obs_dim_(obs_dim), act_dim_(act_dim), cfg_(cfg) {
    const std::size_t hidden = cfg.hidden_units ? cfg.hidden_units : default_hidden_units(act_dim);
    std::vector<std::size_t> actor_sizes{obs_dim};
    std::vector<std::size_t> critic_sizes{obs_dim + act_dim};
    for (std::size_t l = 0; l < cfg.hidden_layers; ++l) {
      actor_sizes.push_back(hidden);
      critic_sizes.push_back(hidden);
    }
    actor_sizes.push_back(2 * act_dim);
    critic_sizes.push_back(1);

    actor_ = nn::Mlp(actor_sizes, rng);
    q1_ = nn::Mlp(critic_sizes, rng);
    q2_ = nn::Mlp(critic_sizes, rng);
    q1_target_ = q1_;
    q2_target_ = q2_;
    actor_opt_ = nn::Adam(actor_.params().size(), cfg.actor_lr);
    q1_opt_ = nn::Adam(q1_.params().size(), cfg.critic_lr);
    q2_opt_ = nn::Adam(q2_.params().size(), cfg.critic_lr);
    alpha_opt_ = nn::Adam(1, cfg.alpha_lr);
    log_alpha_[0] = std::log(cfg.initial_alpha);
    entropy_target_ = cfg.entropy_target.value_or(-static_cast<double>(act_dim));
  }

  double alpha() const { return std::exp(log_alpha_[0]); }
  const nn::Mlp& actor() const { return actor_; }
  double last_actor_loss() const { return actor_loss_; }
  double last_critic_loss() const { return critic_loss_; }

  /// Squashed action in (-1, 1)^A for one observation.
  std::vector<double> sample_action(std::span<const double> obs, std::mt19937_64& rng) {
    nn::Tape tape;
    const auto out = actor_.forward(obs, 1, tape);
    std::vector<double> a(act_dim_);
    for (std::size_t i = 0; i < act_dim_; ++i) {
      const double std_i = std::exp(log_std_from_raw(out[act_dim_ + i]));
      a[i] = std::tanh(out[i] + std_i * normal_(rng));
    }
    return a;
  }

  void update(const ReplayBuffer& buffer, std::mt19937_64& rng, std::size_t episode) {
    const std::size_t B = cfg_.batch_size;
    const std::size_t D = obs_dim_;
    const std::size_t A = act_dim_;
    const double inv_b = 1.0 / static_cast<double>(B);
    const auto idx = buffer.sample_indices(B, rng);

    std::vector<double> obs(B * D);
    std::vector<double> sa(B * (D + A));
    std::vector<double> target(B);
    bool any_live = false;
    for (std::size_t r = 0; r < B; ++r) {
      const auto& t = buffer[idx[r]];
      std::copy(t.observation.begin(), t.observation.end(), obs.begin() + static_cast<std::ptrdiff_t>(r * D));
      std::copy(t.observation.begin(), t.observation.end(), sa.begin() + static_cast<std::ptrdiff_t>(r * (D + A)));
      std::copy(t.action.begin(), t.action.end(), sa.begin() + static_cast<std::ptrdiff_t>(r * (D + A) + D));
      target[r] = t.reward;
      any_live = any_live || !t.done;
    }
    if (any_live) add_bootstrap(buffer, idx, target, rng);

    // Critics: mean squared Bellman error against the fixed targets.
    critic_loss_ = 0.0;
    for (auto* pair : {&critic1_, &critic2_}) {
      auto& [net, opt] = *pair;
      nn::Tape tape;
      const auto q = net->forward(sa, B, tape);
      std::vector<double> dq(B);
      double loss = 0.0;
      for (std::size_t r = 0; r < B; ++r) {
        const double err = q[r] - target[r];
        loss += err * err * inv_b;
        dq[r] = 2.0 * err * inv_b;
      }
      std::vector<double> grads(net->params().size(), 0.0);
      net->backward(tape, dq, grads);
      opt->step(net->params(), grads);
      critic_loss_ += loss;
    }

    // Actor: reparameterised sample, minimise E[α·log π - min(Q1, Q2)].
    nn::Tape actor_tape;
    const auto head = actor_.forward(obs, B, actor_tape);
    const std::vector<double> head_copy(head.begin(), head.end());
    std::vector<double> eps(B * A), u(B * A), a(B * A), stdv(B * A), logp(B, 0.0);
    std::vector<double> sa_pi(sa);
    for (std::size_t r = 0; r < B; ++r) {
      for (std::size_t i = 0; i < A; ++i) {
        const std::size_t k = r * A + i;
        const double mean = head_copy[r * 2 * A + i];
        const double log_std = log_std_from_raw(head_copy[r * 2 * A + A + i]);
        stdv[k] = std::exp(log_std);
        eps[k] = normal_(rng);
        u[k] = mean + stdv[k] * eps[k];
        a[k] = std::tanh(u[k]);
        logp[r] += -0.5 * eps[k] * eps[k] - log_std - kHalfLog2Pi -
                   std::log(1.0 - a[k] * a[k] + kLogProbEps);
        sa_pi[r * (D + A) + D + i] = a[k];
      }
    }

    nn::Tape t1, t2;
    const auto q1s = q1_.forward(sa_pi, B, t1);
    const std::vector<double> q1v(q1s.begin(), q1s.end());
    const auto q2s = q2_.forward(sa_pi, B, t2);
    const std::vector<double> q2v(q2s.begin(), q2s.end());
    std::vector<double> g1(B, 0.0), g2(B, 0.0);
    const double alpha_now = alpha();
    actor_loss_ = 0.0;
    for (std::size_t r = 0; r < B; ++r) {
      const bool first = q1v[r] <= q2v[r];
      (first ? g1 : g2)[r] = -inv_b;
      actor_loss_ += (alpha_now * logp[r] - std::min(q1v[r], q2v[r])) * inv_b;
    }
    std::vector<double> dsa(B * (D + A), 0.0), dsa2(B * (D + A), 0.0);
    std::vector<double> scratch1(q1_.params().size(), 0.0), scratch2(q2_.params().size(), 0.0);
    q1_.backward(t1, g1, scratch1, dsa);
    q2_.backward(t2, g2, scratch2, dsa2);

    std::vector<double> dhead(B * 2 * A);
    const double half_range = 0.5 * (Policy::kLogStdMax - Policy::kLogStdMin);
    for (std::size_t r = 0; r < B; ++r) {
      for (std::size_t i = 0; i < A; ++i) {
        const std::size_t k = r * A + i;
        const std::size_t col = r * (D + A) + D + i;
        const double dq_da = dsa[col] + dsa2[col];  // already carries -1/B
        const double one_m_a2 = 1.0 - a[k] * a[k];
        const double dlogp_du = 2.0 * a[k] * one_m_a2 / (one_m_a2 + kLogProbEps);
        const double dl_du = dq_da * one_m_a2 + alpha_now * inv_b * dlogp_du;
        const double dl_dlogstd = -alpha_now * inv_b + dl_du * stdv[k] * eps[k];
        const double raw = head_copy[r * 2 * A + A + i];
        const double th = std::tanh(raw);
        dhead[r * 2 * A + i] = dl_du;
        dhead[r * 2 * A + A + i] = dl_dlogstd * half_range * (1.0 - th * th);
      }
    }
    std::vector<double> actor_grads(actor_.params().size(), 0.0);
    actor_.backward(actor_tape, dhead, actor_grads);
    actor_opt_.step(actor_.params(), actor_grads);

    // Temperature: drive policy entropy toward the target.
    double mean_gap = 0.0;
    for (std::size_t r = 0; r < B; ++r) mean_gap += (logp[r] + entropy_target_) * inv_b;
    const double alpha_grad[1] = {-mean_gap};
    alpha_opt_.step(log_alpha_, alpha_grad);

    q1_target_.soft_update_from(q1_, cfg_.target_smoothing);
    q2_target_.soft_update_from(q2_, cfg_.target_smoothing);

    if (!std::isfinite(critic_loss_) || !std::isfinite(actor_loss_) ||
        !std::isfinite(log_alpha_[0])) {
      std::ostringstream os;
      os << "SAC diverged at episode " << episode << ": critic_loss=" << critic_loss_
         << " actor_loss=" << actor_loss_ << " log_alpha=" << log_alpha_[0]
         << " entropy_target=" << entropy_target_ << " batch_reward_mean=";
      double rm = 0.0;
      for (auto i : idx) rm += buffer[i].reward * inv_b;
      os << rm << " updates=" << actor_opt_.steps();
      throw Error(ErrorCategory::solver, os.str());
    }
  }

 private:
  void add_bootstrap(const ReplayBuffer& buffer, const std::vector<std::size_t>& idx,
                     std::vector<double>& target, std::mt19937_64& rng) {
    const std::size_t D = obs_dim_;
    const std::size_t A = act_dim_;
    const std::size_t B = idx.size();
    std::vector<double> next(B * D);
    for (std::size_t r = 0; r < B; ++r) {
      const auto& t = buffer[idx[r]];
      std::copy(t.next_observation.begin(), t.next_observation.end(),
                next.begin() + static_cast<std::ptrdiff_t>(r * D));
    }
    nn::Tape tape;
    const auto head = actor_.forward(next, B, tape);
    std::vector<double> sa(B * (D + A));
    std::vector<double> logp(B, 0.0);
    for (std::size_t r = 0; r < B; ++r) {
      std::copy(next.begin() + static_cast<std::ptrdiff_t>(r * D),
                next.begin() + static_cast<std::ptrdiff_t>((r + 1) * D),
                sa.begin() + static_cast<std::ptrdiff_t>(r * (D + A)));
      for (std::size_t i = 0; i < A; ++i) {
        const double log_std = log_std_from_raw(head[r * 2 * A + A + i]);
        const double e = normal_(rng);
        const double a = std::tanh(head[r * 2 * A + i] + std::exp(log_std) * e);
        logp[r] += -0.5 * e * e - log_std - kHalfLog2Pi - std::log(1.0 - a * a + kLogProbEps);
        sa[r * (D + A) + D + i] = a;
      }
    }
    nn::Tape t1, t2;
    const auto q1 = q1_target_.forward(sa, B, t1);
    const std::vector<double> q1v(q1.begin(), q1.end());
    const auto q2 = q2_target_.forward(sa, B, t2);
    for (std::size_t r = 0; r < B; ++r) {
      if (buffer[idx[r]].done) continue;
      target[r] += cfg_.discount * (std::min(q1v[r], q2[r]) - alpha() * logp[r]);
    }
  }

  std::size_t obs_dim_;
  std::size_t act_dim_;
  SacConfig cfg_;
  nn::Mlp actor_, q1_, q2_, q1_target_, q2_target_;
  nn::Adam actor_opt_, q1_opt_, q2_opt_, alpha_opt_;
  std::pair<nn::Mlp*, nn::Adam*> critic1_{&q1_, &q1_opt_};
  std::pair<nn::Mlp*, nn::Adam*> critic2_{&q2_, &q2_opt_};
  double log_alpha_[1] = {0.0};
  double entropy_target_ = 0.0;
  double actor_loss_ = std::numeric_limits<double>::quiet_NaN();
  double critic_loss_ = std::numeric_limits<double>::quiet_NaN();
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

double ActionMap::to_watts(double squashed) const {
  const double unit = (1.0 + 2.0 * margin) * 0.5 * (squashed + 1.0) - margin;
  return scale.to_watts(std::clamp(unit, 0.0, 1.0));
}

Policy::Policy(nn::Mlp actor, ActionMap map, std::string config_hash)
    : actor_(std::move(actor)), map_(map), config_hash_(std::move(config_hash)) {
  if (actor_.output_dim() % 2 != 0) {
    throw Error(ErrorCategory::dimension, "actor output must hold a mean and log-std per AP");
  }
}

void Policy::check_observation(std::span<const double> observation) const {
  if (observation.size() != observation_dim()) {
    throw Error(ErrorCategory::dimension,
                "observation has " + std::to_string(observation.size()) +
                    " values, policy was trained on " + std::to_string(observation_dim()));
  }
}

PowerAllocation Policy::act_deterministic(std::span<const double> observation) const {
  check_observation(observation);
  nn::Tape tape;
  const auto out = actor_.forward(observation, 1, tape);
  PowerAllocation p;
  p.watts.resize(action_dim());
  for (std::size_t i = 0; i < action_dim(); ++i) p.watts[i] = map_.to_watts(std::tanh(out[i]));
  return p;
}

PowerAllocation Policy::act_stochastic(std::span<const double> observation,
                                       std::mt19937_64& rng) const {
  check_observation(observation);
  nn::Tape tape;
  const auto out = actor_.forward(observation, 1, tape);
  std::normal_distribution<double> normal(0.0, 1.0);
  PowerAllocation p;
  p.watts.resize(action_dim());
  for (std::size_t i = 0; i < action_dim(); ++i) {
    const double std_i = std::exp(log_std_from_raw(out[action_dim() + i]));
    p.watts[i] = map_.to_watts(std::tanh(out[i] + std_i * normal(rng)));
  }
  return p;
}

PowerAllocation policy_act(const Policy& policy, std::span<const double> observation,
                           bool stochastic, std::mt19937_64& rng) {
  return stochastic ? policy.act_stochastic(observation, rng)
                    : policy.act_deterministic(observation);
}

std::string policy_to_json(const Policy& policy) {
  const auto params = policy.actor().params();
  json doc = {
      {"format", kCheckpointFormat},
      {"version", kCheckpointVersion},
      {"observation_dim", policy.observation_dim()},
      {"action_dim", policy.action_dim()},
      {"p_max_watts", policy.p_max()},
      {"power_decades", policy.action_map().scale.decades},
      {"action_margin", policy.action_map().margin},
      {"log_std_bounds", {Policy::kLogStdMin, Policy::kLogStdMax}},
      {"config_hash", policy.config_hash()},
      {"layer_sizes", policy.actor().sizes()},
      {"parameters", std::vector<double>(params.begin(), params.end())},
  };
  return doc.dump() + "\n";
}

Policy parse_policy(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
    if (doc.at("format") != kCheckpointFormat) {
      throw Error(ErrorCategory::parse, "not a policy checkpoint");
    }
    if (doc.at("version") != kCheckpointVersion) {
      throw Error(ErrorCategory::parse, "unsupported checkpoint version " +
                                            doc.at("version").dump());
    }
    auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
    auto params = doc.at("parameters").get<std::vector<double>>();
    const ActionMap map{{doc.at("p_max_watts").get<double>(), doc.at("power_decades").get<double>()},
                        doc.at("action_margin").get<double>()};
    Policy p(nn::Mlp(std::move(sizes), std::move(params)), map,
             doc.at("config_hash").get<std::string>());
    if (p.observation_dim() != doc.at("observation_dim").get<std::size_t>() ||
        p.action_dim() != doc.at("action_dim").get<std::size_t>()) {
      throw Error(ErrorCategory::dimension, "checkpoint dimensions disagree with its layers");
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::parse, std::string("malformed policy checkpoint: ") + e.what());
  }
}

void save_policy(const Policy& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot write checkpoint " + path.string());
  out << policy_to_json(policy);
  if (!out) throw Error(ErrorCategory::io, "write failed for " + path.string());
}

Policy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_policy(buf.str());
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCategory::range, "replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                      std::mt19937_64& rng) const {
  if (data_.empty()) throw Error(ErrorCategory::range, "cannot sample an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = pick(rng);
  return out;
}

SacResult sac_train(const PowerEnv& env, const SolverConfig& config, std::uint64_t seed) {
  if (auto bad = config.violations(); !bad.empty()) throw ValidationError(std::move(bad));
  const auto& cfg = config.sac;
  const auto& obs = env.observation();
  const std::size_t act_dim = env.action_dim();
  const ActionMap map{{env.p_max(), cfg.power_decades}, cfg.action_margin};

  std::mt19937_64 rng(seed);
  Learner learner(obs.size(), act_dim, cfg, rng);
  ReplayBuffer buffer(cfg.replay_capacity);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  SacResult result;
  result.curve.reserve(cfg.train_episodes);
  PowerAllocation watts;
  watts.watts.resize(act_dim);
  for (std::size_t ep = 0; ep < cfg.train_episodes; ++ep) {
    std::vector<double> action(act_dim);
    if (ep < cfg.warmup_episodes) {
      for (auto& a : action) a = uniform(rng);
    } else {
      action = learner.sample_action(obs, rng);
    }
    for (std::size_t i = 0; i < act_dim; ++i) watts.watts[i] = map.to_watts(action[i]);
    const double revenue = env.step(watts);
    buffer.push({obs, action, revenue * cfg.reward_scale, obs, true});

    if (buffer.size() >= cfg.batch_size) {
      for (std::size_t u = 0; u < cfg.updates_per_episode; ++u) learner.update(buffer, rng, ep);
    }
    result.curve.push_back({ep, revenue, learner.last_actor_loss(), learner.last_critic_loss()});
  }

  result.policy = Policy(learner.actor(), map, config_hash(config));
  result.final_alpha = learner.alpha();
  result.deterministic_revenue = env.step(result.policy.act_deterministic(obs));
  double total = 0.0;
  for (std::size_t e = 0; e < cfg.eval_episodes; ++e) {
    total += env.step(result.policy.act_stochastic(obs, rng));
  }
  result.mean_stochastic_revenue = total / static_cast<double>(cfg.eval_episodes);
  return result;
}

std::string training_curve_csv(std::span<const TrainingRecord> curve) {
  std::string out = "episode,revenue,actor_loss,critic_loss\n";
  for (const auto& r : curve) {
    out += std::to_string(r.episode) + "," + fmt(r.revenue) + "," + fmt(r.actor_loss) + "," +
           fmt(r.critic_loss) + "\n";
  }
  return out;
}

}  // namespace cfj
