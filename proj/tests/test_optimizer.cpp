#include <doctest.h>

#include <cmath>
#include <random>

#include "cfj/association.hpp"
#include "cfj/error.hpp"
#include "cfj/optimizer.hpp"
#include "cfj/propagation.hpp"
#include "support.hpp"

using namespace cfj;

namespace {

// One AP; user at 5 m, eve at `eve_x` m on the other side.
PowerEnv single_ap(double eve_x) {
  auto s = Scenario::make("n1", {{25, 25}}, {{30, 25}}, {{25 - eve_x, 25}});
  return PowerEnv(s, Association{{0}});
}

// Fig. 1 flavour: one serving AP, one pure jammer, eve close to the serving AP.
PowerEnv serving_plus_jammer() {
  auto s = Scenario::make("fig1-2ap", {{10, 25}, {22, 25}}, {{4, 25}}, {{14, 25}});
  return PowerEnv(s, Association{{0}});
}

std::vector<PowerEnv> random_envs(std::size_t count, std::size_t n_aps, std::uint64_t seed) {
  std::vector<PowerEnv> out;
  RandomSpec spec;
  spec.n_aps = n_aps;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(PowerEnv::with_max_secrecy(generate_random_scenario(spec, seed + i)));
  }
  return out;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("power scale") {
    for (double d : {0.0, 1.0, 6.0}) {
      const PowerScale s{2.0, d};
      CHECK(s.to_watts(0.0) == 0.0);
      CHECK(s.to_watts(1.0) == 2.0);
      CHECK(s.to_watts(-0.5) == 0.0);
      CHECK(s.to_watts(1.5) == 2.0);
      double prev = -1.0;
      for (double u = 0.0; u <= 1.0; u += 0.01) {
        const double w = s.to_watts(u);
        CHECK(w > prev);
        CHECK(s.to_unit(w) == doctest::Approx(u).epsilon(1e-9));
        prev = w;
      }
    }
    CHECK(PowerScale{1.0, 0.0}.to_watts(0.3) == doctest::Approx(0.3));
    CHECK(PowerScale{1.0, 6.0}.to_watts(0.5) == doctest::Approx(1e-3).epsilon(1e-2));
  }

  TEST_CASE("observation encoding") {
    const auto s = Scenario::make("o", {{10.4, 10.6}, {0, 0}}, {{50, 50}}, {{10.9, 10.1}});
    const auto obs = encode_observation(s);
    REQUIRE(obs.size() == 8);
    CHECK(obs[0] == doctest::Approx(0.21));
    CHECK(obs[1] == doctest::Approx(0.21));
    CHECK(obs[2] == doctest::Approx(0.01));
    CHECK(obs[3] == doctest::Approx(0.01));
    CHECK(obs[4] == doctest::Approx(0.99));
    CHECK(obs[6] == obs[0]);
    CHECK(obs[7] == obs[1]);
    for (double v : obs) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    const auto outside = Scenario::make("x", {{51, 0}}, {{1, 1}}, {});
    CHECK_THROWS_AS(encode_observation(outside), Error);
    CHECK(encode_observation(outside, 60.0).size() == 4);
  }

  TEST_CASE("observation ignores moves within a cell") {
    const auto a = Scenario::make("a", {{3.1, 4.2}}, {{7.9, 8.0}}, {});
    const auto b = Scenario::make("b", {{3.8, 4.9}}, {{7.0, 8.7}}, {});
    CHECK(encode_observation(a) == encode_observation(b));
  }

  TEST_CASE("environment step") {
    const auto s = builtin_scenario(3);
    const auto env = PowerEnv::with_max_secrecy(s);
    const auto g = gain_matrix(s);
    const auto a = associate_max_secrecy(s, g);
    CHECK(env.association() == a);
    CHECK(env.step(PowerAllocation::uniform(5, 0.0)) == 0.0);
    const auto full = PowerAllocation::uniform(5, 1.0);
    CHECK(env.step(full) == doctest::Approx(sum_secrecy(g, full, a, s.radio())).epsilon(1e-12));

    PowerAllocation over{{0.2, 1.7, 0.5, -0.3, 0.9}};
    PowerAllocation clipped{{0.2, 1.0, 0.5, 0.0, 0.9}};
    CHECK(env.clipped_steps() == 0);
    CHECK(env.step(over) == env.step(clipped));
    CHECK(env.clipped_steps() == 1);
    CHECK_THROWS_AS(env.step(PowerAllocation::uniform(4, 1.0)), Error);
    CHECK(env.observation() == encode_observation(s));
  }

  TEST_CASE("grid levels always include p_max") {
    CHECK(grid_levels(1.0, 0.5) == std::vector<double>{0.0, 0.5, 1.0});
    const auto odd = grid_levels(1.0, 0.3);
    CHECK(odd.size() == 5);
    CHECK(odd.back() == 1.0);
    CHECK(grid_levels(1.0, 0.05).size() == 21);
  }

  TEST_CASE("grid on one AP") {
    const auto good = single_ap(20.0);
    const auto r = grid_search_oracle(good, 0.05);
    CHECK(r.powers.watts == std::vector<double>{1.0});
    CHECK(r.revenue > 0.0);
    const auto bad = single_ap(2.0);
    const auto z = grid_search_oracle(bad, 0.05);
    CHECK(z.revenue == 0.0);
    CHECK(z.powers.watts == std::vector<double>{0.0});
  }

  TEST_CASE("grid dominates every lattice point") {
    for (const auto& env : random_envs(5, 2, 500)) {
      const double step = 0.1;
      const auto r = grid_search_oracle(env, step);
      const auto levels = grid_levels(1.0, step);
      bool seen_equal_before = false;
      for (double a : levels)
        for (double b : levels) {
          const double v = env.step(PowerAllocation{{a, b}});
          CHECK(r.revenue >= v);
          if (v == r.revenue && !seen_equal_before) {
            CHECK(r.powers.watts == std::vector<double>{a, b});
            seen_equal_before = true;
          }
        }
      CHECK(r.evaluations == levels.size() * levels.size());
    }
  }

  TEST_CASE("coarse grid is within one step of a fine sweep") {
    const auto env = serving_plus_jammer();
    const double step = 0.05;
    const auto coarse = grid_search_oracle(env, step);
    const auto fine = grid_search_oracle(env, step / 10.0);
    CHECK(fine.revenue >= coarse.revenue);
    CHECK(coarse.powers[0] == 1.0);
    CHECK(std::abs(coarse.powers[1] - fine.powers[1]) <= step + 1e-12);
    CHECK(coarse.powers[1] > 0.0);
  }

  TEST_CASE("grid budget") {
    const auto env = PowerEnv::with_max_secrecy(builtin_scenario(6));
    try {
      grid_search_oracle(env, 0.05);
      FAIL("expected a budget error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::budget);
      CHECK(std::string(e.what()).find("21^13") != std::string::npos);
    }
    CHECK_THROWS_AS(grid_search_oracle(single_ap(20.0), 0.05, 5.0), Error);
    CHECK_NOTHROW(grid_search_oracle(single_ap(20.0), 0.05, 21.0));
  }

  TEST_CASE("cem basics") {
    CemConfig cfg;
    cfg.iterations = 20;
    for (const auto& env : random_envs(10, 3, 900)) {
      const double uniform = env.step(PowerAllocation::uniform(3, 1.0));
      const auto r = cem_optimize(env, cfg, 7);
      CHECK(r.revenue >= uniform);
      CHECK(r.powers.feasible(1.0));
      CHECK(env.step(r.powers) == r.revenue);
      CHECK(r.best_history.size() == cfg.iterations);
      for (std::size_t i = 1; i < r.best_history.size(); ++i)
        CHECK(r.best_history[i] >= r.best_history[i - 1]);
      const auto again = cem_optimize(env, cfg, 7);
      CHECK(again.powers == r.powers);
      CHECK(again.revenue == r.revenue);
    }
  }

  TEST_CASE("cem honours warm starts") {
    CemConfig cfg;
    cfg.iterations = 1;
    cfg.population = 2;
    const auto env = serving_plus_jammer();
    const auto best = grid_search_oracle(env, 0.01);
    const std::array warm{best.powers};
    CHECK(cem_optimize(env, cfg, 0, warm).revenue >= best.revenue);
  }

  TEST_CASE("cem on one AP") {
    const auto good = cem_optimize(single_ap(20.0), CemConfig{}, 1);
    CHECK(good.powers[0] >= 0.99);
    CHECK(cem_optimize(single_ap(2.0), CemConfig{}, 1).revenue == 0.0);
  }

  TEST_CASE("solver config round trip and validation") {
    SolverConfig c;
    c.seed = 99;
    c.cem.population = 17;
    c.sac.entropy_target = -1.5;
    c.sac.hidden_units = 64;
    const auto back = parse_solver_config(solver_config_to_json(c));
    CHECK(solver_config_to_json(back) == solver_config_to_json(c));
    CHECK(back.sac.entropy_target == -1.5);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    c.seed = 100;
    CHECK(config_hash(back) != config_hash(c));

    CHECK(parse_solver_config("{}").cem.population == CemConfig{}.population);
    CHECK_THROWS_AS(parse_solver_config(R"({"cem": {"popsize": 3}})"), Error);
    CHECK_THROWS_AS(parse_solver_config(R"({"grid_step_watts": 0})"), ValidationError);
    CHECK_THROWS_AS(parse_solver_config(R"({"cem": {"elite_fraction": 1.5}})"), ValidationError);
    CHECK_THROWS_AS(parse_solver_config("[1,"), Error);
  }

  TEST_CASE("hidden width default") {
    CHECK(default_hidden_units(1) == 32);
    CHECK(default_hidden_units(4) == 32);
    CHECK(default_hidden_units(5) == 64);
    CHECK(default_hidden_units(13) == 128);
    CHECK(default_hidden_units(40) == 256);
  }

  TEST_CASE("solver sandwich on small instances") {
    for (const auto& env : random_envs(5, 2, 1234)) {
      const double coarse = grid_search_oracle(env, 0.05).revenue;
      const double fine = grid_search_oracle(env, 0.025).revenue;
      CHECK(fine >= coarse - 1e-9);
    }
  }
}
