// cfj: scenario generation, secrecy simulation and power-allocation training.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfj/error.hpp"
#include "cfj/harness.hpp"
#include "cfj/kernels.hpp"
#include "cfj/optimizer.hpp"
#include "cfj/sac.hpp"
#include "cfj/scenario.hpp"

namespace {

int exit_code(cfj::ErrorCategory c) {
  switch (c) {
    case cfj::ErrorCategory::parse: return 3;
    case cfj::ErrorCategory::validation: return 4;
    case cfj::ErrorCategory::io: return 5;
    case cfj::ErrorCategory::budget: return 6;
    case cfj::ErrorCategory::solver: return 7;
    case cfj::ErrorCategory::dimension: return 8;
    case cfj::ErrorCategory::range: return 9;
  }
  return 1;
}

std::vector<cfj::Scenario> resolve_scenarios(const std::vector<std::string>& refs) {
  std::vector<cfj::Scenario> out;
  for (const auto& ref : refs) {
    constexpr std::string_view prefix = "builtin:";
    if (ref.rfind(prefix, 0) == 0) {
      const auto id = ref.substr(prefix.size());
      if (id == "all") {
        for (int i = 1; i <= 6; ++i) out.push_back(cfj::builtin_scenario(i));
        continue;
      }
      int n = 0;
      try {
        n = std::stoi(id);
      } catch (const std::exception&) {
        throw cfj::Error(cfj::ErrorCategory::parse, "bad builtin scenario id '" + id + "'");
      }
      out.push_back(cfj::builtin_scenario(n));
    } else {
      out.push_back(cfj::load_scenario(ref));
    }
  }
  return out;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw cfj::Error(cfj::ErrorCategory::io, "cannot write " + path);
  f << text;
}

std::string render(const std::vector<cfj::ComparisonReport>& reports, const std::string& format) {
  return cfj::parse_report_format(format) == cfj::ReportFormat::csv ? cfj::format_csv(reports)
                                                                     : cfj::format_table(reports);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative friendly jamming: secrecy simulation and power allocation"};
  app.require_subcommand(1);

  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // simulate
  auto* sim = app.add_subcommand("simulate", "Compare normal Wi-Fi, smart AP and RL-CFJ");
  std::vector<std::string> sim_scenarios;
  std::string sim_solver = "cem";
  std::uint64_t sim_seed = 0;
  std::optional<double> sim_grid_step;
  std::string sim_out;
  std::string sim_format = "csv";
  std::string sim_config;
  sim->add_option("--scenario", sim_scenarios, "Scenario file, builtin:1..6 or builtin:all")
      ->required();
  sim->add_option("--solver", sim_solver, "grid, cem or sac")
      ->check(CLI::IsMember({"grid", "cem", "sac"}));
  sim->add_option("--seed", sim_seed, "Solver seed");
  sim->add_option("--grid-step", sim_grid_step, "Grid oracle step in watts");
  sim->add_option("--out", sim_out, "Output path (stdout when omitted)");
  sim->add_option("--format", sim_format, "csv or table")->check(CLI::IsMember({"csv", "table"}));
  sim->add_option("--config", sim_config, "Solver config JSON");

  // train
  auto* train = app.add_subcommand("train", "Train a SAC power-allocation policy");
  std::string train_scenario;
  std::string train_solver = "sac";
  std::string train_config;
  std::string train_checkpoint;
  std::string train_curve;
  std::optional<std::uint64_t> train_seed;
  train->add_option("--scenario", train_scenario, "Scenario file or builtin:1..6")->required();
  train->add_option("--solver", train_solver, "Only sac is trainable")
      ->check(CLI::IsMember({"sac"}));
  train->add_option("--config", train_config, "Solver config JSON");
  train->add_option("--checkpoint", train_checkpoint, "Where to write the policy")->required();
  train->add_option("--curve", train_curve, "Training-curve CSV path");
  train->add_option("--seed", train_seed, "Overrides the config seed");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Run the comparison with a trained policy");
  std::string eval_checkpoint;
  std::string eval_scenario;
  std::string eval_out;
  std::string eval_format = "table";
  eval->add_option("--checkpoint", eval_checkpoint, "Policy checkpoint")->required();
  eval->add_option("--scenario", eval_scenario, "Scenario file or builtin:1..6")->required();
  eval->add_option("--out", eval_out, "Output path (stdout when omitted)");
  eval->add_option("--format", eval_format, "csv or table")->check(CLI::IsMember({"csv", "table"}));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random scenario file");
  cfj::RandomSpec spec;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n-aps", spec.n_aps, "Number of APs")->required();
  gen->add_option("--n-users", spec.n_users, "Number of users")->required();
  gen->add_option("--n-eves", spec.n_eves, "Number of eavesdroppers")->required();
  gen->add_option("--map", spec.map_side_meters, "Map side in meters");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (isa == "scalar") cfj::kernels::set_isa(cfj::kernels::Isa::scalar);
    if (isa == "avx2") cfj::kernels::set_isa(cfj::kernels::Isa::avx2);

    if (*sim) {
      cfj::SolverConfig config =
          sim_config.empty() ? cfj::SolverConfig{} : cfj::load_solver_config(sim_config);
      if (sim->count("--seed")) config.seed = sim_seed;
      if (sim_grid_step) config.grid_step_watts = *sim_grid_step;
      const auto solver = cfj::parse_solver(sim_solver);
      std::vector<cfj::ComparisonReport> reports;
      for (const auto& s : resolve_scenarios(sim_scenarios)) {
        reports.push_back(cfj::run_comparison(s, config, solver));
        std::fprintf(stderr, "%s: %s solver, seed %llu, %.2f s\n", s.name().c_str(),
                     std::string(cfj::to_string(solver)).c_str(),
                     static_cast<unsigned long long>(config.seed),
                     reports.back().solver_meta.wall_time_s);
      }
      write_text(render(reports, sim_format), sim_out);
    } else if (*train) {
      cfj::SolverConfig config =
          train_config.empty() ? cfj::SolverConfig{} : cfj::load_solver_config(train_config);
      if (train_seed) config.seed = *train_seed;
      const auto scenario = resolve_scenarios({train_scenario}).front();
      const auto env = cfj::PowerEnv::with_max_secrecy(scenario);
      const auto result = cfj::sac_train(env, config, config.seed);
      cfj::save_policy(result.policy, train_checkpoint);
      if (!train_curve.empty()) write_text(cfj::training_curve_csv(result.curve), train_curve);
      std::fprintf(stderr,
                   "trained %zu episodes: deterministic revenue %.6f, stochastic mean %.6f, "
                   "alpha %.4g\n",
                   result.curve.size(), result.deterministic_revenue,
                   result.mean_stochastic_revenue, result.final_alpha);
    } else if (*eval) {
      const auto policy = cfj::load_policy(eval_checkpoint);
      const auto scenario = resolve_scenarios({eval_scenario}).front();
      const auto g = cfj::gain_matrix(scenario);
      cfj::ComparisonReport rep;
      rep.scenario_name = scenario.name();
      rep[cfj::Implementation::normal_wifi] = cfj::run_normal_wifi(scenario, g);
      rep[cfj::Implementation::smart_ap] = cfj::run_smart_ap(scenario, g);
      rep[cfj::Implementation::rl_cfj] = cfj::run_rl_cfj_with_policy(scenario, g, policy);
      rep.solver_meta.solver = cfj::Solver::sac;
      write_text(render({rep}, eval_format), eval_out);
    } else if (*gen) {
      write_text(cfj::scenario_to_json(cfj::generate_random_scenario(spec, gen_seed)), gen_out);
    }
  } catch (const cfj::Error& e) {
    std::fprintf(stderr, "error[%s]: %s\n", std::string(cfj::to_string(e.category())).c_str(),
                 e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[internal]: %s\n", e.what());
    return 1;
  }
  return 0;
}
