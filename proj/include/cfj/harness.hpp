#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfj/capacity.hpp"
#include "cfj/optimizer.hpp"
#include "cfj/propagation.hpp"
#include "cfj/sac.hpp"
#include "cfj/scenario.hpp"

namespace cfj {

enum class Implementation { normal_wifi, smart_ap, rl_cfj };
inline constexpr std::array kImplementations{Implementation::normal_wifi,
                                             Implementation::smart_ap, Implementation::rl_cfj};
std::string_view to_string(Implementation impl) noexcept;

enum class Solver { grid, cem, sac };
std::string_view to_string(Solver solver) noexcept;
/// Throws Error(parse) for an unknown name.
Solver parse_solver(std::string_view name);

struct ImplementationResult {
  Association association;
  PowerAllocation powers;
  SecrecyReport report;
};

struct SolverMeta {
  Solver solver = Solver::cem;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
};

struct ComparisonReport {
  std::string scenario_name;
  std::array<ImplementationResult, 3> per_implementation;
  SolverMeta solver_meta;

  const ImplementationResult& operator[](Implementation impl) const {
    return per_implementation[static_cast<std::size_t>(impl)];
  }
  ImplementationResult& operator[](Implementation impl) {
    return per_implementation[static_cast<std::size_t>(impl)];
  }
};

/// Strongest-signal association; serving APs at p_max, idle APs silent.
ImplementationResult run_normal_wifi(const Scenario& scenario, const GainMatrix& g);
ImplementationResult run_normal_wifi(const Scenario& scenario);

/// Secrecy-aware association; serving APs at p_max, idle APs silent.
ImplementationResult run_smart_ap(const Scenario& scenario, const GainMatrix& g);
ImplementationResult run_smart_ap(const Scenario& scenario);

/// Secrecy-aware association, then every AP's power optimised over
/// [0, p_max]. The grid lattice contains uniform p_max and the smart-AP
/// allocation, and CEM evaluates both before sampling, so neither solver
/// reports less than either.
ImplementationResult run_rl_cfj(const Scenario& scenario, const GainMatrix& g,
                                const SolverConfig& config, Solver solver);
ImplementationResult run_rl_cfj(const Scenario& scenario, const SolverConfig& config,
                                Solver solver);

/// RL row driven by an already trained policy.
ImplementationResult run_rl_cfj_with_policy(const Scenario& scenario, const GainMatrix& g,
                                            const Policy& policy,
                                            double map_side = kDefaultMapSide);

/// All three implementations on one shared gain matrix.
ComparisonReport run_comparison(const Scenario& scenario, const SolverConfig& config,
                                Solver solver);

enum class ReportFormat { csv, table };
ReportFormat parse_report_format(std::string_view name);

/// One row per (scenario, implementation). Doubles print with 17 significant
/// digits so metrics can be recomputed from the emitted powers/association.
std::string format_csv(std::span<const ComparisonReport> reports);
std::string format_table(std::span<const ComparisonReport> reports);
void emit_report(std::span<const ComparisonReport> reports, ReportFormat format,
                 const std::filesystem::path& out);

/// Parsed CSV row, for tooling and for checking reports against recomputation.
struct ReportRow {
  std::string scenario;
  std::string implementation;
  double sum_secrecy_bps = 0.0;
  double sum_eve_capacity_bps = 0.0;
  double secrecy_ratio_pct = 0.0;
  Association association;
  PowerAllocation powers;
};
std::vector<ReportRow> parse_report_csv(const std::string& csv);

}  // namespace cfj
