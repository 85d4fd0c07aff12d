#include "cfj/harness.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cfj/association.hpp"
#include "cfj/error.hpp"

namespace cfj {
namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCategory::parse, "bad number '" + s + "' in report");
  }
}

std::string join_powers(const PowerAllocation& p) {
  std::string out;
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (n) out += ';';
    out += g17(p[n]);
  }
  return out;
}

std::string join_association(const Association& a) {
  std::string out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(a[k] + 1);
  }
  return out;
}

ImplementationResult finish(const Scenario& scenario, const GainMatrix& g, Association a,
                            PowerAllocation p) {
  auto r = report(scenario, g, p, a);
  return {std::move(a), std::move(p), std::move(r)};
}

}  // namespace

std::string_view to_string(Implementation impl) noexcept {
  switch (impl) {
    case Implementation::normal_wifi: return "normal_wifi";
    case Implementation::smart_ap: return "smart_ap";
    case Implementation::rl_cfj: return "rl_cfj";
  }
  return "unknown";
}

std::string_view to_string(Solver solver) noexcept {
  switch (solver) {
    case Solver::grid: return "grid";
    case Solver::cem: return "cem";
    case Solver::sac: return "sac";
  }
  return "unknown";
}

Solver parse_solver(std::string_view name) {
  if (name == "grid") return Solver::grid;
  if (name == "cem") return Solver::cem;
  if (name == "sac") return Solver::sac;
  throw Error(ErrorCategory::parse, "unknown solver '" + std::string(name) + "' (grid|cem|sac)");
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "table") return ReportFormat::table;
  throw Error(ErrorCategory::parse, "unknown report format '" + std::string(name) + "' (csv|table)");
}

ImplementationResult run_normal_wifi(const Scenario& scenario, const GainMatrix& g) {
  auto a = associate_strongest_signal(g);
  auto p = idle_ap_powers(a, g.n_aps(), IdleMode::baseline, scenario.radio().p_max_watts);
  return finish(scenario, g, std::move(a), std::move(p));
}

ImplementationResult run_normal_wifi(const Scenario& scenario) {
  return run_normal_wifi(scenario, gain_matrix(scenario));
}

ImplementationResult run_smart_ap(const Scenario& scenario, const GainMatrix& g) {
  auto a = associate_max_secrecy(scenario, g);
  auto p = idle_ap_powers(a, g.n_aps(), IdleMode::baseline, scenario.radio().p_max_watts);
  return finish(scenario, g, std::move(a), std::move(p));
}

ImplementationResult run_smart_ap(const Scenario& scenario) {
  return run_smart_ap(scenario, gain_matrix(scenario));
}

ImplementationResult run_rl_cfj(const Scenario& scenario, const GainMatrix& g,
                                const SolverConfig& config, Solver solver) {
  if (auto bad = config.violations(); !bad.empty()) throw ValidationError(std::move(bad));
  auto a = associate_max_secrecy(scenario, g);
  const PowerEnv env(scenario, g, a);
  PowerAllocation powers;
  switch (solver) {
    case Solver::grid:
      powers = grid_search_oracle(env, config.grid_step_watts, config.grid_budget).powers;
      break;
    case Solver::cem: {
      const std::array warm{
          idle_ap_powers(a, g.n_aps(), IdleMode::baseline, scenario.radio().p_max_watts)};
      powers = cem_optimize(env, config.cem, config.seed, warm).powers;
      break;
    }
    case Solver::sac:
      powers = sac_train(env, config, config.seed).policy.act_deterministic(env.observation());
      break;
  }
  return finish(scenario, g, std::move(a), std::move(powers));
}

ImplementationResult run_rl_cfj(const Scenario& scenario, const SolverConfig& config,
                                Solver solver) {
  return run_rl_cfj(scenario, gain_matrix(scenario), config, solver);
}

ImplementationResult run_rl_cfj_with_policy(const Scenario& scenario, const GainMatrix& g,
                                            const Policy& policy, double map_side) {
  auto a = associate_max_secrecy(scenario, g);
  if (policy.action_dim() != g.n_aps()) {
    throw Error(ErrorCategory::dimension, "policy controls " + std::to_string(policy.action_dim()) +
                                              " APs, scenario has " + std::to_string(g.n_aps()));
  }
  auto p = policy.act_deterministic(encode_observation(scenario, map_side));
  return finish(scenario, g, std::move(a), std::move(p));
}

ComparisonReport run_comparison(const Scenario& scenario, const SolverConfig& config,
                                Solver solver) {
  const auto start = std::chrono::steady_clock::now();
  const auto g = gain_matrix(scenario);
  ComparisonReport rep;
  rep.scenario_name = scenario.name();
  rep[Implementation::normal_wifi] = run_normal_wifi(scenario, g);
  rep[Implementation::smart_ap] = run_smart_ap(scenario, g);
  rep[Implementation::rl_cfj] = run_rl_cfj(scenario, g, config, solver);
  rep.solver_meta.solver = solver;
  rep.solver_meta.seed = config.seed;
  rep.solver_meta.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string format_csv(std::span<const ComparisonReport> reports) {
  std::string out =
      "scenario,implementation,sum_secrecy_bps,sum_eve_capacity_bps,secrecy_ratio_pct,"
      "association,powers_w\n";
  for (const auto& rep : reports) {
    for (auto impl : kImplementations) {
      const auto& r = rep[impl];
      out += csv_field(rep.scenario_name);
      out += ',';
      out += to_string(impl);
      out += ',' + g17(r.report.sum_secrecy);
      out += ',' + g17(r.report.sum_eve_capacity);
      out += ',' + g17(r.report.secrecy_ratio);
      out += ',' + join_association(r.association);
      out += ',' + join_powers(r.powers);
      out += '\n';
    }
  }
  return out;
}

std::string format_table(std::span<const ComparisonReport> reports) {
  std::ostringstream os;
  os << "# baselines (normal_wifi, smart_ap): idle APs silent; rl_cfj: every AP transmits\n"
     << "# capacities in bit/s (bps/Hz at W = 1 Hz)\n";
  char line[512];
  std::snprintf(line, sizeof line, "%-16s %-12s %14s %14s %10s  %-18s %s\n", "scenario",
                "impl", "sum_secrecy", "sum_eve_cap", "ratio_%", "association", "powers_w");
  os << line;
  for (const auto& rep : reports) {
    for (auto impl : kImplementations) {
      const auto& r = rep[impl];
      std::string powers;
      for (std::size_t n = 0; n < r.powers.size(); ++n) {
        char w[32];
        std::snprintf(w, sizeof w, "%s%.3f", n ? " " : "", r.powers[n]);
        powers += w;
      }
      std::snprintf(line, sizeof line, "%-16s %-12s %14.6f %14.6f %10.2f  %-18s %s\n",
                    rep.scenario_name.c_str(), std::string(to_string(impl)).c_str(),
                    r.report.sum_secrecy, r.report.sum_eve_capacity, r.report.secrecy_ratio,
                    join_association(r.association).c_str(), powers.c_str());
      os << line;
    }
  }
  return os.str();
}

void emit_report(std::span<const ComparisonReport> reports, ReportFormat format,
                 const std::filesystem::path& out) {
  const std::string text = format == ReportFormat::csv ? format_csv(reports) : format_table(reports);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorCategory::io, "cannot write report " + out.string());
  f << text;
  if (!f) throw Error(ErrorCategory::io, "write failed for " + out.string());
}

std::vector<ReportRow> parse_report_csv(const std::string& csv) {
  std::vector<ReportRow> rows;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw Error(ErrorCategory::parse, "report row needs 7 fields: " + line);
    ReportRow r;
    r.scenario = f[0];
    r.implementation = f[1];
    r.sum_secrecy_bps = to_double(f[2]);
    r.sum_eve_capacity_bps = to_double(f[3]);
    r.secrecy_ratio_pct = to_double(f[4]);
    for (const auto& s : split(f[5], ';')) {
      const auto v = static_cast<long long>(to_double(s));
      if (v < 1) throw Error(ErrorCategory::parse, "association indices are 1-based");
      r.association.ap.push_back(static_cast<std::size_t>(v - 1));
    }
    for (const auto& s : split(f[6], ';')) r.powers.watts.push_back(to_double(s));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cfj
