#include "cfj/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cfj/error.hpp"

#ifndef CFJ_DATA_DIR
#define CFJ_DATA_DIR "data"
#endif

namespace cfj {
namespace {

using json = nlohmann::json;

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_positions(const std::vector<Position>& nodes, const char* kind,
                     std::vector<std::string>& out) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].x) || !std::isfinite(nodes[i].y)) {
      out.push_back(std::string(kind) + "[" + std::to_string(i + 1) +
                    "] has a non-finite coordinate");
    }
  }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCategory::parse, "unknown field '" + key + "' in " + where);
    }
  }
}

double read_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw Error(ErrorCategory::parse, where + "." + key + " must be a number");
  }
  return v.get<double>();
}

std::vector<Position> read_positions(const json& doc, const char* key) {
  std::vector<Position> out;
  if (!doc.contains(key)) return out;
  const auto& arr = doc.at(key);
  if (!arr.is_array()) throw Error(ErrorCategory::parse, std::string(key) + " must be an array");
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& p = arr[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCategory::parse, std::string(key) + "[" + std::to_string(i + 1) +
                                            "] must be an [x, y] pair of numbers");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

RadioParams read_radio(const json& r) {
  if (!r.is_object()) throw Error(ErrorCategory::parse, "radio must be an object");
  reject_unknown_keys(r,
                      {"frequency_hz", "gain_tx", "gain_rx", "path_loss_exp", "noise_watts",
                       "bandwidth_hz", "p_max_watts", "d_min_meters"},
                      "radio");
  RadioParams radio;
  auto take = [&](const char* key, double& field) {
    if (r.contains(key)) field = read_number(r, key, "radio");
  };
  take("frequency_hz", radio.frequency_hz);
  take("gain_tx", radio.gain_tx);
  take("gain_rx", radio.gain_rx);
  take("path_loss_exp", radio.path_loss_exp);
  take("noise_watts", radio.noise_watts);
  take("bandwidth_hz", radio.bandwidth_hz);
  take("p_max_watts", radio.p_max_watts);
  take("d_min_meters", radio.d_min_meters);
  return radio;
}

json positions_json(const std::vector<Position>& nodes) {
  json arr = json::array();
  for (const auto& p : nodes) arr.push_back(json::array({p.x, p.y}));
  return arr;
}

}  // namespace

double distance(const Position& a, const Position& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<std::string> RadioParams::violations() const {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " > 0 (got " + fmt_num(v) + ")");
  };
  positive(frequency_hz, "frequency_hz");
  positive(gain_tx, "gain_tx");
  positive(gain_rx, "gain_rx");
  if (!(path_loss_exp >= 1.0) || !std::isfinite(path_loss_exp)) {
    out.push_back("path_loss_exp >= 1 (got " + fmt_num(path_loss_exp) + ")");
  }
  positive(noise_watts, "noise_watts");
  positive(bandwidth_hz, "bandwidth_hz");
  positive(p_max_watts, "p_max_watts");
  positive(d_min_meters, "d_min_meters");
  return out;
}

Scenario Scenario::make(std::string name, std::vector<Position> aps,
                        std::vector<Position> users, std::vector<Position> eves,
                        RadioParams radio) {
  std::vector<std::string> bad;
  if (aps.empty()) bad.emplace_back("n_aps >= 1 (got 0)");
  if (users.empty()) bad.emplace_back("n_users >= 1 (got 0)");
  check_positions(aps, "aps", bad);
  check_positions(users, "users", bad);
  check_positions(eves, "eves", bad);
  for (auto& v : radio.violations()) bad.push_back(std::move(v));
  if (!bad.empty()) throw ValidationError(std::move(bad));

  Scenario s;
  s.name_ = std::move(name);
  s.aps_ = std::move(aps);
  s.users_ = std::move(users);
  s.eves_ = std::move(eves);
  s.radio_ = radio;
  return s;
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::parse, std::string("malformed scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCategory::parse, "scenario must be a JSON object");
  reject_unknown_keys(doc, {"name", "radio", "aps", "users", "eves"}, "scenario");

  std::string name = "scenario";
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw Error(ErrorCategory::parse, "name must be a string");
    name = doc["name"].get<std::string>();
  }
  RadioParams radio = doc.contains("radio") ? read_radio(doc["radio"]) : RadioParams{};
  return Scenario::make(std::move(name), read_positions(doc, "aps"),
                        read_positions(doc, "users"), read_positions(doc, "eves"), radio);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  const auto& r = s.radio();
  json doc = {
      {"name", s.name()},
      {"radio",
       {{"frequency_hz", r.frequency_hz},
        {"gain_tx", r.gain_tx},
        {"gain_rx", r.gain_rx},
        {"path_loss_exp", r.path_loss_exp},
        {"noise_watts", r.noise_watts},
        {"bandwidth_hz", r.bandwidth_hz},
        {"p_max_watts", r.p_max_watts},
        {"d_min_meters", r.d_min_meters}}},
      {"aps", positions_json(s.aps())},
      {"users", positions_json(s.users())},
      {"eves", positions_json(s.eves())},
  };
  return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot write scenario file " + path.string());
  out << scenario_to_json(scenario);
  if (!out) throw Error(ErrorCategory::io, "write failed for " + path.string());
}

std::filesystem::path default_scenario_dir() {
  return std::filesystem::path(CFJ_DATA_DIR) / "scenarios";
}

Scenario builtin_scenario(int id) { return builtin_scenario(id, default_scenario_dir()); }

Scenario builtin_scenario(int id, const std::filesystem::path& dir) {
  if (id < 1 || id > 6) {
    throw Error(ErrorCategory::range,
                "builtin scenario id must be in 1..6 (got " + std::to_string(id) + ")");
  }
  return load_scenario(dir / ("scenario" + std::to_string(id) + ".json"));
}

Scenario generate_random_scenario(const RandomSpec& spec, std::uint64_t seed) {
  std::vector<std::string> bad;
  if (spec.n_aps < 1) bad.emplace_back("n_aps >= 1 (got 0)");
  if (spec.n_users < 1) bad.emplace_back("n_users >= 1 (got 0)");
  if (!(spec.map_side_meters > 0.0) || !std::isfinite(spec.map_side_meters)) {
    bad.push_back("map_side_meters > 0 (got " + fmt_num(spec.map_side_meters) + ")");
  }
  for (auto& v : spec.radio.violations()) bad.push_back(std::move(v));
  if (!bad.empty()) throw ValidationError(std::move(bad));

  std::mt19937_64 rng(seed);
  const double side = spec.map_side_meters;

  // APs: pick n of the g×g grid cells, jitter each around its cell center by
  // less than half the gap between a g-grid and a (g+1)-grid.
  const auto g = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.n_aps))));
  const double cell = side / static_cast<double>(g);
  const double jitter = 0.499 * (cell - side / static_cast<double>(g + 1));
  std::vector<std::size_t> cells(g * g);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  std::shuffle(cells.begin(), cells.end(), rng);
  cells.resize(spec.n_aps);
  std::sort(cells.begin(), cells.end());

  std::uniform_real_distribution<double> jit(-jitter, jitter);
  std::vector<Position> aps;
  aps.reserve(spec.n_aps);
  for (auto c : cells) {
    const double cx = (static_cast<double>(c % g) + 0.5) * cell;
    const double cy = (static_cast<double>(c / g) + 0.5) * cell;
    aps.push_back({cx + jit(rng), cy + jit(rng)});
  }

  std::uniform_real_distribution<double> uni(0.0, side);
  auto scatter = [&](std::size_t count) {
    std::vector<Position> pts(count);
    for (auto& p : pts) {
      p.x = uni(rng);
      p.y = uni(rng);
    }
    return pts;
  };
  auto users = scatter(spec.n_users);
  auto eves = scatter(spec.n_eves);
  return Scenario::make("random-" + std::to_string(seed), std::move(aps), std::move(users),
                        std::move(eves), spec.radio);
}

}  // namespace cfj
