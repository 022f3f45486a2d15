#include "uepnc/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace uepnc {
namespace {

using nlohmann::json;

void expect_keys(const json& obj, std::string_view where,
                 std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw std::invalid_argument(std::string(where) + ": expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

void read_network(const json& j, PropagationParams& p) {
  expect_keys(j, "network",
              {"isd_m", "tx_power_dbm", "bandwidth_hz", "carrier_hz", "noise_figure_db",
               "antenna_gain_dbi", "beamwidth_deg", "front_to_back_db",
               "pathloss_intercept_db", "pathloss_slope_db", "min_distance_m",
               "shadowing_std_db", "shadowing_seed", "sfn_sites"});
  read(j, "isd_m", p.isd_m);
  read(j, "tx_power_dbm", p.tx_power_dbm);
  read(j, "bandwidth_hz", p.bandwidth_hz);
  read(j, "carrier_hz", p.carrier_hz);
  read(j, "noise_figure_db", p.noise_figure_db);
  read(j, "antenna_gain_dbi", p.antenna_gain_dbi);
  read(j, "beamwidth_deg", p.beamwidth_deg);
  read(j, "front_to_back_db", p.front_to_back_db);
  read(j, "pathloss_intercept_db", p.pathloss_intercept_db);
  read(j, "pathloss_slope_db", p.pathloss_slope_db);
  read(j, "min_distance_m", p.min_distance_m);
  read(j, "shadowing_std_db", p.shadowing_std_db);
  read(j, "shadowing_seed", p.shadowing_seed);
  read(j, "sfn_sites", p.sfn_sites);
}

void read_radio(const json& j, RadioConfig& r) {
  expect_keys(j, "radio",
              {"h_bytes", "d_gop_s", "d_tti_s", "f_embms", "n_rbp", "p_hat",
               "capacity_ratio"});
  if (auto it = j.find("h_bytes"); it != j.end()) {
    r.element_bits = 8.0 * it->get<double>();
  }
  read(j, "d_gop_s", r.d_gop_s);
  read(j, "d_tti_s", r.d_tti_s);
  read(j, "f_embms", r.f_embms);
  read(j, "n_rbp", r.n_rbp);
  read(j, "p_hat", r.p_hat);
  if (auto it = j.find("capacity_ratio"); it != j.end()) {
    const auto v = it->get<std::vector<int>>();
    if (v.size() != r.capacity_ratio.size()) {
      throw std::invalid_argument("radio.capacity_ratio: expected 12 entries");
    }
    std::copy(v.begin(), v.end(), r.capacity_ratio.begin());
  }
}

void read_bler(const json& j, BlerModel& b) {
  expect_keys(j, "bler", {"gamma_db", "delta_db"});
  if (auto it = j.find("gamma_db"); it != j.end()) {
    const auto v = it->get<std::vector<double>>();
    if (v.size() != b.gamma_db.size()) {
      throw std::invalid_argument("bler.gamma_db: expected 12 entries");
    }
    std::copy(v.begin(), v.end(), b.gamma_db.begin());
  }
  read(j, "delta_db", b.delta_db);
}

void read_stream(const json& j, Scenario& s) {
  expect_keys(j, "stream", {"bitrate_kbps", "k", "psnr_db", "t_hat"});
  read(j, "bitrate_kbps", s.bitrate_kbps);
  read(j, "k", s.k);
  read(j, "psnr_db", s.psnr_db);
  read(j, "t_hat", s.t_hat);
  if (s.bitrate_kbps.empty() == s.k.empty()) {
    throw std::invalid_argument("stream: give exactly one of bitrate_kbps or k");
  }
}

UserPattern read_users(const json& j) {
  expect_keys(j, "users", {"pattern", "count", "step_m", "start_m"});
  const auto pattern = j.value("pattern", std::string("radial"));
  if (pattern == "radial") {
    RadialPattern p;
    read(j, "count", p.count);
    read(j, "step_m", p.step_m);
    read(j, "start_m", p.start_m);
    return p;
  }
  if (pattern == "grid") {
    if (j.contains("start_m")) throw std::invalid_argument("users: grid has no start_m");
    GridPattern p;
    read(j, "count", p.count);
    read(j, "step_m", p.step_m);
    return p;
  }
  throw std::invalid_argument("users.pattern: expected 'radial' or 'grid'");
}

void read_direct(const json& j, Scenario& s) {
  expect_keys(j, "direct", {"mode", "budget", "genetic"});
  const auto mode = j.value("mode", std::string("auto"));
  if (mode == "auto") {
    s.direct = DirectChoice::kAuto;
  } else if (mode == "off") {
    s.direct = DirectChoice::kOff;
  } else if (mode == "exhaustive") {
    s.direct = DirectChoice::kExhaustive;
  } else if (mode == "genetic") {
    s.direct = DirectChoice::kGenetic;
  } else {
    throw std::invalid_argument("direct.mode: expected auto, off, exhaustive or genetic");
  }
  read(j, "budget", s.direct_options.budget);
  if (auto it = j.find("genetic"); it != j.end()) {
    const json& g = *it;
    auto& o = s.direct_options.genetic;
    expect_keys(g, "direct.genetic",
                {"population", "generations", "tournament", "crossover_rate",
                 "mutation_rate", "penalty", "elites", "constraints"});
    read(g, "population", o.population);
    read(g, "generations", o.generations);
    read(g, "tournament", o.tournament);
    read(g, "crossover_rate", o.crossover_rate);
    read(g, "mutation_rate", o.mutation_rate);
    read(g, "penalty", o.penalty);
    read(g, "elites", o.elites);
    const auto c = g.value("constraints", std::string("penalty"));
    if (c == "penalty") {
      o.constraints = ConstraintHandling::kPenalty;
    } else if (c == "hard") {
      o.constraints = ConstraintHandling::kHard;
    } else {
      throw std::invalid_argument("direct.genetic.constraints: expected penalty or hard");
    }
  }
}

void read_validation(const json& j, ValidationGrid& v) {
  expect_keys(j, "validation",
              {"k", "per_tb", "erasure", "trials", "saturation", "max_tbs"});
  read(j, "k", v.k);
  read(j, "per_tb", v.per_tb);
  read(j, "erasure", v.erasure);
  read(j, "trials", v.trials);
  read(j, "saturation", v.saturation);
  read(j, "max_tbs", v.max_tbs);
}

constexpr std::string_view kStreamA = R"({
  "stream": {"bitrate_kbps": [47.3, 326.1, 1396.7],
             "psnr_db": [27.9, 35.9, 45.8],
             "t_hat": [0.99, 0.8, 0.6]}
})";

constexpr std::string_view kStreamB = R"({
  "stream": {"bitrate_kbps": [36.8, 79.4, 303.4, 835.9],
             "psnr_db": [28.1, 33.4, 39.9, 46.4],
             "t_hat": [0.99, 0.9, 0.75, 0.6]}
})";

}  // namespace

LayerConfig Scenario::layers() const {
  std::vector<int> sizes = k;
  std::vector<double> bps;
  for (double kbps : bitrate_kbps) {
    bps.push_back(kbps * 1e3);
    if (k.empty()) sizes.push_back(source_elements(kbps * 1e3, radio.d_gop_s, radio.element_bits));
  }
  return LayerConfig(std::move(sizes), std::move(bps), psnr_db, t_hat);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  Scenario s;
  try {
    expect_keys(j, "scenario",
                {"name", "mode", "network", "radio", "bler", "q_hat", "stream", "users",
                 "direct", "sweep_n_rbp", "validation", "seed"});
    read(j, "name", s.name);
    const auto mode = j.value("mode", std::string("sc"));
    if (mode == "sc") {
      s.mode = DeliveryMode::kSingleCell;
    } else if (mode == "sfn") {
      s.mode = DeliveryMode::kSfn;
    } else {
      throw std::invalid_argument("mode: expected 'sc' or 'sfn'");
    }
    if (j.contains("network")) read_network(j["network"], s.network);
    if (j.contains("radio")) read_radio(j["radio"], s.radio);
    if (j.contains("bler")) read_bler(j["bler"], s.bler);
    s.bler.p_hat = s.radio.p_hat;
    read(j, "q_hat", s.q_hat);
    if (!j.contains("stream")) throw std::invalid_argument("scenario: missing stream");
    read_stream(j["stream"], s);
    if (j.contains("users")) s.users = read_users(j["users"]);
    if (j.contains("direct")) read_direct(j["direct"], s);
    read(j, "sweep_n_rbp", s.sweep_n_rbp);
    if (j.contains("validation")) read_validation(j["validation"], s.validation);
    read(j, "seed", s.seed);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  if (!(s.q_hat > 0.0 && s.q_hat <= 1.0)) {
    throw std::invalid_argument("q_hat outside (0, 1]");
  }
  if (!(s.radio.p_hat >= 0.0 && s.radio.p_hat < 1.0)) {
    throw std::invalid_argument("radio.p_hat outside [0, 1)");
  }
  if (s.radio.n_rbp < 1) throw std::invalid_argument("radio.n_rbp must be positive");
  (void)s.layers();  // surfaces stream-table errors at load time
  s.digest = fnv1a_hex(j.dump());
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open scenario " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

Scenario preset_scenario(StreamPreset stream, DeliveryMode mode) {
  json j = json::parse(stream == StreamPreset::kA ? kStreamA : kStreamB);
  const bool sfn = mode == DeliveryMode::kSfn;
  j["name"] = std::string(stream == StreamPreset::kA ? "stream-a" : "stream-b") +
              (sfn ? "-sfn" : "-sc");
  j["mode"] = sfn ? "sfn" : "sc";
  j["users"] = sfn ? json{{"pattern", "grid"}, {"count", 1700}, {"step_m", 20.0}}
                   : json{{"pattern", "radial"}, {"count", 80}, {"step_m", 2.0},
                          {"start_m", 90.0}};
  return parse_scenario(j.dump());
}

}  // namespace uepnc
