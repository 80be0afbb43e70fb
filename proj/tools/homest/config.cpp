#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace homest::cli {

Json to_json(const ExperimentConfig& c) {
  const auto& m = c.model;
  const auto& s = c.simulation;
  const auto& a = c.analysis;
  Json j;
  j["model"] = {{"omega", m.omega},     {"detuning", m.detuning},     {"gamma", m.gamma},
                {"phase", m.phase},     {"efficiency", m.efficiency}, {"parameter", m.parameter}};
  j["simulation"] = {{"duration", s.duration}, {"dt", s.dt},           {"n_traj", s.n_traj},
                     {"base_seed", s.base_seed}, {"initial", s.initial}, {"scheme", s.scheme},
                     {"keep_states", s.keep_states}};
  j["analysis"] = {{"grid", {{"lo", a.grid_lo}, {"hi", a.grid_hi}, {"points", a.grid_points}}},
                   {"checkpoints", a.checkpoints},
                   {"dtau", a.dtau},
                   {"lags", a.lags},
                   {"mean_subtract", a.mean_subtract},
                   {"dtheta", a.dtheta},
                   {"qrt_dtau", a.qrt_dtau},
                   {"tau_max", a.tau_max},
                   {"omega_max", a.omega_max},
                   {"omega_points", a.omega_points},
                   {"shot_floor", a.shot_floor},
                   {"score_init", a.score_init},
                   {"sweep", {{"phase_points", a.sweep_phase_points}, {"omegas", a.sweep_omegas}}}};
  j["output"] = {{"directory", c.output.directory}, {"format", c.output.format}};
  j["workers"] = c.workers;
  return j;
}

namespace {

// Overlay `patch` on `base`, which doubles as the schema: keys must exist and types must agree.
void merge(Json& base, const Json& patch, const std::string& path) {
  auto where = [&] { return path.empty() ? std::string("<root>") : path; };
  if (base.is_object()) {
    if (!patch.is_object()) throw ConfigError(where() + ": expected an object");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
      const std::string key = path.empty() ? it.key() : path + "." + it.key();
      if (!base.contains(it.key())) throw ConfigError("unknown key '" + key + "'");
      merge(base[it.key()], it.value(), key);
    }
    return;
  }
  bool ok = false;
  if (base.is_boolean()) ok = patch.is_boolean();
  else if (base.is_number_unsigned() || base.is_number_integer()) ok = patch.is_number_unsigned();
  else if (base.is_number_float()) ok = patch.is_number();
  else if (base.is_string()) ok = patch.is_string();
  else if (base.is_array()) {
    ok = patch.is_array();
    for (const auto& v : patch) ok = ok && v.is_number();
  }
  if (!ok) {
    const char* expected = base.is_boolean()          ? "a boolean"
                           : base.is_number_unsigned() ? "a non-negative integer"
                           : base.is_number()          ? "a number"
                           : base.is_string()          ? "a string"
                                                       : "an array of numbers";
    throw ConfigError(where() + ": expected " + expected + ", got " + patch.dump());
  }
  base = patch;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

bool one_of(const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return true;
  }
  return false;
}

void validate(const ExperimentConfig& c) {
  const auto& m = c.model;
  const auto& s = c.simulation;
  const auto& a = c.analysis;
  require(std::isfinite(m.omega) && std::isfinite(m.detuning) && std::isfinite(m.phase), "model: values must be finite");
  require(m.gamma > 0.0 && std::isfinite(m.gamma), "model.gamma must be positive");
  require(m.efficiency >= 0.0 && m.efficiency <= 1.0, "model.efficiency must lie in [0, 1]");
  require(one_of(m.parameter, {"omega", "detuning"}), "model.parameter must be omega or detuning");

  require(s.dt > 0.0 && std::isfinite(s.dt), "simulation.dt must be positive");
  require(s.duration >= s.dt && std::isfinite(s.duration), "simulation.duration must be at least dt");
  require(s.n_traj >= 1, "simulation.n_traj must be at least 1");
  require(one_of(s.initial, {"steady_state", "ground"}), "simulation.initial must be steady_state or ground");
  require(one_of(s.scheme, {"kraus", "euler_maruyama"}), "simulation.scheme must be kraus or euler_maruyama");

  require(a.grid_lo < a.grid_hi, "analysis.grid: need lo < hi");
  require(a.grid_points >= 2, "analysis.grid.points must be at least 2");
  for (double t : a.checkpoints) {
    require(t >= 0.0 && t <= s.duration, "analysis.checkpoints must lie in [0, simulation.duration]");
  }
  require(a.dtau > 0.0, "analysis.dtau must be positive");
  require(a.lags >= 1, "analysis.lags must be at least 1");
  require(a.dtheta > 0.0, "analysis.dtheta must be positive");
  require(a.qrt_dtau > 0.0, "analysis.qrt_dtau must be positive");
  require(a.tau_max > 4.0 * a.qrt_dtau, "analysis.tau_max must exceed 4 qrt_dtau");
  require(a.omega_max > 0.0, "analysis.omega_max must be positive");
  require(a.omega_points >= 3, "analysis.omega_points must be at least 3");
  require(one_of(a.score_init, {"steady_state_derivative", "zero"}),
          "analysis.score_init must be steady_state_derivative or zero");
  require(a.sweep_phase_points >= 2, "analysis.sweep.phase_points must be at least 2");
  require(!a.sweep_omegas.empty(), "analysis.sweep.omegas must not be empty");

  require(!c.output.directory.empty(), "output.directory must not be empty");
  require(one_of(c.output.format, {"csv", "json"}), "output.format must be csv or json");
}

}  // namespace

ExperimentConfig from_json(const Json& json) {
  Json j = to_json(ExperimentConfig{});
  merge(j, json, "");
  ExperimentConfig c;
  auto& m = c.model;
  auto& s = c.simulation;
  auto& a = c.analysis;
  const Json& jm = j["model"];
  m.omega = jm["omega"].get<double>();
  m.detuning = jm["detuning"].get<double>();
  m.gamma = jm["gamma"].get<double>();
  m.phase = jm["phase"].get<double>();
  m.efficiency = jm["efficiency"].get<double>();
  m.parameter = jm["parameter"].get<std::string>();
  const Json& js = j["simulation"];
  s.duration = js["duration"].get<double>();
  s.dt = js["dt"].get<double>();
  s.n_traj = js["n_traj"].get<std::size_t>();
  s.base_seed = js["base_seed"].get<std::uint64_t>();
  s.initial = js["initial"].get<std::string>();
  s.scheme = js["scheme"].get<std::string>();
  s.keep_states = js["keep_states"].get<bool>();
  const Json& ja = j["analysis"];
  a.grid_lo = ja["grid"]["lo"].get<double>();
  a.grid_hi = ja["grid"]["hi"].get<double>();
  a.grid_points = ja["grid"]["points"].get<std::size_t>();
  a.checkpoints = ja["checkpoints"].get<std::vector<double>>();
  a.dtau = ja["dtau"].get<double>();
  a.lags = ja["lags"].get<std::size_t>();
  a.mean_subtract = ja["mean_subtract"].get<bool>();
  a.dtheta = ja["dtheta"].get<double>();
  a.qrt_dtau = ja["qrt_dtau"].get<double>();
  a.tau_max = ja["tau_max"].get<double>();
  a.omega_max = ja["omega_max"].get<double>();
  a.omega_points = ja["omega_points"].get<std::size_t>();
  a.shot_floor = ja["shot_floor"].get<bool>();
  a.score_init = ja["score_init"].get<std::string>();
  a.sweep_phase_points = ja["sweep"]["phase_points"].get<std::size_t>();
  a.sweep_omegas = ja["sweep"]["omegas"].get<std::vector<double>>();
  c.output.directory = j["output"]["directory"].get<std::string>();
  c.output.format = j["output"]["format"].get<std::string>();
  const auto workers = j["workers"].get<std::uint64_t>();
  require(workers <= 4096, "workers must be at most 4096");
  c.workers = static_cast<unsigned>(workers);
  validate(c);
  return c;
}

namespace {

Json parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + text + "'");
  const std::string key = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  // a.b.c=v becomes {"a":{"b":{"c":v}}}
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t dot; (dot = key.find('.', start)) != std::string::npos; start = dot + 1) {
    parts.push_back(key.substr(start, dot - start));
  }
  parts.push_back(key.substr(start));
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw ConfigError("--set: empty path component in '" + key + "'");
    Json wrapped;
    wrapped[*it] = std::move(value);
    value = std::move(wrapped);
  }
  return value;
}

}  // namespace

ExperimentConfig resolve_config(const std::filesystem::path& file, const std::vector<std::string>& overrides,
                                const std::string& out_dir) {
  Json j = to_json(ExperimentConfig{});
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    Json parsed = Json::parse(in, nullptr, false);
    if (parsed.is_discarded()) throw ConfigError("config file " + file.string() + " is not valid JSON");
    merge(j, parsed, "");
  }
  if (const char* env = std::getenv("HOMEST_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long w = std::strtoul(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string("HOMEST_WORKERS is not a number: ") + env);
    j["workers"] = static_cast<std::uint64_t>(w);
  }
  for (const auto& o : overrides) merge(j, parse_override(o), "");
  if (!out_dir.empty()) j["output"]["directory"] = out_dir;
  return from_json(j);
}

QubitConfig qubit_config(const ModelBlock& m) {
  QubitConfig q;
  q.omega = m.omega;
  q.detuning = m.detuning;
  q.gamma = m.gamma;
  q.phase = m.phase;
  q.efficiency = m.efficiency;
  q.parameter = m.parameter == "detuning" ? RabiParameter::kDetuning : RabiParameter::kOmega;
  return q;
}

std::vector<double> checkpoint_times(const ExperimentConfig& config) {
  if (!config.analysis.checkpoints.empty()) return config.analysis.checkpoints;
  return {config.simulation.duration};
}

}  // namespace homest::cli
