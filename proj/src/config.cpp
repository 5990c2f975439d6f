#include "haps/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "haps/errors.hpp"

namespace haps {

using nlohmann::json;

namespace {

const char* aoa_mode_name(AoaMode m) {
  return m == AoaMode::Azimuth ? "azimuth" : "off_nadir";
}

AoaMode parse_aoa_mode(const std::string& s) {
  if (s == "azimuth") return AoaMode::Azimuth;
  if (s == "off_nadir") return AoaMode::OffNadir;
  throw ConfigError("radio.aoa_mode must be \"azimuth\" or \"off_nadir\"");
}

const char* advantage_name(AdvantageMode m) {
  return m == AdvantageMode::Gae ? "gae" : "one_step";
}

const char* entropy_name(EntropyMode m) {
  return m == EntropyMode::Squashed ? "squashed" : "gaussian";
}

EntropyMode parse_entropy(const std::string& s) {
  if (s == "squashed") return EntropyMode::Squashed;
  if (s == "gaussian") return EntropyMode::Gaussian;
  throw ConfigError("ppo.entropy must be \"squashed\" or \"gaussian\"");
}

AdvantageMode parse_advantage(const std::string& s) {
  if (s == "gae") return AdvantageMode::Gae;
  if (s == "one_step") return AdvantageMode::OneStep;
  throw ConfigError("ppo.advantage must be \"gae\" or \"one_step\"");
}

json to_json(const RunConfig& c) {
  const auto& w = c.env.wind;
  const auto& a = c.env.area;
  const auto& r = c.env.radio;
  const auto& x = r.extra_atten_db;
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["wind"] = {{"mean_speed", w.mean_speed},
               {"mean_direction", w.mean_direction},
               {"residual_std", w.residual_std},
               {"temporal_rho", w.temporal_rho},
               {"slow_amplitude", w.slow_amplitude},
               {"slow_period", w.slow_period},
               {"dt", w.dt},
               {"shared_field", w.shared_field},
               {"spatial_scale_m", w.spatial_scale_m}};
  j["area"] = {{"half_extent", a.half_extent},
               {"haps_altitude", a.haps_altitude},
               {"ue_altitude", a.ue_altitude},
               {"hotspot_radius", a.hotspot_radius},
               {"ues_per_hotspot", a.ues_per_hotspot},
               {"hotspot_speed", a.hotspot_speed},
               {"num_haps", a.num_haps}};
  j["radio"] = {{"carrier_hz", r.carrier_hz},
                {"total_bw_hz", r.total_bw_hz},
                {"num_rb", r.num_rb},
                {"tx_power_dbm", r.tx_power_dbm},
                {"noise_dbm_per_mhz", r.noise_dbm_per_mhz},
                {"rician_k_db", r.rician_k_db},
                {"shadowing_std_db", r.shadowing_std_db},
                {"boresight_gain_dbi", r.boresight_gain_dbi},
                {"aperture_radius_m", r.aperture_radius_m},
                {"aoa_mode", aoa_mode_name(r.aoa_mode)},
                {"extra_atten_db",
                 {{"gaseous", x.gaseous},
                  {"rain", x.rain},
                  {"cloud", x.cloud},
                  {"scintillation", x.scintillation},
                  {"clutter", x.clutter}}}};
  j["reward"] = {{"c_s", c.env.reward.c_s}, {"c_m", c.env.reward.c_m}};
  j["episode"] = {{"frames_per_episode", c.env.episode.frames_per_episode},
                  {"dt", c.env.episode.dt}};
  j["observation"] = {{"memory", c.env.observation.memory},
                      {"sinr_min_db", c.env.observation.sinr_min_db},
                      {"sinr_max_db", c.env.observation.sinr_max_db}};
  j["action"] = {{"r_max", c.env.r_max}};
  j["net"] = {{"hidden_layers", c.net.hidden_layers},
              {"hidden_width", c.net.hidden_width},
              {"activation", nn::activation_name(c.net.activation)},
              {"hidden_gain", c.net.hidden_gain},
              {"policy_output_gain", c.net.policy_output_gain},
              {"value_output_gain", c.net.value_output_gain},
              {"log_std_init", c.net.log_std_init}};
  j["ppo"] = {{"lr", c.ppo.lr},
              {"gamma_df", c.ppo.gamma_df},
              {"gae_lambda", c.ppo.gae_lambda},
              {"clip_eps", c.ppo.clip_eps},
              {"entropy_coef", c.ppo.entropy_coef},
              {"value_coef", c.ppo.value_coef},
              {"max_grad_norm", c.ppo.max_grad_norm},
              {"epochs", c.ppo.epochs},
              {"minibatch_size", c.ppo.minibatch_size},
              {"rollout_frames", c.ppo.rollout_frames},
              {"normalize_advantages", c.ppo.normalize_advantages},
              {"advantage", advantage_name(c.ppo.advantage)},
              {"entropy", entropy_name(c.ppo.entropy)}};
  j["run"] = {{"master_seed", c.master_seed},
              {"episodes", c.episodes},
              {"eval_every", c.eval_every},
              {"eval_scenarios", c.eval_scenarios},
              {"eval_episodes", c.eval_episodes},
              {"output_dir", c.output_dir}};
  return j;
}

// Reads `key` from `section` into `out` when present.
template <class T>
void read(const json& section, const char* key, T& out, const std::string& where) {
  auto it = section.find(key);
  if (it == section.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

void reject_unknown(const json& given, const json& known, const std::string& where) {
  if (!given.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    if (!known.contains(it.key()))
      throw ConfigError("unknown config key " +
                        (where.empty() ? it.key() : where + "." + it.key()));
    if (known[it.key()].is_object())
      reject_unknown(it.value(), known[it.key()],
                     where.empty() ? it.key() : where + "." + it.key());
  }
}

void collect_keys(const json& j, const std::string& prefix, std::string& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    out += path;
    out += '\n';
    if (it->is_object()) collect_keys(*it, path, out);
  }
}

}  // namespace

void RunConfig::validate() const {
  try {
    env.validate();
    net.validate();
    ppo.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (episodes < 0) throw ConfigError("run.episodes must be >= 0");
  if (eval_every < 1) throw ConfigError("run.eval_every must be >= 1");
  if (eval_episodes < 1) throw ConfigError("run.eval_episodes must be >= 1");
  for (int s : eval_scenarios)
    if (s < 1 || s > 4) throw ConfigError("run.eval_scenarios entries must be 1..4");
  if (!eval_scenarios.empty() && env.area.num_haps != 3)
    throw ConfigError("preset scenarios need area.num_haps = 3");
}

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  const json known = to_json(c);
  reject_unknown(j, known, "");
  int version = kConfigSchemaVersion;
  read(j, "schema_version", version, "");
  if (version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version));

  auto section = [&](const char* name) -> const json& {
    static const json empty = json::object();
    auto it = j.find(name);
    return it == j.end() ? empty : *it;
  };
  {
    const json& s = section("wind");
    auto& w = c.env.wind;
    read(s, "mean_speed", w.mean_speed, "wind");
    read(s, "mean_direction", w.mean_direction, "wind");
    read(s, "residual_std", w.residual_std, "wind");
    read(s, "temporal_rho", w.temporal_rho, "wind");
    read(s, "slow_amplitude", w.slow_amplitude, "wind");
    read(s, "slow_period", w.slow_period, "wind");
    read(s, "dt", w.dt, "wind");
    read(s, "shared_field", w.shared_field, "wind");
    read(s, "spatial_scale_m", w.spatial_scale_m, "wind");
  }
  {
    const json& s = section("area");
    auto& a = c.env.area;
    read(s, "half_extent", a.half_extent, "area");
    read(s, "haps_altitude", a.haps_altitude, "area");
    read(s, "ue_altitude", a.ue_altitude, "area");
    read(s, "hotspot_radius", a.hotspot_radius, "area");
    read(s, "ues_per_hotspot", a.ues_per_hotspot, "area");
    read(s, "hotspot_speed", a.hotspot_speed, "area");
    read(s, "num_haps", a.num_haps, "area");
  }
  {
    const json& s = section("radio");
    auto& r = c.env.radio;
    read(s, "carrier_hz", r.carrier_hz, "radio");
    read(s, "total_bw_hz", r.total_bw_hz, "radio");
    read(s, "num_rb", r.num_rb, "radio");
    read(s, "tx_power_dbm", r.tx_power_dbm, "radio");
    read(s, "noise_dbm_per_mhz", r.noise_dbm_per_mhz, "radio");
    read(s, "rician_k_db", r.rician_k_db, "radio");
    read(s, "shadowing_std_db", r.shadowing_std_db, "radio");
    read(s, "boresight_gain_dbi", r.boresight_gain_dbi, "radio");
    read(s, "aperture_radius_m", r.aperture_radius_m, "radio");
    std::string mode = aoa_mode_name(r.aoa_mode);
    read(s, "aoa_mode", mode, "radio");
    r.aoa_mode = parse_aoa_mode(mode);
    if (s.contains("extra_atten_db")) {
      const json& x = s["extra_atten_db"];
      auto& e = r.extra_atten_db;
      read(x, "gaseous", e.gaseous, "radio.extra_atten_db");
      read(x, "rain", e.rain, "radio.extra_atten_db");
      read(x, "cloud", e.cloud, "radio.extra_atten_db");
      read(x, "scintillation", e.scintillation, "radio.extra_atten_db");
      read(x, "clutter", e.clutter, "radio.extra_atten_db");
    }
  }
  read(section("reward"), "c_s", c.env.reward.c_s, "reward");
  read(section("reward"), "c_m", c.env.reward.c_m, "reward");
  read(section("episode"), "frames_per_episode", c.env.episode.frames_per_episode, "episode");
  read(section("episode"), "dt", c.env.episode.dt, "episode");
  read(section("observation"), "memory", c.env.observation.memory, "observation");
  read(section("observation"), "sinr_min_db", c.env.observation.sinr_min_db, "observation");
  read(section("observation"), "sinr_max_db", c.env.observation.sinr_max_db, "observation");
  read(section("action"), "r_max", c.env.r_max, "action");
  {
    const json& s = section("net");
    read(s, "hidden_layers", c.net.hidden_layers, "net");
    read(s, "hidden_width", c.net.hidden_width, "net");
    std::string act = nn::activation_name(c.net.activation);
    read(s, "activation", act, "net");
    try {
      c.net.activation = nn::parse_activation(act);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("net.activation: ") + e.what());
    }
    read(s, "hidden_gain", c.net.hidden_gain, "net");
    read(s, "policy_output_gain", c.net.policy_output_gain, "net");
    read(s, "value_output_gain", c.net.value_output_gain, "net");
    read(s, "log_std_init", c.net.log_std_init, "net");
  }
  {
    const json& s = section("ppo");
    auto& p = c.ppo;
    read(s, "lr", p.lr, "ppo");
    read(s, "gamma_df", p.gamma_df, "ppo");
    read(s, "gae_lambda", p.gae_lambda, "ppo");
    read(s, "clip_eps", p.clip_eps, "ppo");
    read(s, "entropy_coef", p.entropy_coef, "ppo");
    read(s, "value_coef", p.value_coef, "ppo");
    read(s, "max_grad_norm", p.max_grad_norm, "ppo");
    read(s, "epochs", p.epochs, "ppo");
    read(s, "minibatch_size", p.minibatch_size, "ppo");
    read(s, "rollout_frames", p.rollout_frames, "ppo");
    read(s, "normalize_advantages", p.normalize_advantages, "ppo");
    std::string adv = advantage_name(p.advantage);
    read(s, "advantage", adv, "ppo");
    p.advantage = parse_advantage(adv);
    std::string ent = entropy_name(p.entropy);
    read(s, "entropy", ent, "ppo");
    p.entropy = parse_entropy(ent);
  }
  {
    const json& s = section("run");
    read(s, "master_seed", c.master_seed, "run");
    read(s, "episodes", c.episodes, "run");
    read(s, "eval_every", c.eval_every, "run");
    read(s, "eval_scenarios", c.eval_scenarios, "run");
    read(s, "eval_episodes", c.eval_episodes, "run");
    read(s, "output_dir", c.output_dir, "run");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string schema_hash() {
  std::string keys = "schema " + std::to_string(kConfigSchemaVersion) + "\n";
  collect_keys(to_json(RunConfig{}), "", keys);
  return to_hex(fnv1a64(keys));
}

std::string policy_fingerprint(const RunConfig& cfg) {
  const json j = to_json(cfg);
  json p;
  p["area"] = j["area"];
  p["observation"] = j["observation"];
  p["action"] = j["action"];
  p["net"] = {{"hidden_layers", j["net"]["hidden_layers"]},
              {"hidden_width", j["net"]["hidden_width"]},
              {"activation", j["net"]["activation"]}};
  return to_hex(fnv1a64(p.dump()));
}

}  // namespace haps
