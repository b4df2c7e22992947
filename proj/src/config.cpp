#include "nsesync/config.hpp"

#include <fftw3.h>
#include <zlib.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/version.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nsesync {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"sim", {"resolution", "nu", "dt", "t_end"}},
      {"forcing", {"band_low", "band_high", "grashof", "seed", "norm"}},
      {"forcing2", {"band_low", "band_high", "grashof", "seed", "norm"}},
      {"intertwinement",
       {"variant", "cutoff", "theta1", "theta11", "theta12", "theta21", "theta22", "mu1", "mu2", "m11", "m12", "m21",
        "m22"}},
      {"experiment",
       {"init", "decorrelate_time", "checkpoint1", "checkpoint2", "base_checkpoint", "spinup_duration",
        "checkpoint_every", "record_every"}},
      {"constants", {"ladyzhenskaya", "agmon", "sobolev"}},
      {"thresholds", {"grashof", "split", "tilde_mu"}},
  };
  return s;
}

void check_key(const std::string& dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError("config key must be section.key: " + dotted);
  const auto section = schema().find(dotted.substr(0, dot));
  if (section == schema().end()) throw ConfigError("unknown config section: " + dotted.substr(0, dot));
  if (!section->second.count(dotted.substr(dot + 1))) throw ConfigError("unknown config key: " + dotted);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Values {
 public:
  explicit Values(const ConfigValues& v) : v_(v) {}

  bool has(const std::string& key) const { return v_.count(key) != 0; }
  bool has_section(const std::string& section) const {
    const auto it = v_.lower_bound(section + ".");
    return it != v_.end() && it->first.compare(0, section.size() + 1, section + ".") == 0;
  }
  const std::string* raw(const std::string& key) const {
    const auto it = v_.find(key);
    return it == v_.end() ? nullptr : &it->second;
  }
  double number(const std::string& key, double fallback) const {
    const std::string* s = raw(key);
    return s ? to_double(key, *s) : fallback;
  }
  template <class I>
  I integer(const std::string& key, I fallback) const {
    const std::string* s = raw(key);
    if (!s) return fallback;
    I out{};
    const auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), out);
    if (ec != std::errc() || p != s->data() + s->size()) throw ConfigError("expected an integer for " + key + ": " + *s);
    return out;
  }
  std::string text(const std::string& key, std::string fallback) const {
    const std::string* s = raw(key);
    return s ? *s : std::move(fallback);
  }

  static double to_double(const std::string& key, const std::string& s) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("expected a number for " + key + ": " + s);
    return out;
  }

 private:
  const ConfigValues& v_;
};

ForcingSpec read_forcing(const Values& v, const std::string& section, const ForcingSpec& base) {
  ForcingSpec f = base;
  f.band_low = v.integer<int>(section + ".band_low", f.band_low);
  f.band_high = v.integer<int>(section + ".band_high", f.band_high);
  f.grashof_target = v.number(section + ".grashof", f.grashof_target);
  f.phase_seed = v.integer<std::uint64_t>(section + ".seed", f.phase_seed);
  const std::string norm = v.text(section + ".norm", f.norm == GrashofNorm::L2 ? "l2" : "linf");
  if (norm == "l2") {
    f.norm = GrashofNorm::L2;
  } else if (norm == "linf") {
    f.norm = GrashofNorm::LInf;
  } else {
    throw ConfigError(section + ".norm must be l2 or linf: " + norm);
  }
  return f;
}

void write_forcing(ConfigValues& out, const std::string& section, const ForcingSpec& f) {
  out[section + ".band_low"] = std::to_string(f.band_low);
  out[section + ".band_high"] = std::to_string(f.band_high);
  out[section + ".grashof"] = fmt(f.grashof_target);
  out[section + ".seed"] = std::to_string(f.phase_seed);
  out[section + ".norm"] = f.norm == GrashofNorm::L2 ? "l2" : "linf";
}

CouplingVariant read_variant(const Values& v) {
  const std::string name = v.text("intertwinement.variant", "trivial");
  auto num = [&](const char* key, double fallback) { return v.number(std::string("intertwinement.") + key, fallback); };
  if (name == "trivial") return coupling::Trivial{};
  if (name == "mutual_sync") return coupling::MutualSync{num("theta1", 0.5)};
  if (name == "degenerate_sync") return coupling::DegenerateSync{};
  if (name == "general_sync") {
    return coupling::GeneralSync{num("theta11", 0.0), num("theta12", 0.0), num("theta21", 0.0), num("theta22", 0.0)};
  }
  if (name == "mutual_nudge") return coupling::MutualNudge{num("mu1", 50.0), num("mu2", 0.0)};
  if (name == "symmetric_nudge") return coupling::SymmetricNudge{num("mu1", 50.0), num("mu2", 0.0)};
  if (name == "general_nudge") {
    coupling::GeneralNudge g;
    g.matrix = {{{num("m11", 0.0), num("m12", 0.0)}, {num("m21", 0.0), num("m22", 0.0)}}};
    return g;
  }
  throw ConfigError("unknown coupling variant: " + name);
}

void write_variant(ConfigValues& out, const CouplingVariant& variant) {
  out["intertwinement.variant"] = variant_name(variant);
  auto put = [&](const char* key, double value) { out[std::string("intertwinement.") + key] = fmt(value); };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, coupling::MutualSync>) {
          put("theta1", c.theta1);
        } else if constexpr (std::is_same_v<T, coupling::GeneralSync>) {
          put("theta11", c.theta11);
          put("theta12", c.theta12);
          put("theta21", c.theta21);
          put("theta22", c.theta22);
        } else if constexpr (std::is_same_v<T, coupling::MutualNudge> || std::is_same_v<T, coupling::SymmetricNudge>) {
          put("mu1", c.mu1);
          put("mu2", c.mu2);
        } else if constexpr (std::is_same_v<T, coupling::GeneralNudge>) {
          put("m11", c.matrix[0][0]);
          put("m12", c.matrix[0][1]);
          put("m21", c.matrix[1][0]);
          put("m22", c.matrix[1][1]);
        }
      },
      variant);
}

const char* init_name(InitMode m) {
  switch (m) {
    case InitMode::ProjectedLow:
      return "projected_low";
    case InitMode::Decorrelated:
      return "decorrelated";
    case InitMode::FromCheckpoints:
      return "checkpoints";
  }
  return "";
}

}  // namespace

std::vector<std::string> preset_names() { return {"desk", "paper-text", "paper-figure"}; }

ConfigValues preset_values(const std::string& name) {
  ConfigValues v = {
      {"forcing.band_low", "10"},
      {"forcing.band_high", "12"},
      {"forcing.seed", "0"},
      {"forcing.norm", "l2"},
      {"intertwinement.variant", "mutual_sync"},
      {"intertwinement.theta1", "0.5"},
      {"experiment.init", "projected_low"},
      {"experiment.decorrelate_time", "100"},
      {"experiment.checkpoint_every", "100"},
  };
  if (name == "desk") {
    v["sim.resolution"] = "128";
    v["sim.nu"] = "0.005";
    v["sim.dt"] = "0.005";
    v["sim.t_end"] = "50";
    v["forcing.grashof"] = "10000";
    v["intertwinement.cutoff"] = "20";
    v["experiment.spinup_duration"] = "200";
    v["experiment.record_every"] = "20";
  } else if (name == "paper-text" || name == "paper-figure") {
    const bool text = name == "paper-text";
    v["sim.resolution"] = "512";
    v["sim.nu"] = text ? "0.0005" : "0.005";
    v["sim.dt"] = text ? "0.01" : "0.001";
    v["sim.t_end"] = "100";
    v["forcing.grashof"] = "100000";
    v["intertwinement.cutoff"] = "50";
    v["experiment.spinup_duration"] = "10000";
    v["experiment.record_every"] = text ? "10" : "100";
  } else {
    throw ConfigError("unknown preset: " + name + " (expected desk, paper-text or paper-figure)");
  }
  return v;
}

ConfigValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.message());
  }
  ConfigValues out;
  for (const auto& [section, keys] : tree) {
    if (section == "manifest") continue;
    if (keys.empty()) throw ConfigError("config entries must live in a section: " + section);
    for (const auto& [key, value] : keys) {
      const std::string dotted = section + "." + key;
      check_key(dotted);
      out[dotted] = value.get_value<std::string>();
    }
  }
  return out;
}

std::pair<std::string, std::string> parse_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like section.key=value: " + assignment);
  std::string key = assignment.substr(0, eq);
  check_key(key);
  return {key, assignment.substr(eq + 1)};
}

ExperimentConfig config_from_values(const ConfigValues& values) {
  for (const auto& [key, value] : values) check_key(key);
  const Values v(values);
  ExperimentConfig cfg;

  const int resolution = v.integer<int>("sim.resolution", cfg.sim.grid.resolution());
  try {
    cfg.sim.grid = SpectralGrid(resolution);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sim.resolution: ") + e.what());
  }
  cfg.sim.nu = v.number("sim.nu", cfg.sim.nu);
  cfg.sim.dt = v.number("sim.dt", cfg.sim.dt);
  cfg.sim.t_end = v.number("sim.t_end", cfg.sim.t_end);
  cfg.sim.forcing = read_forcing(v, "forcing", ForcingSpec{});
  cfg.sim.forcing.viscosity = cfg.sim.nu;
  if (v.has_section("forcing2")) {
    cfg.forcing2 = read_forcing(v, "forcing2", cfg.sim.forcing);
    cfg.forcing2->viscosity = cfg.sim.nu;
  }

  cfg.intertwinement.variant = read_variant(v);
  cfg.intertwinement.cutoff = v.number("intertwinement.cutoff", cfg.intertwinement.cutoff);

  const std::string init = v.text("experiment.init", "projected_low");
  if (init == "projected_low") {
    cfg.init.mode = InitMode::ProjectedLow;
  } else if (init == "decorrelated") {
    cfg.init.mode = InitMode::Decorrelated;
  } else if (init == "checkpoints") {
    cfg.init.mode = InitMode::FromCheckpoints;
  } else {
    throw ConfigError("experiment.init must be projected_low, decorrelated or checkpoints: " + init);
  }
  cfg.init.decorrelate_time = v.number("experiment.decorrelate_time", cfg.init.decorrelate_time);
  cfg.init.checkpoint1 = v.text("experiment.checkpoint1", "");
  cfg.init.checkpoint2 = v.text("experiment.checkpoint2", "");
  cfg.base_checkpoint = v.text("experiment.base_checkpoint", "");
  cfg.spinup_duration = v.number("experiment.spinup_duration", cfg.spinup_duration);
  cfg.checkpoint_every = v.number("experiment.checkpoint_every", cfg.checkpoint_every);
  cfg.record_every = v.integer<std::uint64_t>("experiment.record_every", cfg.record_every);

  auto& th = cfg.thresholds;
  th.constants.ladyzhenskaya = v.number("constants.ladyzhenskaya", 1.0);
  th.constants.agmon = v.number("constants.agmon", 1.0);
  th.constants.sobolev = v.number("constants.sobolev", 1.0);
  if (v.has("thresholds.grashof")) th.grashof = v.number("thresholds.grashof", 0.0);
  th.split = v.number("thresholds.split", th.split);
  th.tilde_mu = v.number("thresholds.tilde_mu", th.tilde_mu);

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

ConfigValues config_to_values(const ExperimentConfig& cfg) {
  ConfigValues out;
  out["sim.resolution"] = std::to_string(cfg.sim.grid.resolution());
  out["sim.nu"] = fmt(cfg.sim.nu);
  out["sim.dt"] = fmt(cfg.sim.dt);
  out["sim.t_end"] = fmt(cfg.sim.t_end);
  write_forcing(out, "forcing", cfg.sim.forcing);
  if (cfg.forcing2) write_forcing(out, "forcing2", *cfg.forcing2);
  write_variant(out, cfg.intertwinement.variant);
  out["intertwinement.cutoff"] = fmt(cfg.intertwinement.cutoff);
  out["experiment.init"] = init_name(cfg.init.mode);
  out["experiment.decorrelate_time"] = fmt(cfg.init.decorrelate_time);
  if (!cfg.init.checkpoint1.empty()) out["experiment.checkpoint1"] = cfg.init.checkpoint1.string();
  if (!cfg.init.checkpoint2.empty()) out["experiment.checkpoint2"] = cfg.init.checkpoint2.string();
  if (!cfg.base_checkpoint.empty()) out["experiment.base_checkpoint"] = cfg.base_checkpoint.string();
  out["experiment.spinup_duration"] = fmt(cfg.spinup_duration);
  out["experiment.checkpoint_every"] = fmt(cfg.checkpoint_every);
  out["experiment.record_every"] = std::to_string(cfg.record_every);
  out["constants.ladyzhenskaya"] = fmt(cfg.thresholds.constants.ladyzhenskaya);
  out["constants.agmon"] = fmt(cfg.thresholds.constants.agmon);
  out["constants.sobolev"] = fmt(cfg.thresholds.constants.sobolev);
  if (cfg.thresholds.grashof) out["thresholds.grashof"] = fmt(*cfg.thresholds.grashof);
  out["thresholds.split"] = fmt(cfg.thresholds.split);
  out["thresholds.tilde_mu"] = fmt(cfg.thresholds.tilde_mu);
  return out;
}

ExperimentConfig resolve_config(const ConfigSources& sources) {
  ConfigValues values = preset_values(sources.preset);
  if (!sources.file.empty()) {
    for (auto& [k, v] : read_config_file(sources.file)) values[k] = v;
  }
  for (const auto& o : sources.overrides) {
    auto [k, v] = parse_override(o);
    values[k] = v;
  }
  ExperimentConfig cfg = config_from_values(values);
  cfg.preset = sources.preset;
  return cfg;
}

std::string version_string() {
  std::ostringstream os;
  os << "nsesync 0.1.0; " << fftw_version << "; zlib " << zlibVersion() << "; boost " << BOOST_LIB_VERSION;
  return os.str();
}

std::string manifest_text(const ExperimentConfig& cfg) {
  const ConfigValues values = config_to_values(cfg);
  std::ostringstream os;
  std::string section;
  for (const auto& [dotted, value] : values) {
    const auto dot = dotted.find('.');
    const std::string s = dotted.substr(0, dot);
    if (s != section) {
      if (!section.empty()) os << '\n';
      os << '[' << s << "]\n";
      section = s;
    }
    os << dotted.substr(dot + 1) << " = " << value << '\n';
  }
  os << "\n[manifest]\n";
  os << "preset = " << (cfg.preset.empty() ? "none" : cfg.preset) << '\n';
  os << "seed1 = " << cfg.sim.forcing.phase_seed << '\n';
  os << "seed2 = " << cfg.forcing_second().phase_seed << '\n';
  os << "versions = " << version_string() << '\n';
  return os.str();
}

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest: " + path.string());
  out << manifest_text(cfg);
  if (!out) throw ConfigError("failed writing manifest: " + path.string());
}

}  // namespace nsesync
