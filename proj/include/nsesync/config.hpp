#pragma once

// INI configuration for experiments. Resolution order: preset, then config
// file, then individual overrides. Every key is validated; unknown sections or
// keys are errors. The schema is documented in README.md.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsesync/experiment.hpp"

namespace nsesync {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key" -> value map.
using ConfigValues = std::map<std::string, std::string>;

/// "desk", "paper-text", "paper-figure".
std::vector<std::string> preset_names();
ConfigValues preset_values(const std::string& name);

/// Parses an INI file into a flat map. A [manifest] section is skipped so a
/// manifest can be fed back as a config.
ConfigValues read_config_file(const std::filesystem::path& path);
/// Parses "section.key=value".
std::pair<std::string, std::string> parse_override(const std::string& assignment);

ExperimentConfig config_from_values(const ConfigValues& values);
/// Complete map describing cfg; config_from_values(config_to_values(c)) == c.
ConfigValues config_to_values(const ExperimentConfig& cfg);

struct ConfigSources {
  std::string preset = "desk";
  std::filesystem::path file;
  std::vector<std::string> overrides;
};
ExperimentConfig resolve_config(const ConfigSources& sources);

/// Resolved config as INI plus a [manifest] section with the forcing seeds
/// and library versions. Numbers use 17 significant digits.
std::string manifest_text(const ExperimentConfig& cfg);
void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg);

std::string version_string();

}  // namespace nsesync
