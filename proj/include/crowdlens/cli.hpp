#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdlens/analysis.hpp"

namespace crowdlens {

/// Runs `crowdlens <subcommand> ...`; `args` excludes the program name.
/// Returns 0, 2 (unreadable or ill-formed input) or 3 (anything else).
/// Diagnostics go to `err`; data goes to files only.
int run_cli(const std::vector<std::string>& args, std::ostream& err);

/// Overrides applied on top of a config file, which is applied on top of defaults.
struct ConfigOverrides {
  std::optional<std::filesystem::path> config_file;
  std::optional<double> gamma;
  std::optional<double> beta;
  std::optional<double> w1;
  std::optional<double> w2;
  std::optional<std::filesystem::path> registry;
};

/// Throws ConfigParse for unreadable, ill-formed or out-of-range settings.
AnalysisConfig resolve_config(const ConfigOverrides& overrides);

/// Config documents use the layout of AnalysisConfig::ledger(); every key is optional
/// and "registry" may be a list of items or a path to a registry file.
AnalysisConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Per-frame features of every pedestrian, one column per feature.
nlohmann::ordered_json features_document(const SceneAnalysis& analysis);

}  // namespace crowdlens
