#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "lvsim/sim.hpp"

namespace lvsim {

/// Overlays the keys present in `j` on `base`. Unknown keys are an error so
/// that typos do not silently fall back to defaults.
RunConfig apply_config_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});
nlohmann::json config_to_json(const RunConfig& c);

}  // namespace lvsim
