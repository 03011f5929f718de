#pragma once

#include <string>

#include <json.hpp>

#include "psr/levy_model.hpp"

namespace psr {

// {"family": "bm"|"cl", "mu", "sigma", "c", "eta", "jump_rate"}; unknown keys
// are rejected with DomainError.
ProcessSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ProcessSpec& spec);

ProcessSpec load_spec(const std::string& path);

}  // namespace psr
