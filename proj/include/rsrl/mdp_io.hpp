#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rsrl/mdp.hpp"

namespace rsrl {

// {"num_states": int, "num_actions": int, "discount": float, "risk": float,
//  "rewards": [[float]], "transitions": [[[float]]]}
nlohmann::json mdp_to_json(const TabularMdp& mdp);

/// Throws ConfigurationError on schema problems. Does not validate the
/// probabilities; run validate_mdp for that.
TabularMdp mdp_from_json(const nlohmann::json& j);

TabularMdp load_mdp(const std::filesystem::path& path);
void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);

/// SHA-1 over "blob <len>\0<canonical json>", hex encoded (same scheme git
/// uses for file contents).
std::string mdp_content_hash(const TabularMdp& mdp);

}  // namespace rsrl
