#pragma once

#include <nlohmann/json.hpp>

#include "puorl/envs/puck.hpp"

// JSON bindings for the environment types that appear in config and metadata
// files. Kept out of the core headers so only serialization code pays for the
// json include.
namespace puorl::envs {

NLOHMANN_JSON_SERIALIZE_ENUM(ActionMap, {
                                            {ActionMap::Identity, "identity"},
                                            {ActionMap::Rotate90, "rotate90"},
                                            {ActionMap::Negate, "negate"},
                                        })

inline void to_json(nlohmann::json& j, const DomainSpec& d) {
  j = nlohmann::json{{"family", "puck"},
                     {"mass", d.mass},
                     {"friction", d.friction},
                     {"action_noise_std", d.action_noise_std},
                     {"action_map", d.action_map},
                     {"dt", d.dt},
                     {"horizon", d.horizon},
                     {"goal", d.goal},
                     {"reward_offset", d.reward_offset}};
}

inline void from_json(const nlohmann::json& j, DomainSpec& d) {
  d = DomainSpec{};
  if (j.contains("mass")) j.at("mass").get_to(d.mass);
  if (j.contains("friction")) j.at("friction").get_to(d.friction);
  if (j.contains("action_noise_std"))
    j.at("action_noise_std").get_to(d.action_noise_std);
  if (j.contains("action_map")) j.at("action_map").get_to(d.action_map);
  if (j.contains("dt")) j.at("dt").get_to(d.dt);
  if (j.contains("horizon")) j.at("horizon").get_to(d.horizon);
  if (j.contains("goal")) j.at("goal").get_to(d.goal);
  if (j.contains("reward_offset")) j.at("reward_offset").get_to(d.reward_offset);
}

inline void to_json(nlohmann::json& j, const MixtureSpec& m) {
  j = nlohmann::json{{"negative_domains", m.negative_domains}, {"eta", m.eta}};
}

inline void from_json(const nlohmann::json& j, MixtureSpec& m) {
  j.at("negative_domains").get_to(m.negative_domains);
  j.at("eta").get_to(m.eta);
}

}  // namespace puorl::envs
