// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include <json.hpp>

#include "refground/pipeline.hpp"

namespace refground {

/// Engine options from a JSON document. Optional keys:
///   vocabulary, synonyms  - paths to token / synonym-pair files
///   templates             - path to a template rules file, or the rules inline
///   generator             - {sharpness, noise, noise_seed}
///   meteor                - {alpha, beta, gamma, matchers: ["exact", "synonym"]}
///   kmeans                - {restarts, seed, max_iterations}
///   perspective           - {mode: "auto" | "off", keywords: {word: viewpoint}}
///   informativeness_threshold, nms_threshold, proposal_threshold
/// Relative paths resolve against `base_dir`. Throws `ConfigError`.
EngineOptions engine_options_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
EngineOptions load_engine_options(const std::filesystem::path& path);

/// Fully expanded form (vocabulary and synonyms inline); input to config fingerprints.
nlohmann::json engine_options_to_json(const EngineOptions& opts);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace refground
