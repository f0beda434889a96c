// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "refground/generator.hpp"
#include "refground/scene.hpp"

namespace refground {

/// Parameters of the seeded synthetic scene generator.
///
/// Objects sit in distinct cells of a `grid_cols` x `grid_rows` layout, so
/// boxes never overlap; centroids lie on a plane `table_depth` metres in front
/// of the robot camera. A user viewpoint faces the robot from across the table.
struct CorpusConfig {
  int min_objects = 6;
  int max_objects = 10;
  double image_width = 640.0;
  double image_height = 480.0;
  double focal = 500.0;
  double table_depth = 1.0;
  int grid_cols = 6;
  int grid_rows = 4;

  /// Chance that a scene holds a group of identical objects (same category, colour, size).
  double duplicate_probability = 0.6;
  int min_identical = 2;
  int max_identical = 3;

  /// Chance that the target is picked among objects that need a relation to be singled out.
  double relational_fraction = 0.5;

  /// Ambiguous mode: the utterance names only the category of a group of
  /// `min_identical..max_identical` same-category objects.
  bool ambiguous = false;
  /// In ambiguous mode, give group members distinct colours.
  bool distinct_colors = false;

  std::vector<std::string> colors = builtin_colors();
  std::vector<std::string> categories = builtin_categories();

  int max_attempts = 64;

  void validate() const;
  static CorpusConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct GroundTruth {
  std::string target_id;
  bool requires_relation = false;
  Expression utterance;                   // noise-free
  std::optional<std::string> context_id;  // context of the relational description
  std::vector<std::string> group;         // ambiguous mode: same-category objects
};

/// Pure function of (config, seed). Throws `ConfigError` when the config cannot be satisfied.
std::pair<Scene, GroundTruth> generate_scene(const CorpusConfig& config, std::uint64_t seed);

}  // namespace refground
