// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "refground/scene.hpp"
#include "refground/vocabulary.hpp"

namespace refground {

struct PerspectiveConfig {
  bool enabled = true;
  /// Possessive keyword -> viewpoint name.
  std::map<std::string, std::string> keywords = {{"my", "user"},    {"mine", "user"}, {"me", "user"},
                                                 {"your", "robot"}, {"yours", "robot"}, {"you", "robot"}};

  void validate() const;
  static PerspectiveConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// First keyword in token order wins; empty means object-centric.
std::optional<std::string> detect_perspective(const Expression& expr, const PerspectiveConfig& cfg = {});

/// Re-expresses `region` as seen from `target`: the box is re-centred on the
/// projection of the 3D centroid, both sides are scaled by d_primary / d_target
/// (distances from centroid to viewpoint), then the box is shifted (and, if
/// larger than the image, uniformly shrunk) to lie inside the target image.
Region transform_region(const Region& region, const Scene& scene, const Viewpoint& target);

/// Scale factor applied by `transform_region` (before any clamping).
double perspective_scale(const Region& region, const Scene& scene, const Viewpoint& target);

/// Every region transformed into the named viewpoint, which becomes the new
/// primary viewpoint and defines the image size.
Scene transform_scene(const Scene& scene, const std::string& viewpoint_name);

}  // namespace refground
