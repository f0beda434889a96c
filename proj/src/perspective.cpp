// SPDX-License-Identifier: Apache-2.0
#include "refground/perspective.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "refground/error.hpp"

namespace refground {

void PerspectiveConfig::validate() const {
  for (const auto& [word, view] : keywords) {
    if (word.empty() || std::any_of(word.begin(), word.end(), [](unsigned char c) { return std::isupper(c); }))
      throw ConfigError("perspective keyword '" + word + "' must be non-empty lowercase");
    if (view.empty()) throw ConfigError("perspective keyword '" + word + "' maps to an empty viewpoint");
  }
}

PerspectiveConfig PerspectiveConfig::from_json(const nlohmann::json& j) {
  PerspectiveConfig cfg;
  try {
    if (j.contains("mode")) {
      const auto mode = j["mode"].get<std::string>();
      if (mode != "auto" && mode != "off") throw ConfigError("perspective mode must be auto or off");
      cfg.enabled = mode == "auto";
    }
    if (j.contains("keywords")) cfg.keywords = j["keywords"].get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("perspective config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json PerspectiveConfig::to_json() const {
  return {{"mode", enabled ? "auto" : "off"}, {"keywords", keywords}};
}

std::optional<std::string> detect_perspective(const Expression& expr, const PerspectiveConfig& cfg) {
  for (const auto& token : expr.tokens) {
    if (auto it = cfg.keywords.find(token); it != cfg.keywords.end()) return it->second;
  }
  return std::nullopt;
}

double perspective_scale(const Region& region, const Scene& scene, const Viewpoint& target) {
  const double d_ref = (region.centroid - scene.primary_viewpoint().position).norm();
  const double d_target = (region.centroid - target.position).norm();
  if (!(d_target > 0.0)) throw Error("region centroid coincides with the target viewpoint");
  return d_ref / d_target;
}

Region transform_region(const Region& region, const Scene& scene, const Viewpoint& target) {
  const auto center = target.project(region.centroid);
  if (!center) throw Error("centroid of '" + region.id + "' is behind the image plane of viewpoint '" + target.name + "'");
  const double scale = perspective_scale(region, scene, target);
  double w = region.box.w * scale;
  double h = region.box.h * scale;
  const double width = target.intrinsics.width;
  const double height = target.intrinsics.height;
  const double shrink = std::min({1.0, width / w, height / h});
  w *= shrink;
  h *= shrink;
  BoundingBox box = BoundingBox::centered(*center, w, h);
  box.x = std::clamp(box.x, 0.0, width - w);
  box.y = std::clamp(box.y, 0.0, height - h);
  Region out = region;
  out.box = box;
  return out;
}

Scene transform_scene(const Scene& scene, const std::string& viewpoint_name) {
  const Viewpoint* target = scene.viewpoint(viewpoint_name);
  if (!target) throw NotFound("unknown viewpoint '" + viewpoint_name + "'");
  std::vector<Region> regions;
  regions.reserve(scene.regions().size());
  for (const auto& r : scene.regions()) regions.push_back(transform_region(r, scene, *target));
  return Scene(target->intrinsics.width, target->intrinsics.height, std::move(regions), scene.viewpoints(),
               viewpoint_name);
}

}  // namespace refground
