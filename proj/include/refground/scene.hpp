// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <json.hpp>

namespace refground {

/// Reserved id of the region covering the whole image.
inline constexpr std::string_view kImageRegionId = "__image__";

/// Axis-aligned box in image units; (x, y) is the top-left corner, y grows downwards.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  Eigen::Vector2d center() const { return {x + 0.5 * w, y + 0.5 * h}; }
  bool contains(const Eigen::Vector2d& p, double tol = 0.0) const {
    return p.x() >= x - tol && p.x() <= right() + tol && p.y() >= y - tol &&
           p.y() <= bottom() + tol;
  }

  static BoundingBox centered(const Eigen::Vector2d& c, double w, double h) {
    return {c.x() - 0.5 * w, c.y() - 0.5 * h, w, h};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class SizeClass { small, medium, large };

std::string_view to_string(SizeClass s);
std::optional<SizeClass> parse_size_class(std::string_view s);

struct AttributeRecord {
  std::string category;
  std::string color;
  SizeClass size = SizeClass::medium;
  std::optional<std::string> texture;
  std::optional<std::string> label;

  friend bool operator==(const AttributeRecord&, const AttributeRecord&) = default;
};

struct Region {
  std::string id;
  BoundingBox box;
  AttributeRecord attrs;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();  // metres, scene frame

  bool is_image() const { return id == kImageRegionId; }
};

struct Intrinsics {
  double focal = 500.0;  // pixels
  double width = 640.0;
  double height = 480.0;
};

/// Pinhole camera. The camera frame has x right, y down and looks along +z;
/// `orientation` rotates camera-frame vectors into the scene frame.
struct Viewpoint {
  std::string name;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  Intrinsics intrinsics;

  Eigen::Vector3d to_camera(const Eigen::Vector3d& p) const {
    return orientation.conjugate() * (p - position);
  }
  /// Image-plane projection; empty when `p` is not in front of the camera.
  std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p) const;

  static Viewpoint look_at(std::string name, const Eigen::Vector3d& position,
                           const Eigen::Vector3d& target, const Eigen::Vector3d& down,
                           const Intrinsics& intrinsics);
};

/// An immutable set of object regions plus the viewpoints they can be seen from.
class Scene {
 public:
  /// Validates every invariant and throws `ParseError` on violation.
  Scene(double width, double height, std::vector<Region> regions,
        std::map<std::string, Viewpoint> viewpoints, std::string primary = "robot");

  double width() const { return width_; }
  double height() const { return height_; }
  const std::vector<Region>& regions() const { return regions_; }
  const Region& image_region() const { return image_region_; }
  const std::map<std::string, Viewpoint>& viewpoints() const { return viewpoints_; }
  const Viewpoint& primary_viewpoint() const { return viewpoints_.at(primary_); }
  const std::string& primary_name() const { return primary_; }

  /// Object regions and the image region resolve; anything else is null.
  const Region* find(std::string_view id) const;
  const Region& at(std::string_view id) const;
  const Viewpoint* viewpoint(std::string_view name) const;

  std::vector<std::string> region_ids() const;

  /// Same image and viewpoints, keeping only the listed regions (in scene order).
  Scene restricted_to(std::span<const std::string> ids) const;

 private:
  double width_;
  double height_;
  std::vector<Region> regions_;
  Region image_region_;
  std::map<std::string, Viewpoint> viewpoints_;
  std::string primary_;
};

/// Parses a scene file. Rejects duplicate ids, out-of-image boxes and
/// centroids that do not project into their box from the robot viewpoint.
Scene load_scene(std::string_view document);
Scene scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const Scene& scene);

/// Canonical scene file: sorted keys, numbers in 6-decimal fixed point.
std::string save_scene(const Scene& scene);

/// Pretty-prints any JSON value with sorted keys and every number as %.6f.
std::string canonical_json(const nlohmann::json& value);

}  // namespace refground
