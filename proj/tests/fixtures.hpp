// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "refground/scene.hpp"

namespace refground::testing {

inline std::string data_path(const std::string& rel) { return std::string(REFGROUND_DATA_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scene load_fixture(const std::string& name) { return load_scene(read_text(data_path("scenes/" + name + ".json"))); }

inline constexpr double kW = 640.0;
inline constexpr double kH = 480.0;
inline constexpr double kFocal = 500.0;

/// Region centred at pixel (u, v) with its centroid on the plane z = 1 m.
inline Region region(std::string id, double u, double v, double w, double h, std::string color, std::string category,
                     SizeClass size = SizeClass::medium) {
  Region r;
  r.id = std::move(id);
  r.box = BoundingBox::centered({u, v}, w, h);
  r.attrs.category = std::move(category);
  r.attrs.color = std::move(color);
  r.attrs.size = size;
  r.centroid = Eigen::Vector3d((u - kW / 2) / kFocal, (v - kH / 2) / kFocal, 1.0);
  return r;
}

/// Robot at the origin; user 2 m away facing it.
inline std::map<std::string, Viewpoint> table_viewpoints() {
  const Intrinsics in{kFocal, kW, kH};
  std::map<std::string, Viewpoint> vps;
  vps["robot"] = Viewpoint{"robot", Eigen::Vector3d::Zero(), Eigen::Quaterniond::Identity(), in};
  vps["user"] = Viewpoint{"user", Eigen::Vector3d(0, 0, 2), Eigen::Quaterniond(0, 0, 1, 0), in};
  return vps;
}

inline Scene scene_of(std::vector<Region> regions) { return Scene(kW, kH, std::move(regions), table_viewpoints()); }

}  // namespace refground::testing
