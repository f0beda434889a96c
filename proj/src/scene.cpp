// SPDX-License-Identifier: Apache-2.0
#include "refground/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "refground/error.hpp"
#include "refground/hash.hpp"

namespace refground {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::small: return "small";
    case SizeClass::medium: return "medium";
    case SizeClass::large: return "large";
  }
  return "medium";
}

std::optional<SizeClass> parse_size_class(std::string_view s) {
  if (s == "small") return SizeClass::small;
  if (s == "medium") return SizeClass::medium;
  if (s == "large") return SizeClass::large;
  return std::nullopt;
}

std::optional<Eigen::Vector2d> Viewpoint::project(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d c = to_camera(p);
  if (c.z() <= 1e-9) return std::nullopt;
  return Eigen::Vector2d(intrinsics.focal * c.x() / c.z() + 0.5 * intrinsics.width,
                         intrinsics.focal * c.y() / c.z() + 0.5 * intrinsics.height);
}

Viewpoint Viewpoint::look_at(std::string name, const Eigen::Vector3d& position,
                             const Eigen::Vector3d& target, const Eigen::Vector3d& down,
                             const Intrinsics& intrinsics) {
  const Eigen::Vector3d z = (target - position).normalized();
  const Eigen::Vector3d y = (down - down.dot(z) * z).normalized();
  const Eigen::Vector3d x = y.cross(z);
  Eigen::Matrix3d rot;
  rot.col(0) = x;
  rot.col(1) = y;
  rot.col(2) = z;
  Viewpoint v;
  v.name = std::move(name);
  v.position = position;
  v.orientation = Eigen::Quaterniond(rot).normalized();
  v.intrinsics = intrinsics;
  return v;
}

namespace {

constexpr double kBoundsTol = 1e-6;

void check_box(const BoundingBox& b, double width, double height, const std::string& field) {
  if (!(b.w > 0.0) || !(b.h > 0.0)) throw ParseError(field, "box width and height must be positive");
  if (b.x < -kBoundsTol || b.y < -kBoundsTol || b.right() > width + kBoundsTol ||
      b.bottom() > height + kBoundsTol) {
    throw ParseError(field, "box lies outside the image bounds");
  }
}

}  // namespace

Scene::Scene(double width, double height, std::vector<Region> regions,
             std::map<std::string, Viewpoint> viewpoints, std::string primary)
    : width_(width),
      height_(height),
      regions_(std::move(regions)),
      viewpoints_(std::move(viewpoints)),
      primary_(std::move(primary)) {
  if (!(width_ > 0.0) || !(height_ > 0.0)) throw ParseError("image", "image size must be positive");
  if (!viewpoints_.contains("robot")) throw ParseError("viewpoints.robot", "robot viewpoint is required");
  if (!viewpoints_.contains(primary_)) throw ParseError("viewpoints", "unknown primary viewpoint " + primary_);
  for (auto& [name, vp] : viewpoints_) {
    if (std::abs(vp.orientation.norm() - 1.0) > 1e-9)
      throw ParseError("viewpoints." + name + ".orientation", "orientation must be a unit quaternion");
    if (!(vp.intrinsics.focal > 0.0) || !(vp.intrinsics.width > 0.0) || !(vp.intrinsics.height > 0.0))
      throw ParseError("viewpoints." + name, "intrinsics must be positive");
    vp.name = name;
  }
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const Region& r = regions_[i];
    const std::string field = "regions[" + std::to_string(i) + "]";
    if (r.id.empty()) throw ParseError(field + ".id", "region id must be non-empty");
    if (r.id == kImageRegionId) throw ParseError(field + ".id", "id is reserved for the image region");
    if (!seen.insert(r.id).second) throw ParseError(field + ".id", "duplicate region id '" + r.id + "'");
    check_box(r.box, width_, height_, field + ".box");
  }
  image_region_.id = std::string(kImageRegionId);
  image_region_.box = {0.0, 0.0, width_, height_};
  image_region_.attrs.category = "image";
}

const Region* Scene::find(std::string_view id) const {
  if (id == kImageRegionId) return &image_region_;
  auto it = std::find_if(regions_.begin(), regions_.end(), [&](const Region& r) { return r.id == id; });
  return it == regions_.end() ? nullptr : &*it;
}

const Region& Scene::at(std::string_view id) const {
  if (const Region* r = find(id)) return *r;
  throw NotFound("region '" + std::string(id) + "' is not in the scene");
}

const Viewpoint* Scene::viewpoint(std::string_view name) const {
  auto it = viewpoints_.find(std::string(name));
  return it == viewpoints_.end() ? nullptr : &it->second;
}

std::vector<std::string> Scene::region_ids() const {
  std::vector<std::string> ids;
  ids.reserve(regions_.size());
  for (const auto& r : regions_) ids.push_back(r.id);
  return ids;
}

Scene Scene::restricted_to(std::span<const std::string> ids) const {
  for (const auto& id : ids) {
    if (!find(id)) throw NotFound("unknown region '" + id + "'");
  }
  std::vector<Region> kept;
  for (const auto& r : regions_) {
    if (std::find(ids.begin(), ids.end(), r.id) != ids.end()) kept.push_back(r);
  }
  return Scene(width_, height_, std::move(kept), viewpoints_, primary_);
}

// ---------------------------------------------------------------------------
// Scene file format

namespace {

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field, "expected a number");
  return j.get<double>();
}

const json& member(const json& obj, const char* key, const std::string& field) {
  if (!obj.is_object()) throw ParseError(field, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(field.empty() ? key : field + "." + key, "missing field");
  return *it;
}

std::string string_at(const json& j, const std::string& field) {
  if (!j.is_string()) throw ParseError(field, "expected a string");
  return j.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector_at(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != N)
    throw ParseError(field, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = number_at(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

Viewpoint viewpoint_from_json(const std::string& name, const json& j) {
  const std::string field = "viewpoints." + name;
  if (name != "robot" && name != "user") throw ParseError(field, "viewpoint name must be robot or user");
  Viewpoint vp;
  vp.name = name;
  vp.position = vector_at<3>(member(j, "position", field), field + ".position");
  const Eigen::Vector4d q = vector_at<4>(member(j, "orientation", field), field + ".orientation");
  // Files carry 6 decimals; accept anything that rounds to a unit quaternion.
  if (std::abs(q.norm() - 1.0) > 1e-4) throw ParseError(field + ".orientation", "orientation must be a unit quaternion");
  vp.orientation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).normalized();
  vp.intrinsics.focal = number_at(member(j, "focal", field), field + ".focal");
  vp.intrinsics.width = number_at(member(j, "width", field), field + ".width");
  vp.intrinsics.height = number_at(member(j, "height", field), field + ".height");
  return vp;
}

Region region_from_json(const json& j, const std::string& field) {
  Region r;
  r.id = string_at(member(j, "id", field), field + ".id");
  const Eigen::Vector4d b = vector_at<4>(member(j, "box", field), field + ".box");
  r.box = {b[0], b[1], b[2], b[3]};
  const json& a = member(j, "attrs", field);
  const std::string af = field + ".attrs";
  r.attrs.category = string_at(member(a, "category", af), af + ".category");
  r.attrs.color = string_at(member(a, "color", af), af + ".color");
  const std::string size = string_at(member(a, "size", af), af + ".size");
  auto sc = parse_size_class(size);
  if (!sc) throw ParseError(af + ".size", "size must be small, medium or large");
  r.attrs.size = *sc;
  if (a.contains("texture")) r.attrs.texture = string_at(a["texture"], af + ".texture");
  if (a.contains("label")) r.attrs.label = string_at(a["label"], af + ".label");
  r.centroid = vector_at<3>(member(j, "centroid", field), field + ".centroid");
  return r;
}

}  // namespace

Scene scene_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "scene document must be a JSON object");
  const json& image = member(doc, "image", "");
  const double w = number_at(member(image, "w", "image"), "image.w");
  const double h = number_at(member(image, "h", "image"), "image.h");

  std::map<std::string, Viewpoint> viewpoints;
  const json& vps = member(doc, "viewpoints", "");
  if (!vps.is_object()) throw ParseError("viewpoints", "expected an object");
  for (auto it = vps.begin(); it != vps.end(); ++it) viewpoints.emplace(it.key(), viewpoint_from_json(it.key(), it.value()));

  const json& regs = member(doc, "regions", "");
  if (!regs.is_array()) throw ParseError("regions", "expected an array");
  std::vector<Region> regions;
  for (std::size_t i = 0; i < regs.size(); ++i) regions.push_back(region_from_json(regs[i], "regions[" + std::to_string(i) + "]"));

  Scene scene(w, h, std::move(regions), std::move(viewpoints));

  const Viewpoint& robot = scene.primary_viewpoint();
  const double tol = 1e-3 * std::max(w, h);
  for (std::size_t i = 0; i < scene.regions().size(); ++i) {
    const Region& r = scene.regions()[i];
    auto p = robot.project(r.centroid);
    if (!p || !r.box.contains(*p, tol))
      throw ParseError("regions[" + std::to_string(i) + "].centroid",
                       "centroid does not project inside the box from the robot viewpoint");
  }
  return scene;
}

Scene load_scene(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  return scene_from_json(doc);
}

json scene_to_json(const Scene& scene) {
  json doc;
  doc["image"] = {{"w", scene.width()}, {"h", scene.height()}};
  json vps = json::object();
  for (const auto& [name, vp] : scene.viewpoints()) {
    const auto& q = vp.orientation;
    vps[name] = {{"position", {vp.position.x(), vp.position.y(), vp.position.z()}},
                 {"orientation", {q.w(), q.x(), q.y(), q.z()}},
                 {"focal", vp.intrinsics.focal},
                 {"width", vp.intrinsics.width},
                 {"height", vp.intrinsics.height}};
  }
  doc["viewpoints"] = vps;
  json regs = json::array();
  for (const auto& r : scene.regions()) {
    json attrs = {{"category", r.attrs.category}, {"color", r.attrs.color}, {"size", to_string(r.attrs.size)}};
    if (r.attrs.texture) attrs["texture"] = *r.attrs.texture;
    if (r.attrs.label) attrs["label"] = *r.attrs.label;
    regs.push_back({{"id", r.id},
                    {"box", {r.box.x, r.box.y, r.box.w, r.box.h}},
                    {"attrs", attrs},
                    {"centroid", {r.centroid.x(), r.centroid.y(), r.centroid.z()}}});
  }
  doc["regions"] = regs;
  return doc;
}

std::string save_scene(const Scene& scene) { return canonical_json(scene_to_json(scene)); }

namespace {

void write_canonical(std::ostream& os, const json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (v.type()) {
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
    case json::value_t::number_float: {
      double d = v.get<double>();
      if (std::abs(d) < 5e-7) d = 0.0;  // no "-0.000000"
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", d);
      os << buf;
      return;
    }
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // std::map order = sorted keys
        if (!first) os << ",\n";
        first = false;
        os << inner << json(it.key()).dump() << ": ";
        write_canonical(os, it.value(), depth + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) os << ", ";
          write_canonical(os, v[i], depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_canonical(os, v[i], depth + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

std::string canonical_json(const json& value) {
  std::ostringstream os;
  write_canonical(os, value, 0);
  os << "\n";
  return os.str();
}

}  // namespace refground
