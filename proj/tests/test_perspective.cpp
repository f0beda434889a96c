// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "fixtures.hpp"
#include "refground/corpus.hpp"
#include "refground/error.hpp"
#include "refground/perspective.hpp"

using namespace refground;
using namespace refground::testing;

TEST_CASE("perspective keywords") {
  CHECK(detect_perspective({"the", "bottle", "on", "my", "left"}) == std::optional<std::string>("user"));
  CHECK(detect_perspective({"the", "bottle", "on", "your", "right"}) == std::optional<std::string>("robot"));
  CHECK_FALSE(detect_perspective({"the", "bottle", "next", "to", "the", "bear"}).has_value());
  // First keyword in token order wins.
  CHECK(detect_perspective({"your", "cup", "on", "my", "left"}) == std::optional<std::string>("robot"));
}

TEST_CASE("perspective config validation") {
  CHECK_THROWS_AS(PerspectiveConfig::from_json({{"mode", "sometimes"}}), ConfigError);
  CHECK_THROWS_AS(PerspectiveConfig::from_json({{"keywords", {{"My", "user"}}}}), ConfigError);
  const auto cfg = PerspectiveConfig::from_json({{"mode", "off"}, {"keywords", {{"our", "user"}}}});
  CHECK_FALSE(cfg.enabled);
  CHECK(detect_perspective({"our", "cup"}, cfg) == std::optional<std::string>("user"));
  CHECK(PerspectiveConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
}

TEST_CASE("transforming into the primary viewpoint is the identity") {
  const Scene s = load_fixture("three_cups");
  for (const auto& r : s.regions()) {
    const Region t = transform_region(r, s, s.primary_viewpoint());
    CHECK((t.box.center() - r.box.center()).norm() < 1e-6);
    CHECK(perspective_scale(r, s, s.primary_viewpoint()) == doctest::Approx(1.0));
  }
}

TEST_CASE("opposing viewpoint reverses horizontal order") {
  const Scene s = load_fixture("red_cup_blue_ball");
  const Scene user = transform_scene(s, "user");
  CHECK(s.at("cup").box.center().x() < s.at("ball").box.center().x());
  CHECK(user.at("cup").box.center().x() > user.at("ball").box.center().x());
  CHECK(user.primary_name() == "user");
}

TEST_CASE("twice the distance halves the box and keeps its aspect") {
  // Centroid on the optical axis at z = 2/3: 2/3 m from the robot, 4/3 m from the user.
  Region r = region("cup", 320, 240, 60, 90, "red", "cup");
  r.centroid = Eigen::Vector3d(0, 0, 2.0 / 3.0);
  const Scene s = scene_of({r});
  const Region t = transform_region(s.at("cup"), s, *s.viewpoint("user"));
  CHECK(t.box.w == doctest::Approx(30.0));
  CHECK(t.box.h == doctest::Approx(45.0));
  CHECK(std::abs(t.box.w / t.box.h - r.box.w / r.box.h) < 1e-9);
  CHECK((t.box.center() - Eigen::Vector2d(320, 240)).norm() < 1e-9);
}

TEST_CASE("oversized boxes are shrunk uniformly and clamped into the image") {
  Region r = region("table", 320, 240, 600, 300, "white", "box");
  r.centroid = Eigen::Vector3d(0, 0, 1.6);  // 0.4 m from the user: scale 4
  const Scene s = scene_of({r});
  const Region t = transform_region(s.at("table"), s, *s.viewpoint("user"));
  CHECK(t.box.x >= 0.0);
  CHECK(t.box.right() <= kW + 1e-9);
  CHECK(t.box.bottom() <= kH + 1e-9);
  CHECK(std::abs(t.box.w / t.box.h - 2.0) < 1e-9);
}

TEST_CASE("behind the camera and unknown viewpoints are errors") {
  Region r = region("cup", 320, 240, 60, 60, "red", "cup");
  r.centroid = Eigen::Vector3d(0, 0, 3.0);  // behind the user
  const Scene s = scene_of({r});
  CHECK_THROWS_AS(transform_region(s.at("cup"), s, *s.viewpoint("user")), Error);
  CHECK_THROWS_AS(transform_scene(s, "bystander"), NotFound);
}

TEST_CASE("properties over generated scenes") {
  CorpusConfig cfg;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scene s = generate_scene(cfg, seed).first;
    const Scene u = transform_scene(s, "user");
    for (const auto& r : s.regions()) {
      const Region& t = u.at(r.id);
      CHECK(std::abs(t.box.w / t.box.h - r.box.w / r.box.h) < 1e-9);
      CHECK((transform_region(r, s, s.primary_viewpoint()).box.center() - r.box.center()).norm() < 1e-6);
    }
    for (const auto& a : s.regions()) {
      for (const auto& b : s.regions()) {
        if (a.box.center().x() < b.box.center().x())
          CHECK(u.at(a.id).box.center().x() > u.at(b.id).box.center().x());
      }
    }
  }
}
