// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "refground/config.hpp"
#include "refground/error.hpp"

using namespace refground;
using nlohmann::json;

TEST_CASE("the shipped engine config equals the builtin defaults") {
  const EngineOptions o = load_engine_options(testing::data_path("engine.json"));
  CHECK(engine_options_to_json(o) == engine_options_to_json(EngineOptions{}));
  CHECK(o.kmeans.seed == KMeansOptions{}.seed);
}

TEST_CASE("shipped template rules equal the builtin rules") {
  const json j = read_json_file(testing::data_path("templates.json"));
  CHECK(TemplateRules::from_json(j).to_json() == TemplateRules::builtin().to_json());
}

TEST_CASE("inline engine options") {
  const json j = {{"generator", {{"sharpness", 0.8}}},
                  {"meteor", {{"matchers", {"exact"}}}},
                  {"perspective", {{"mode", "off"}}},
                  {"informativeness_threshold", 0.3}};
  const EngineOptions o = engine_options_from_json(j);
  CHECK(o.generator.sharpness == 0.8);
  CHECK(o.meteor.matchers == std::vector<Matcher>{Matcher::exact});
  CHECK_FALSE(o.perspective.enabled);
  CHECK(o.informativeness_threshold == 0.3);
}

TEST_CASE("engine config errors") {
  CHECK_THROWS_AS(engine_options_from_json(json::array()), ConfigError);
  CHECK_THROWS_AS(engine_options_from_json({{"generator", {{"sharpness", 1.5}}}}), ConfigError);
  CHECK_THROWS_AS(engine_options_from_json({{"generator", {{"sharpness", "sharp"}}}}), ConfigError);
  CHECK_THROWS_AS(engine_options_from_json({{"meteor", {{"matchers", {"stem"}}}}}), ConfigError);
  CHECK_THROWS_AS(engine_options_from_json({{"vocabulary", "missing.txt"}}, "/nonexistent"), ConfigError);
  CHECK_THROWS_AS(load_engine_options("/nonexistent/engine.json"), ConfigError);

  // A template word outside the vocabulary.
  json rules = TemplateRules::builtin().to_json();
  rules["image_phrases"]["left"] = {"on", "the", "port", "side"};
  CHECK_THROWS_AS(engine_options_from_json({{"templates", rules}}), ConfigError);
}

TEST_CASE("relative paths resolve against the config file") {
  const auto dir = std::filesystem::temp_directory_path() / "refground_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "vocab.txt") << testing::read_text(testing::data_path("vocabulary.txt"));
  }
  std::ofstream(dir / "engine.json") << R"({"vocabulary": "vocab.txt"})";
  const EngineOptions o = load_engine_options(dir / "engine.json");
  CHECK(o.templates.vocab.tokens() == Templates::builtin().vocab.tokens());
  std::filesystem::remove_all(dir);
}
