// SPDX-License-Identifier: Apache-2.0
#include "refground/config.hpp"

#include <fstream>
#include <sstream>

#include "refground/error.hpp"

namespace refground {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Matcher parse_matcher(const std::string& name) {
  if (name == "exact") return Matcher::exact;
  if (name == "synonym") return Matcher::synonym;
  throw ConfigError("unknown meteor matcher '" + name + "'");
}

// Template words missing from the vocabulary would silently decode as <unk>.
void check_coverage(const Templates& t) {
  auto check = [&](const std::string& w) {
    if (!t.vocab.contains(w)) throw ConfigError("template word '" + w + "' is not in the vocabulary");
  };
  check("the");
  for (const auto& [rel, words] : t.rules.object_phrases)
    for (const auto& w : words) check(w);
  for (const auto& [rel, words] : t.rules.image_phrases)
    for (const auto& w : words) check(w);
}

}  // namespace

EngineOptions engine_options_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("engine config must be a JSON object");
  EngineOptions o;
  try {
    if (j.contains("vocabulary")) o.templates.vocab = Vocabulary::load_file(resolve(base_dir, j["vocabulary"].get<std::string>()).string());
    if (j.contains("templates")) {
      const json& t = j["templates"];
      o.templates.rules = TemplateRules::from_json(t.is_string() ? read_json_file(resolve(base_dir, t.get<std::string>())) : t);
    }
    if (j.contains("synonyms")) o.meteor.synonyms = SynonymLexicon::load_file(resolve(base_dir, j["synonyms"].get<std::string>()).string());
    if (j.contains("generator")) {
      const json& g = j["generator"];
      o.generator.sharpness = g.value("sharpness", o.generator.sharpness);
      o.generator.noise = g.value("noise", o.generator.noise);
      o.generator.noise_seed = g.value("noise_seed", o.generator.noise_seed);
    }
    if (j.contains("meteor")) {
      const json& m = j["meteor"];
      o.meteor.alpha = m.value("alpha", o.meteor.alpha);
      o.meteor.beta = m.value("beta", o.meteor.beta);
      o.meteor.gamma = m.value("gamma", o.meteor.gamma);
      if (m.contains("matchers")) {
        o.meteor.matchers.clear();
        for (const auto& name : m["matchers"]) o.meteor.matchers.push_back(parse_matcher(name.get<std::string>()));
      }
    }
    if (j.contains("kmeans")) {
      const json& k = j["kmeans"];
      o.kmeans.restarts = k.value("restarts", o.kmeans.restarts);
      o.kmeans.seed = k.value("seed", o.kmeans.seed);
      o.kmeans.max_iterations = k.value("max_iterations", o.kmeans.max_iterations);
    }
    if (j.contains("perspective")) o.perspective = PerspectiveConfig::from_json(j["perspective"]);
    o.informativeness_threshold = j.value("informativeness_threshold", o.informativeness_threshold);
    o.nms_threshold = j.value("nms_threshold", o.nms_threshold);
    o.proposal_threshold = j.value("proposal_threshold", o.proposal_threshold);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("engine config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("engine config: ") + e.what());
  }
  check_coverage(o.templates);
  o.validate();
  return o;
}

EngineOptions load_engine_options(const fs::path& path) {
  return engine_options_from_json(read_json_file(path), path.parent_path());
}

json engine_options_to_json(const EngineOptions& o) {
  json vocab = json::array();
  for (std::size_t i = 0; i < o.templates.vocab.size(); ++i) vocab.push_back(o.templates.vocab.token(i));
  json synonyms = json::array();
  for (const auto& [a, b] : o.meteor.synonyms.pairs()) synonyms.push_back({a, b});
  json matchers = json::array();
  for (Matcher m : o.meteor.matchers) matchers.push_back(m == Matcher::exact ? "exact" : "synonym");
  return {{"vocabulary", vocab},
          {"templates", o.templates.rules.to_json()},
          {"synonyms", synonyms},
          {"generator", {{"sharpness", o.generator.sharpness}, {"noise", o.generator.noise}, {"noise_seed", o.generator.noise_seed}}},
          {"meteor", {{"alpha", o.meteor.alpha}, {"beta", o.meteor.beta}, {"gamma", o.meteor.gamma}, {"matchers", matchers}}},
          {"kmeans", {{"restarts", o.kmeans.restarts}, {"seed", o.kmeans.seed}, {"max_iterations", o.kmeans.max_iterations}}},
          {"perspective", o.perspective.to_json()},
          {"informativeness_threshold", o.informativeness_threshold},
          {"nms_threshold", o.nms_threshold},
          {"proposal_threshold", o.proposal_threshold}};
}

}  // namespace refground
