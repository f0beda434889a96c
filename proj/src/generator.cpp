// SPDX-License-Identifier: Apache-2.0
#include "refground/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "refground/error.hpp"
#include "refground/hash.hpp"

namespace refground {

using nlohmann::json;

namespace {

const std::vector<std::string> kTemplateWords = {"the", "to",     "left", "of", "right", "above",
                                                 "below", "next", "on",   "in", "middle", "at",
                                                 "top",  "bottom"};
const std::vector<std::string> kSizeWords = {"small", "medium", "large"};

std::string_view object_relation_key(ObjectRelation r) {
  switch (r) {
    case ObjectRelation::left_of: return "left_of";
    case ObjectRelation::right_of: return "right_of";
    case ObjectRelation::above: return "above";
    case ObjectRelation::below: return "below";
    case ObjectRelation::next_to: return "next_to";
  }
  return "";
}

std::string_view image_relation_key(ImageRelation r) {
  switch (r) {
    case ImageRelation::left: return "left";
    case ImageRelation::right: return "right";
    case ImageRelation::middle: return "middle";
    case ImageRelation::top: return "top";
    case ImageRelation::bottom: return "bottom";
  }
  return "";
}

constexpr ObjectRelation kObjectRelations[] = {ObjectRelation::left_of, ObjectRelation::right_of,
                                               ObjectRelation::above, ObjectRelation::below,
                                               ObjectRelation::next_to};
constexpr ImageRelation kImageRelations[] = {ImageRelation::left, ImageRelation::right, ImageRelation::middle,
                                             ImageRelation::top, ImageRelation::bottom};

}  // namespace

const std::vector<std::string>& builtin_colors() {
  static const std::vector<std::string> colors = {"red",   "blue",   "green",  "yellow", "white",
                                                  "black", "orange", "purple", "pink",   "brown"};
  return colors;
}

const std::vector<std::string>& builtin_categories() {
  static const std::vector<std::string> categories = {"cup",  "bottle", "ball",  "box",   "bowl",  "can",
                                                      "book", "apple",  "glass", "plate", "spoon", "bear",
                                                      "phone", "remote", "marker", "jar"};
  return categories;
}

const TemplateRules& TemplateRules::builtin() {
  static const TemplateRules rules = [] {
    TemplateRules r;
    r.object_phrases = {{ObjectRelation::left_of, {"to", "the", "left", "of"}},
                        {ObjectRelation::right_of, {"to", "the", "right", "of"}},
                        {ObjectRelation::above, {"above"}},
                        {ObjectRelation::below, {"below"}},
                        {ObjectRelation::next_to, {"next", "to"}}};
    r.image_phrases = {{ImageRelation::left, {"on", "the", "left"}},
                       {ImageRelation::right, {"on", "the", "right"}},
                       {ImageRelation::middle, {"in", "the", "middle"}},
                       {ImageRelation::top, {"at", "the", "top"}},
                       {ImageRelation::bottom, {"at", "the", "bottom"}}};
    return r;
  }();
  return rules;
}

TemplateRules TemplateRules::from_json(const json& j) {
  TemplateRules r = builtin();
  try {
    r.version = j.at("version").get<int>();
    if (j.contains("next_to_factor")) r.next_to_factor = j["next_to_factor"].get<double>();
    if (j.contains("dominance_ratio")) r.dominance_ratio = j["dominance_ratio"].get<double>();
    if (j.contains("object_phrases")) {
      for (ObjectRelation rel : kObjectRelations)
        r.object_phrases[rel] = j["object_phrases"].at(std::string(object_relation_key(rel))).get<std::vector<std::string>>();
    }
    if (j.contains("image_phrases")) {
      for (ImageRelation rel : kImageRelations)
        r.image_phrases[rel] = j["image_phrases"].at(std::string(image_relation_key(rel))).get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("template rules: ") + e.what());
  }
  if (!(r.next_to_factor > 0.0) || !(r.dominance_ratio >= 1.0)) throw ConfigError("template rules: bad thresholds");
  return r;
}

json TemplateRules::to_json() const {
  json j;
  j["version"] = version;
  j["next_to_factor"] = next_to_factor;
  j["dominance_ratio"] = dominance_ratio;
  for (const auto& [rel, words] : object_phrases) j["object_phrases"][std::string(object_relation_key(rel))] = words;
  for (const auto& [rel, words] : image_phrases) j["image_phrases"][std::string(image_relation_key(rel))] = words;
  return j;
}

const Templates& Templates::builtin() {
  static const Templates t = [] {
    std::vector<std::string> tokens = {std::string(Vocabulary::kEos), std::string(Vocabulary::kUnk)};
    tokens.insert(tokens.end(), kTemplateWords.begin(), kTemplateWords.end());
    tokens.insert(tokens.end(), kSizeWords.begin(), kSizeWords.end());
    tokens.insert(tokens.end(), builtin_colors().begin(), builtin_colors().end());
    tokens.insert(tokens.end(), builtin_categories().begin(), builtin_categories().end());
    return Templates{Vocabulary(std::move(tokens)), TemplateRules::builtin()};
  }();
  return t;
}

ObjectRelation classify_object_relation(const BoundingBox& referred, const BoundingBox& context,
                                        const TemplateRules& rules) {
  const Eigen::Vector2d d = referred.center() - context.center();
  const double ax = std::abs(d.x());
  const double ay = std::abs(d.y());
  const bool dominant = std::max(ax, ay) >= rules.dominance_ratio * std::min(ax, ay);
  if (!dominant && d.norm() < rules.next_to_factor * std::max(referred.w, referred.h)) return ObjectRelation::next_to;
  if (ax > ay) return d.x() < 0.0 ? ObjectRelation::left_of : ObjectRelation::right_of;
  return d.y() < 0.0 ? ObjectRelation::above : ObjectRelation::below;
}

ImageRelation classify_image_relation(const BoundingBox& referred, double width, double height) {
  const Eigen::Vector2d c = referred.center();
  if (c.x() < width / 3.0) return ImageRelation::left;
  if (c.x() > 2.0 * width / 3.0) return ImageRelation::right;
  if (c.y() < height / 3.0) return ImageRelation::top;
  if (c.y() > 2.0 * height / 3.0) return ImageRelation::bottom;
  return ImageRelation::middle;
}

std::vector<std::string> noun_phrase(const Scene& scene, const Region& region) {
  const bool sized = std::any_of(scene.regions().begin(), scene.regions().end(), [&](const Region& other) {
    return other.id != region.id && other.attrs.category == region.attrs.category &&
           other.attrs.size != region.attrs.size;
  });
  std::vector<std::string> words;
  if (sized) words.emplace_back(to_string(region.attrs.size));
  words.push_back(region.attrs.color);
  words.push_back(region.attrs.category);
  return words;
}

namespace {

const Region& require_member(const Scene& scene, const Region& region) {
  const Region* found = scene.find(region.id);
  if (!found) throw NotFound("region '" + region.id + "' is not in the scene");
  return *found;
}

}  // namespace

Expression region_template(const Scene& scene, const Region& region) {
  if (region.is_image()) throw Error("the whole-image region has no self-referential description");
  const Region& r = require_member(scene, region);
  Expression e{"the"};
  for (auto& w : noun_phrase(scene, r)) e.tokens.push_back(std::move(w));
  return e;
}

Expression relation_template(const Scene& scene, const Region& referred, const Region& context,
                             const Templates& templates) {
  if (referred.id == context.id) throw Error("referred and context regions must differ");
  if (referred.is_image()) throw Error("the whole-image region cannot be the referred object");
  const Region& r = require_member(scene, referred);
  const Region& c = require_member(scene, context);
  Expression e = region_template(scene, r);
  const auto& rules = templates.rules;
  if (c.is_image()) {
    const auto& phrase = rules.image_phrases.at(classify_image_relation(r.box, scene.width(), scene.height()));
    e.tokens.insert(e.tokens.end(), phrase.begin(), phrase.end());
  } else {
    const auto& phrase = rules.object_phrases.at(classify_object_relation(r.box, c.box, rules));
    e.tokens.insert(e.tokens.end(), phrase.begin(), phrase.end());
    e.tokens.emplace_back("the");
    for (auto& w : noun_phrase(scene, c)) e.tokens.push_back(std::move(w));
  }
  return e;
}

ExpressionDistribution sharpened_distribution(const Expression& sentence, const Vocabulary& vocab,
                                              double sharpness) {
  if (!(sharpness > 0.0) || sharpness > 1.0) throw ConfigError("sharpness must lie in (0, 1]");
  const auto steps = static_cast<Eigen::Index>(sentence.size() + 1);
  const auto v = static_cast<Eigen::Index>(vocab.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(steps, v, (1.0 - sharpness) / static_cast<double>(v - 1));
  for (Eigen::Index s = 0; s < steps; ++s) {
    std::size_t k = vocab.eos();
    if (s + 1 < steps) {
      const std::string& word = sentence[static_cast<std::size_t>(s)];
      if (!vocab.contains(word)) throw ConfigError("template word '" + word + "' missing from vocabulary");
      k = vocab.index(word);
    }
    p(s, static_cast<Eigen::Index>(k)) = sharpness;
  }
  return ExpressionDistribution(std::move(p));
}

namespace {

ExpressionDistribution generate(const Expression& sentence, std::string_view referred, std::string_view context,
                                const GeneratorConfig& cfg, const Vocabulary& vocab) {
  if (cfg.noise < 0.0 || cfg.noise > 1.0) throw ConfigError("noise must lie in [0, 1]");
  ExpressionDistribution clean = sharpened_distribution(sentence, vocab, cfg.sharpness);
  if (cfg.noise == 0.0) return clean;

  Eigen::MatrixXd p = clean.probs();
  std::vector<Eigen::Index> content;
  for (std::size_t k = 0; k < vocab.size(); ++k) {
    if (k != vocab.eos() && k != vocab.unk()) content.push_back(static_cast<Eigen::Index>(k));
  }
  std::mt19937_64 rng(hash_combine(hash_combine(fnv1a(referred), fnv1a(context)), cfg.noise_seed));
  for (Eigen::Index s = 0; s + 1 < p.rows(); ++s) {
    const double u = unit_uniform(rng);
    const auto k = static_cast<Eigen::Index>(vocab.index(sentence[static_cast<std::size_t>(s)]));
    std::size_t pick = uniform_index(rng, content.size() - 1);
    if (u >= cfg.noise) continue;
    // `content` without k: skip over k's slot.
    Eigen::Index j = content[pick];
    if (j >= k) j = content[pick + 1];
    std::swap(p(s, k), p(s, j));
  }
  return ExpressionDistribution(std::move(p));
}

}  // namespace

ExpressionDistribution describe_region(const Scene& scene, const Region& region, const GeneratorConfig& cfg,
                                       const Templates& templates) {
  return generate(region_template(scene, region), region.id, "", cfg, templates.vocab);
}

ExpressionDistribution describe_relation(const Scene& scene, const Region& referred, const Region& context,
                                         const GeneratorConfig& cfg, const Templates& templates) {
  return generate(relation_template(scene, referred, context, templates), referred.id, context.id, cfg,
                  templates.vocab);
}

std::optional<Description> unique_description(const Scene& scene, const Region& target,
                                              std::span<const std::string> pool, const Templates& templates) {
  std::vector<const Region*> members;
  for (const auto& id : pool) {
    if (id == kImageRegionId) continue;
    members.push_back(&scene.at(id));
  }
  if (std::none_of(members.begin(), members.end(), [&](const Region* r) { return r->id == target.id; }))
    members.push_back(&scene.at(target.id));

  const Expression self = region_template(scene, target);
  bool self_unique = true;
  std::vector<const Region*> lookalikes;
  for (const Region* r : members) {
    if (r->id == target.id) continue;
    if (region_template(scene, *r) == self) {
      self_unique = false;
      lookalikes.push_back(r);
    }
  }
  if (self_unique) return Description{self, std::nullopt};

  std::set<std::vector<std::string>> taken;
  for (const Region* r : members) {
    if (r->id == target.id) continue;
    taken.insert(relation_template(scene, *r, scene.image_region(), templates).tokens);
    for (const Region* c : members) {
      if (c != r) taken.insert(relation_template(scene, *r, *c, templates).tokens);
    }
  }

  std::vector<const Region*> contexts = {&scene.image_region()};
  std::sort(lookalikes.begin(), lookalikes.end(), [](const Region* a, const Region* b) { return a->id < b->id; });
  contexts.insert(contexts.end(), lookalikes.begin(), lookalikes.end());
  for (const Region* c : contexts) {
    Expression e = relation_template(scene, target, *c, templates);
    if (!taken.contains(e.tokens)) return Description{std::move(e), c->id};
  }
  return std::nullopt;
}

}  // namespace refground
