// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "refground/scene.hpp"
#include "refground/vocabulary.hpp"

namespace refground {

enum class ObjectRelation { left_of, right_of, above, below, next_to };
enum class ImageRelation { left, right, middle, top, bottom };

/// Template rules for the geometric relation generator. Versioned so that
/// pinned test expectations fail loudly when the rule set changes.
struct TemplateRules {
  int version = 1;
  double next_to_factor = 1.2;   // "next to" needs centre distance < factor * max(w, h)
  double dominance_ratio = 2.0;  // ... and no axis dominating by this ratio
  std::map<ObjectRelation, std::vector<std::string>> object_phrases;
  std::map<ImageRelation, std::vector<std::string>> image_phrases;

  static const TemplateRules& builtin();
  static TemplateRules from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Vocabulary + rules: everything the generators need besides the scene.
struct Templates {
  Vocabulary vocab;
  TemplateRules rules;

  static const Templates& builtin();
};

/// Closed attribute pools of the synthetic generators.
const std::vector<std::string>& builtin_colors();
const std::vector<std::string>& builtin_categories();

struct GeneratorConfig {
  double sharpness = 1.0;  // probability mass on the template token, in (0, 1]
  /// Per-step probability of swapping the template token with a random content token.
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
};

ObjectRelation classify_object_relation(const BoundingBox& referred, const BoundingBox& context,
                                        const TemplateRules& rules = TemplateRules::builtin());
ImageRelation classify_image_relation(const BoundingBox& referred, double width, double height);

/// "[size] color category"; the size word appears only when the scene holds
/// another object of the same category with a different size class.
std::vector<std::string> noun_phrase(const Scene& scene, const Region& region);

/// Noise-free template sentences.
Expression region_template(const Scene& scene, const Region& region);
Expression relation_template(const Scene& scene, const Region& referred, const Region& context,
                             const Templates& templates = Templates::builtin());

ExpressionDistribution describe_region(const Scene& scene, const Region& region,
                                       const GeneratorConfig& cfg = {},
                                       const Templates& templates = Templates::builtin());
ExpressionDistribution describe_relation(const Scene& scene, const Region& referred,
                                         const Region& context, const GeneratorConfig& cfg = {},
                                         const Templates& templates = Templates::builtin());

/// Distribution with `sharpness` on each token of `sentence` + `<eos>` and the rest spread uniformly.
ExpressionDistribution sharpened_distribution(const Expression& sentence, const Vocabulary& vocab,
                                              double sharpness);

struct Description {
  Expression expression;
  std::optional<std::string> context_id;  // set for relational descriptions

  bool relational() const { return context_id.has_value(); }
};

/// A template sentence that denotes `target` and no other member of `pool`.
/// Tries the self-referential template, then relations to the whole image,
/// then relations to pool members sharing the target's self-referential
/// template. Every (referred, context) pair over `pool` and the image is
/// checked for collisions.
std::optional<Description> unique_description(const Scene& scene, const Region& target,
                                              std::span<const std::string> pool,
                                              const Templates& templates = Templates::builtin());

}  // namespace refground
