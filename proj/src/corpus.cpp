// SPDX-License-Identifier: Apache-2.0
#include "refground/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "refground/error.hpp"
#include "refground/hash.hpp"

namespace refground {

using nlohmann::json;

void CorpusConfig::validate() const {
  if (min_objects < 1 || max_objects < min_objects) throw ConfigError("corpus: need 1 <= min_objects <= max_objects");
  if (grid_cols < 1 || grid_rows < 1) throw ConfigError("corpus: grid must be at least 1x1");
  if (max_objects > grid_cols * grid_rows)
    throw ConfigError("corpus: " + std::to_string(max_objects) + " objects cannot be placed without overlap in " +
                      std::to_string(grid_cols * grid_rows) + " cells");
  if (!(image_width > 0.0) || !(image_height > 0.0) || !(focal > 0.0) || !(table_depth > 0.0))
    throw ConfigError("corpus: image size, focal length and depth must be positive");
  if (min_identical < 2 || max_identical < min_identical) throw ConfigError("corpus: need 2 <= min_identical <= max_identical");
  if (max_identical > min_objects) throw ConfigError("corpus: identical group larger than the smallest scene");
  if (duplicate_probability < 0.0 || duplicate_probability > 1.0) throw ConfigError("corpus: duplicate_probability outside [0, 1]");
  if (relational_fraction < 0.0 || relational_fraction > 1.0) throw ConfigError("corpus: relational_fraction outside [0, 1]");
  if (colors.empty() || categories.size() < 2) throw ConfigError("corpus: attribute pools too small");
  if (ambiguous && distinct_colors && static_cast<int>(colors.size()) < max_identical)
    throw ConfigError("corpus: not enough colours for distinct-colour groups");
  if (static_cast<std::size_t>(max_objects) > colors.size() * categories.size())
    throw ConfigError("corpus: attribute pools cannot give every object a distinct description");
  if (max_attempts < 1) throw ConfigError("corpus: max_attempts must be positive");
}

CorpusConfig CorpusConfig::from_json(const json& j) {
  CorpusConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("min_objects", c.min_objects);
    get("max_objects", c.max_objects);
    get("image_width", c.image_width);
    get("image_height", c.image_height);
    get("focal", c.focal);
    get("table_depth", c.table_depth);
    get("grid_cols", c.grid_cols);
    get("grid_rows", c.grid_rows);
    get("duplicate_probability", c.duplicate_probability);
    get("min_identical", c.min_identical);
    get("max_identical", c.max_identical);
    get("relational_fraction", c.relational_fraction);
    get("ambiguous", c.ambiguous);
    get("distinct_colors", c.distinct_colors);
    get("colors", c.colors);
    get("categories", c.categories);
    get("max_attempts", c.max_attempts);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("corpus config: ") + e.what());
  }
  c.validate();
  return c;
}

json CorpusConfig::to_json() const {
  return {{"min_objects", min_objects},
          {"max_objects", max_objects},
          {"image_width", image_width},
          {"image_height", image_height},
          {"focal", focal},
          {"table_depth", table_depth},
          {"grid_cols", grid_cols},
          {"grid_rows", grid_rows},
          {"duplicate_probability", duplicate_probability},
          {"min_identical", min_identical},
          {"max_identical", max_identical},
          {"relational_fraction", relational_fraction},
          {"ambiguous", ambiguous},
          {"distinct_colors", distinct_colors},
          {"colors", colors},
          {"categories", categories},
          {"max_attempts", max_attempts}};
}

namespace {

using Rng = std::mt19937_64;

template <class T>
const T& pick(const std::vector<T>& pool, Rng& rng) {
  return pool[uniform_index(rng, pool.size())];
}

SizeClass random_size(Rng& rng) { return static_cast<SizeClass>(uniform_index(rng, 3)); }

double size_fraction(SizeClass s) {
  switch (s) {
    case SizeClass::small: return 0.45;
    case SizeClass::medium: return 0.62;
    case SizeClass::large: return 0.8;
  }
  return 0.62;
}

struct Draft {
  std::vector<AttributeRecord> attrs;
  std::vector<std::size_t> group;  // indices into attrs
};

Draft draft_attributes(const CorpusConfig& cfg, int n, Rng& rng) {
  Draft d;
  std::set<std::pair<std::string, std::string>> used;  // (category, colour)
  const bool with_group = cfg.ambiguous || unit_uniform(rng) < cfg.duplicate_probability;
  std::string group_category;
  if (with_group) {
    const int k = cfg.min_identical + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(cfg.max_identical - cfg.min_identical + 1)));
    AttributeRecord base;
    base.category = pick(cfg.categories, rng);
    base.color = pick(cfg.colors, rng);
    base.size = random_size(rng);
    group_category = base.category;
    std::vector<std::string> palette = cfg.colors;
    stable_shuffle(palette, rng);
    for (int i = 0; i < k; ++i) {
      AttributeRecord a = base;
      if (cfg.ambiguous && cfg.distinct_colors) a.color = palette[static_cast<std::size_t>(i)];
      used.emplace(a.category, a.color);
      d.group.push_back(d.attrs.size());
      d.attrs.push_back(a);
    }
  }
  for (int tries = 0; static_cast<int>(d.attrs.size()) < n; ++tries) {
    if (tries > 100000) throw ConfigError("corpus: attribute pools cannot fill the scene with distinct objects");
    AttributeRecord a;
    a.category = pick(cfg.categories, rng);
    a.color = pick(cfg.colors, rng);
    a.size = random_size(rng);
    // Ambiguous scenes keep the group's category to the group alone.
    if (cfg.ambiguous && a.category == group_category) continue;
    if (!used.emplace(a.category, a.color).second) continue;
    d.attrs.push_back(a);
  }
  return d;
}

}  // namespace

std::pair<Scene, GroundTruth> generate_scene(const CorpusConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(hash_combine(fnv1a("refground.scene"), seed));

  const double W = cfg.image_width;
  const double H = cfg.image_height;
  const double D = cfg.table_depth;
  const Intrinsics intrinsics{cfg.focal, W, H};
  std::map<std::string, Viewpoint> viewpoints;
  viewpoints["robot"] = Viewpoint{"robot", Eigen::Vector3d::Zero(), Eigen::Quaterniond::Identity(), intrinsics};
  // Across the table, facing the robot: half-turn about the vertical axis.
  viewpoints["user"] = Viewpoint{"user", Eigen::Vector3d(0.0, 0.0, 2.0 * D),
                                 Eigen::Quaterniond(Eigen::AngleAxisd(EIGEN_PI, Eigen::Vector3d::UnitY())), intrinsics};
  viewpoints["user"].orientation.normalize();

  const double cell_w = W / cfg.grid_cols;
  const double cell_h = H / cfg.grid_rows;

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    const int n = cfg.min_objects + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(cfg.max_objects - cfg.min_objects + 1)));
    Draft draft = draft_attributes(cfg, n, rng);

    std::vector<std::size_t> order(draft.attrs.size());  // attribute index -> slot
    std::iota(order.begin(), order.end(), std::size_t{0});
    stable_shuffle(order, rng);
    std::vector<int> cells(static_cast<std::size_t>(cfg.grid_cols * cfg.grid_rows));
    std::iota(cells.begin(), cells.end(), 0);
    stable_shuffle(cells, rng);

    std::vector<Region> regions(draft.attrs.size());
    std::vector<std::string> id_of(draft.attrs.size());
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
      const std::size_t a = order[slot];
      const int cell = cells[slot];
      const double cx0 = (cell % cfg.grid_cols) * cell_w;
      const double cy0 = (cell / cfg.grid_cols) * cell_h;
      const double frac = size_fraction(draft.attrs[a].size);
      const double bw = frac * cell_w * (0.9 + 0.1 * unit_uniform(rng));
      const double bh = frac * cell_h * (0.9 + 0.1 * unit_uniform(rng));
      const double u = cx0 + 0.5 * bw + (cell_w - bw) * unit_uniform(rng);
      const double v = cy0 + 0.5 * bh + (cell_h - bh) * unit_uniform(rng);
      char id[32];
      std::snprintf(id, sizeof id, "obj%02zu", slot + 1);
      Region& r = regions[slot];
      r.id = id;
      r.attrs = draft.attrs[a];
      r.box = BoundingBox::centered({u, v}, bw, bh);
      r.centroid = Eigen::Vector3d((u - 0.5 * W) * D / cfg.focal, (v - 0.5 * H) * D / cfg.focal, D);
      id_of[a] = r.id;
    }
    Scene scene(W, H, std::move(regions), viewpoints);

    GroundTruth truth;
    if (cfg.ambiguous) {
      for (std::size_t g : draft.group) truth.group.push_back(id_of[g]);
      std::sort(truth.group.begin(), truth.group.end());
      const Region& target = scene.at(truth.group[uniform_index(rng, truth.group.size())]);
      truth.target_id = target.id;
      truth.utterance = Expression{"the", target.attrs.category};
      auto desc = unique_description(scene.restricted_to(truth.group), target, truth.group);
      truth.requires_relation = !desc || desc->relational();
      return {std::move(scene), std::move(truth)};
    }

    const bool want_relation = unit_uniform(rng) < cfg.relational_fraction;
    std::vector<std::string> ids = scene.region_ids();
    std::vector<std::string> shuffled = ids;
    stable_shuffle(shuffled, rng);
    std::optional<std::pair<std::string, Description>> chosen;
    std::optional<std::pair<std::string, Description>> fallback;
    for (const auto& id : shuffled) {
      auto desc = unique_description(scene, scene.at(id), ids);
      if (!desc) continue;
      if (desc->relational() == want_relation) {
        chosen.emplace(id, std::move(*desc));
        break;
      }
      if (!fallback) fallback.emplace(id, std::move(*desc));
    }
    const bool strict = cfg.relational_fraction == 0.0 || cfg.relational_fraction == 1.0;
    if (!chosen && !strict) chosen = std::move(fallback);
    if (!chosen) continue;

    truth.target_id = chosen->first;
    truth.requires_relation = chosen->second.relational();
    truth.utterance = chosen->second.expression;
    truth.context_id = chosen->second.context_id;
    return {std::move(scene), std::move(truth)};
  }
  throw ConfigError("corpus: no describable target found after " + std::to_string(cfg.max_attempts) + " attempts");
}

}  // namespace refground
