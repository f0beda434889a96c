// SPDX-License-Identifier: Apache-2.0
#include "refground/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "refground/error.hpp"

namespace refground {

using nlohmann::json;

void EngineOptions::validate() const {
  if (!(generator.sharpness > 0.0) || generator.sharpness > 1.0) throw ConfigError("sharpness must lie in (0, 1]");
  if (generator.noise < 0.0 || generator.noise > 1.0) throw ConfigError("noise must lie in [0, 1]");
  meteor.validate();
  perspective.validate();
  if (kmeans.restarts < 0 || kmeans.max_iterations < 1) throw ConfigError("bad k-means options");
  if (informativeness_threshold < 0.0 || informativeness_threshold > 1.0)
    throw ConfigError("informativeness threshold must lie in [0, 1]");
}

std::string_view to_string(OutcomeKind k) { return k == OutcomeKind::unique ? "unique" : "ambiguous"; }
std::string_view to_string(Stage s) { return s == Stage::self_referential ? "self-referential" : "relational"; }

std::vector<std::string> GroundingOutcome::candidate_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : candidates) ids.push_back(c.region_id);
  return ids;
}

std::size_t GroundingOutcome::relevant_count() const {
  return static_cast<std::size_t>(std::count(self_relevant.begin(), self_relevant.end(), true));
}

namespace {

ScorePair score(const Expression& expr, const ExpressionDistribution& dist, const EngineOptions& opts,
                Expression& decoded) {
  decoded = decode(dist, opts.templates.vocab);
  ScorePair s;
  s.cel = cross_entropy_loss(expr, dist, opts.templates.vocab);
  s.meteor = decoded.empty() ? 0.0 : meteor(decoded, expr, opts.meteor);
  return s;
}

}  // namespace

std::vector<ScoredCandidate> score_self_referential(const Scene& scene, const Expression& expr,
                                                    const EngineOptions& opts) {
  if (scene.regions().empty()) throw Error("scene has no object regions");
  if (expr.empty()) throw Error("expression is empty");
  std::vector<const Region*> regions;
  for (const auto& r : scene.regions()) regions.push_back(&r);
  std::sort(regions.begin(), regions.end(), [](const Region* a, const Region* b) { return a->id < b->id; });

  std::vector<ScoredCandidate> out;
  out.reserve(regions.size());
  for (const Region* r : regions) {
    ScoredCandidate c;
    c.region_id = r->id;
    c.scores = score(expr, describe_region(scene, *r, opts.generator, opts.templates), opts, c.decoded);
    out.push_back(std::move(c));
  }
  return out;
}

GroundingOutcome ground_relational(const Scene& scene, std::span<const ScoredCandidate> candidates,
                                   const Expression& expr, const EngineOptions& opts) {
  if (candidates.size() < 2) throw Error("relational grounding needs at least two candidates");
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(c.region_id).second) throw Error("duplicate candidate '" + c.region_id + "'");
  }

  GroundingOutcome out;
  out.stage = Stage::relational;
  for (const auto& referred : candidates) {
    const Region& r = scene.at(referred.region_id);
    std::vector<const Region*> contexts;
    for (const auto& c : candidates) {
      if (c.region_id != referred.region_id) contexts.push_back(&scene.at(c.region_id));
    }
    contexts.push_back(&scene.image_region());
    for (const Region* ctx : contexts) {
      ScoredPair p;
      p.referred_id = r.id;
      p.context_id = ctx->id;
      p.scores = score(expr, describe_relation(scene, r, *ctx, opts.generator, opts.templates), opts, p.decoded);
      out.pair_trace.push_back(std::move(p));
    }
  }

  std::vector<ScorePair> scores;
  for (const auto& p : out.pair_trace) scores.push_back(p.scores);
  out.pair_relevant = relevant_mask(scores, opts.kmeans);

  std::vector<std::string> referred;  // distinct ids of the relevant cluster, candidate order
  for (const auto& c : candidates) {
    for (std::size_t i = 0; i < out.pair_trace.size(); ++i) {
      if (out.pair_relevant[i] && out.pair_trace[i].referred_id == c.region_id) {
        referred.push_back(c.region_id);
        break;
      }
    }
  }
  if (referred.size() == 1) {
    out.kind = OutcomeKind::unique;
    out.selected = referred.front();
    out.candidates.assign(candidates.begin(), candidates.end());
  } else {
    out.kind = OutcomeKind::ambiguous;
    for (const auto& c : candidates) {
      if (std::find(referred.begin(), referred.end(), c.region_id) != referred.end()) out.candidates.push_back(c);
    }
  }
  return out;
}

GroundingOutcome ground(const Scene& scene, const Expression& expr, const EngineOptions& opts) {
  if (expr.empty()) throw Error("expression is empty");
  std::optional<std::string> view;
  if (opts.perspective.enabled) view = detect_perspective(expr, opts.perspective);
  // Boxes are already expressed in the primary viewpoint.
  if (view && *view == scene.primary_name()) view.reset();
  const Scene* working = &scene;
  std::optional<Scene> transformed;
  if (view) {
    transformed.emplace(transform_scene(scene, *view));
    working = &*transformed;
  }

  std::vector<ScoredCandidate> stage1 = score_self_referential(*working, expr, opts);
  std::vector<ScorePair> scores;
  for (const auto& c : stage1) scores.push_back(c.scores);
  std::vector<bool> mask = relevant_mask(scores, opts.kmeans);
  std::vector<ScoredCandidate> relevant;
  for (std::size_t i = 0; i < stage1.size(); ++i) {
    if (mask[i]) relevant.push_back(stage1[i]);
  }

  GroundingOutcome out;
  if (relevant.size() == 1) {
    out.kind = OutcomeKind::unique;
    out.stage = Stage::self_referential;
    out.selected = relevant.front().region_id;
    out.candidates = relevant;
  } else {
    out = ground_relational(*working, relevant, expr, opts);
  }
  out.self_trace = std::move(stage1);
  out.self_relevant = std::move(mask);
  out.perspective = view;
  return out;
}

GroundingOutcome ground(const Scene& scene, std::string_view utterance, const EngineOptions& opts) {
  return ground(scene, tokenize(utterance), opts);
}

json to_json(const ScorePair& s) { return {{"cel", s.cel}, {"meteor", s.meteor}}; }

json to_json(const ScoredCandidate& c) {
  return {{"id", c.region_id}, {"scores", to_json(c.scores)}, {"decoded", c.decoded.text()}};
}

json to_json(const ScoredPair& p) {
  return {{"referred", p.referred_id}, {"context", p.context_id}, {"scores", to_json(p.scores)},
          {"decoded", p.decoded.text()}};
}

json to_json(const GroundingOutcome& o) {
  json j;
  j["kind"] = to_string(o.kind);
  j["stage"] = to_string(o.stage);
  j["selected"] = o.selected ? json(*o.selected) : json(nullptr);
  j["candidates"] = o.candidate_ids();
  j["perspective"] = o.perspective ? json(*o.perspective) : json(nullptr);
  json self = json::array();
  for (std::size_t i = 0; i < o.self_trace.size(); ++i) {
    json c = to_json(o.self_trace[i]);
    c["relevant"] = i < o.self_relevant.size() && o.self_relevant[i];
    self.push_back(std::move(c));
  }
  json pairs = json::array();
  for (std::size_t i = 0; i < o.pair_trace.size(); ++i) {
    json p = to_json(o.pair_trace[i]);
    p["relevant"] = i < o.pair_relevant.size() && o.pair_relevant[i];
    pairs.push_back(std::move(p));
  }
  j["trace"] = {{"self_referential", self}, {"pairs", pairs}};
  return j;
}

}  // namespace refground
