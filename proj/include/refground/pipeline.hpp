// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refground/cluster.hpp"
#include "refground/generator.hpp"
#include "refground/perspective.hpp"
#include "refground/scene.hpp"
#include "refground/scoring.hpp"

namespace refground {

/// Everything that parameterises a grounding run.
struct EngineOptions {
  Templates templates = Templates::builtin();
  GeneratorConfig generator;
  MeteorConfig meteor;
  KMeansOptions kmeans;
  PerspectiveConfig perspective;
  double informativeness_threshold = 0.25;
  // Region-proposal thresholds of a detector front end. Recorded for
  // completeness; the attribute-driven scenes here need no proposal stage.
  double nms_threshold = 0.7;
  double proposal_threshold = 0.05;

  void validate() const;
};

struct ScoredCandidate {
  std::string region_id;
  ScorePair scores;
  Expression decoded;
};

struct ScoredPair {
  std::string referred_id;
  std::string context_id;  // may be the image region id
  ScorePair scores;
  Expression decoded;
};

enum class OutcomeKind { unique, ambiguous };
enum class Stage { self_referential, relational };

std::string_view to_string(OutcomeKind k);
std::string_view to_string(Stage s);

struct GroundingOutcome {
  OutcomeKind kind = OutcomeKind::ambiguous;
  std::optional<std::string> selected;
  std::vector<ScoredCandidate> candidates;  // unique: stage-1 relevant set; ambiguous: survivors
  std::vector<ScoredPair> pair_trace;
  std::vector<bool> pair_relevant;
  Stage stage = Stage::self_referential;

  // Full stage-1 trace for explanation and debugging.
  std::vector<ScoredCandidate> self_trace;
  std::vector<bool> self_relevant;
  std::optional<std::string> perspective;  // viewpoint the scene was transformed into

  std::vector<std::string> candidate_ids() const;
  std::size_t relevant_count() const;
};

/// Stage 1: one entry per object region, ordered by region id.
std::vector<ScoredCandidate> score_self_referential(const Scene& scene, const Expression& expr,
                                                    const EngineOptions& opts = {});

/// Stage 2 over ordered pairs (R, Rc), R in `candidates`, Rc in `candidates` + image, R != Rc.
GroundingOutcome ground_relational(const Scene& scene, std::span<const ScoredCandidate> candidates,
                                   const Expression& expr, const EngineOptions& opts = {});

/// Full two-stage grounding, with perspective handling when enabled.
GroundingOutcome ground(const Scene& scene, const Expression& expr, const EngineOptions& opts = {});
GroundingOutcome ground(const Scene& scene, std::string_view utterance, const EngineOptions& opts = {});

nlohmann::json to_json(const ScorePair& s);
nlohmann::json to_json(const ScoredCandidate& c);
nlohmann::json to_json(const ScoredPair& p);
nlohmann::json to_json(const GroundingOutcome& o);

}  // namespace refground
