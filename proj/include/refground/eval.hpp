// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refground/corpus.hpp"
#include "refground/pipeline.hpp"

namespace refground {

/// Intersection over union; 0 for disjoint or degenerate boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Half-open seed interval written "A..B" (B excluded).
struct SeedRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  std::uint64_t size() const { return end - begin; }
  static SeedRange parse(std::string_view text);
  std::string to_string() const;
};

struct BenchmarkConfig {
  CorpusConfig corpus;
  EngineOptions engine;
  /// Per-token chance of replacing a word of the ground-truth utterance by a synonym.
  double paraphrase_probability = 0.0;
  std::uint64_t paraphrase_seed = 0;

  /// {"corpus": {...}, "engine": {...} | "path", "paraphrase_probability", "paraphrase_seed"}
  static BenchmarkConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static BenchmarkConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Hex digest of the canonical config JSON.
  std::string fingerprint() const;
};

/// Replaces each token that has synonyms with probability `probability`.
Expression paraphrase(const Expression& expr, const SynonymLexicon& lexicon, double probability, std::uint64_t seed);

struct SceneRecord {
  std::uint64_t seed = 0;
  std::string utterance;
  std::string target_id;
  bool requires_relation = false;
  std::string outcome;  // unique / ambiguous for grounding; resolved / exhausted for dialogs
  std::optional<std::string> selected;
  bool success = false;
  double iou = 0.0;
  double questions = 0.0;
  std::size_t regions = 0;
  std::size_t relevant = 0;
  std::size_t candidates = 0;
  std::size_t pairs = 0;
  nlohmann::json trace;  // failures only: scene, truth and score trace
};

struct BenchmarkReport {
  std::string kind;  // "grounding" or "dialog:<protocol>:<user>"
  std::string fingerprint;
  SeedRange seeds;
  std::vector<SceneRecord> records;
  std::size_t successes = 0;
  double accuracy = 0.0;
  double ci_low = 0.0;  // 95% normal approximation
  double ci_high = 0.0;
  double mean_questions = 0.0;
  double mean_regions = 0.0;
  double mean_relevant = 0.0;
  std::size_t max_pairs = 0;

  std::vector<const SceneRecord*> failures() const;
  nlohmann::json to_json() const;
};

/// One grounding trial per seed: success iff the outcome is unique and the
/// selected box overlaps the target box with IoU > 0.5.
BenchmarkReport run_benchmark(const BenchmarkConfig& config, SeedRange seeds);

enum class Protocol { object_specific, exhaustive };
enum class UserModel { yes_no, correcting };

std::string_view to_string(Protocol p);
std::string_view to_string(UserModel u);
Protocol parse_protocol(std::string_view s);
UserModel parse_user_model(std::string_view s);

/// Question-asking simulation over an ambiguous corpus. The candidate set is
/// the ground-truth group of same-category objects. The exhaustive baseline
/// points at candidates in region-id order and only understands yes/no. The
/// yes/no user's question count is the mean over every candidate as target;
/// the correcting user answers the first wrong question with "no, <unique
/// description of the target among the other live candidates>".
BenchmarkReport simulate_dialog(const BenchmarkConfig& config, SeedRange seeds, Protocol protocol, UserModel user);

struct PairedTest {
  std::size_t n = 0;
  double mean_difference = 0.0;  // mean of (a - b)
  double sd = 0.0;
  double t = 0.0;
  double p_value = 1.0;  // one-sided, H1: mean(a - b) > 0
};

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace refground
