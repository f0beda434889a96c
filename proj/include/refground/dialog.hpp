// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refground/pipeline.hpp"

namespace refground {

enum class QuestionKind { self_referential, relational };
std::string_view to_string(QuestionKind k);

struct Question {
  std::string text;  // "Do you mean <expression>?"
  std::string target_id;
  QuestionKind kind = QuestionKind::self_referential;
  Expression expression;
};

std::string question_text(const Expression& e);

/// Mean METEOR between `expr` and each of `others`; low means distinctive.
double informativeness(const Expression& expr, std::span<const Expression> others, const MeteorConfig& cfg = {});

/// Candidates ordered most distinctive first (ascending mean METEOR against
/// the other candidates' self-referential descriptions), ties by id.
std::vector<std::string> question_order(const Scene& scene, std::span<const std::string> candidates,
                                        const EngineOptions& opts = {});

/// Self-referential question about the most distinctive candidate when its
/// score is under the threshold; otherwise a relational question (whole-image
/// context) about the first candidate in question order.
Question generate_question(const Scene& scene, std::span<const std::string> candidates,
                           const EngineOptions& opts = {});

enum class DialogStatus { awaiting_response, resolved, exhausted };
std::string_view to_string(DialogStatus s);

struct DialogTurn {
  Question question;
  std::string response;
};

/// Immutable snapshot of a disambiguation dialog; `dialog_step` returns the next one.
struct DialogState {
  std::shared_ptr<const Scene> scene;
  std::string utterance;
  std::vector<std::string> candidates;
  std::vector<DialogTurn> asked;
  std::optional<Question> current;
  DialogStatus status = DialogStatus::awaiting_response;
  std::optional<std::string> resolved_id;
  /// Set when the last response was a correction that was re-grounded.
  std::optional<GroundingOutcome> regrounding;
  bool narrowed = false;

  nlohmann::json to_json() const;
  std::string hash() const;
};

enum class ResponseKind { yes, no, correction };

struct ParsedResponse {
  ResponseKind kind;
  Expression correction;  // set for corrections, leading "no" word removed
  bool negated = false;   // the correction started with "no"
};

ParsedResponse parse_response(std::string_view text);

/// Starts a dialog over `candidates` (at least one) and asks the first question.
DialogState open_dialog(std::shared_ptr<const Scene> scene, std::string utterance,
                        std::vector<std::string> candidates, const EngineOptions& opts = {});

/// "yes" resolves to the current target; "no" drops it and asks about the
/// next candidate (or exhausts); anything else is re-grounded over the
/// remaining candidates (without the current target when the text starts
/// with "no") and either resolves or narrows the set.
DialogState dialog_step(const DialogState& state, std::string_view response, const EngineOptions& opts = {});

/// One line of the append-only transcript log.
struct TranscriptEntry {
  std::string state_hash;  // state before the response
  std::string question;
  std::string response;
  std::int64_t timestamp = 0;

  nlohmann::json to_json() const;
  static TranscriptEntry from_json(const nlohmann::json& j);
};

}  // namespace refground
