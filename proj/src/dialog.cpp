// SPDX-License-Identifier: Apache-2.0
#include "refground/dialog.hpp"

#include <algorithm>
#include <numeric>

#include "refground/error.hpp"
#include "refground/hash.hpp"

namespace refground {

using nlohmann::json;

std::string_view to_string(QuestionKind k) {
  return k == QuestionKind::self_referential ? "self-referential" : "relational";
}

std::string_view to_string(DialogStatus s) {
  switch (s) {
    case DialogStatus::awaiting_response: return "awaiting-response";
    case DialogStatus::resolved: return "resolved";
    case DialogStatus::exhausted: return "exhausted";
  }
  return "";
}

std::string question_text(const Expression& e) { return "Do you mean " + e.text() + "?"; }

namespace {

double safe_meteor(const Expression& a, const Expression& b, const MeteorConfig& cfg) {
  if (a.empty() || b.empty()) return 0.0;
  return meteor(a, b, cfg);
}

Expression self_description(const Scene& scene, const std::string& id, const EngineOptions& opts) {
  return decode(describe_region(scene, scene.at(id), opts.generator, opts.templates), opts.templates.vocab);
}

struct Ranked {
  std::string id;
  double score;
  Expression expression;
};

std::vector<Ranked> rank(const Scene& scene, std::span<const std::string> candidates, const EngineOptions& opts) {
  std::vector<Expression> exprs;
  for (const auto& id : candidates) exprs.push_back(self_description(scene, id, opts));
  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::vector<Expression> others;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (j != i) others.push_back(exprs[j]);
    }
    const double score = others.empty() ? 0.0 : informativeness(exprs[i], others, opts.meteor);
    ranked.push_back({candidates[i], score, exprs[i]});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.id < b.id;
  });
  return ranked;
}

}  // namespace

double informativeness(const Expression& expr, std::span<const Expression> others, const MeteorConfig& cfg) {
  if (others.empty()) throw Error("informativeness needs at least one other expression");
  double sum = 0.0;
  for (const auto& o : others) sum += safe_meteor(expr, o, cfg);
  return sum / static_cast<double>(others.size());
}

std::vector<std::string> question_order(const Scene& scene, std::span<const std::string> candidates,
                                        const EngineOptions& opts) {
  std::vector<std::string> ids;
  for (auto& r : rank(scene, candidates, opts)) ids.push_back(std::move(r.id));
  return ids;
}

Question generate_question(const Scene& scene, std::span<const std::string> candidates, const EngineOptions& opts) {
  if (candidates.size() < 2) throw Error("question generation needs at least two candidates");
  const std::vector<Ranked> ranked = rank(scene, candidates, opts);
  const Ranked& best = ranked.front();
  Question q;
  q.target_id = best.id;
  if (best.score < opts.informativeness_threshold && !best.expression.empty()) {
    q.kind = QuestionKind::self_referential;
    q.expression = best.expression;
  } else {
    q.kind = QuestionKind::relational;
    q.expression = decode(describe_relation(scene, scene.at(best.id), scene.image_region(), opts.generator, opts.templates),
                          opts.templates.vocab);
  }
  q.text = question_text(q.expression);
  return q;
}

namespace {

Question next_question(const Scene& scene, const std::vector<std::string>& candidates, const EngineOptions& opts) {
  if (candidates.size() >= 2) return generate_question(scene, candidates, opts);
  Question q;
  q.target_id = candidates.front();
  q.kind = QuestionKind::self_referential;
  q.expression = self_description(scene, q.target_id, opts);
  q.text = question_text(q.expression);
  return q;
}

bool is_yes(const std::string& t) { return t == "yes" || t == "yeah" || t == "yep" || t == "yup"; }
bool is_no(const std::string& t) { return t == "no" || t == "nope" || t == "nah"; }

}  // namespace

ParsedResponse parse_response(std::string_view text) {
  Expression tokens = tokenize(text);
  if (is_yes(tokens[0])) return {ResponseKind::yes, {}};
  if (!is_no(tokens[0])) return {ResponseKind::correction, std::move(tokens), false};
  tokens.tokens.erase(tokens.tokens.begin());
  if (tokens.empty()) return {ResponseKind::no, {}};
  return {ResponseKind::correction, std::move(tokens), true};
}

DialogState open_dialog(std::shared_ptr<const Scene> scene, std::string utterance, std::vector<std::string> candidates,
                        const EngineOptions& opts) {
  if (!scene) throw Error("dialog needs a scene");
  if (candidates.empty()) throw Error("dialog needs at least one candidate");
  for (const auto& id : candidates) scene->at(id);
  DialogState s;
  s.scene = std::move(scene);
  s.utterance = std::move(utterance);
  s.candidates = std::move(candidates);
  s.current = next_question(*s.scene, s.candidates, opts);
  s.status = DialogStatus::awaiting_response;
  return s;
}

DialogState dialog_step(const DialogState& state, std::string_view response, const EngineOptions& opts) {
  if (state.status != DialogStatus::awaiting_response || !state.current)
    throw StateError("dialog is not awaiting a response");
  const ParsedResponse parsed = parse_response(response);

  DialogState next = state;
  next.asked.push_back({*state.current, std::string(response)});
  next.current.reset();
  next.regrounding.reset();
  next.narrowed = false;
  const Scene& scene = *state.scene;

  switch (parsed.kind) {
    case ResponseKind::yes:
      next.status = DialogStatus::resolved;
      next.resolved_id = state.current->target_id;
      return next;
    case ResponseKind::no:
      std::erase(next.candidates, state.current->target_id);
      if (next.candidates.empty()) {
        next.status = DialogStatus::exhausted;
        return next;
      }
      next.current = next_question(scene, next.candidates, opts);
      return next;
    case ResponseKind::correction: {
      std::vector<std::string> remaining = state.candidates;
      if (parsed.negated) std::erase(remaining, state.current->target_id);
      if (remaining.empty()) {
        next.candidates.clear();
        next.status = DialogStatus::exhausted;
        return next;
      }
      const Scene live = scene.restricted_to(remaining);
      GroundingOutcome outcome = ground(live, parsed.correction, opts);
      if (outcome.kind == OutcomeKind::unique) {
        next.status = DialogStatus::resolved;
        next.resolved_id = outcome.selected;
      } else {
        next.candidates = outcome.candidate_ids();
        next.narrowed = next.candidates.size() < state.candidates.size();
        next.current = next_question(scene, next.candidates, opts);
      }
      next.regrounding = std::move(outcome);
      return next;
    }
  }
  return next;
}

json DialogState::to_json() const {
  json j;
  j["utterance"] = utterance;
  j["candidates"] = candidates;
  j["status"] = to_string(status);
  j["resolved_id"] = resolved_id ? json(*resolved_id) : json(nullptr);
  j["narrowed"] = narrowed;
  auto question_json = [](const Question& q) {
    return json{{"text", q.text}, {"target", q.target_id}, {"kind", to_string(q.kind)}};
  };
  j["current"] = current ? question_json(*current) : json(nullptr);
  json turns = json::array();
  for (const auto& t : asked) turns.push_back({{"question", question_json(t.question)}, {"response", t.response}});
  j["asked"] = turns;
  return j;
}

std::string DialogState::hash() const { return hex64(fnv1a(to_json().dump())); }

json TranscriptEntry::to_json() const {
  return {{"state_hash", state_hash}, {"question", question}, {"response", response}, {"timestamp", timestamp}};
}

TranscriptEntry TranscriptEntry::from_json(const json& j) {
  TranscriptEntry e;
  e.state_hash = j.at("state_hash").get<std::string>();
  e.question = j.at("question").get<std::string>();
  e.response = j.at("response").get<std::string>();
  e.timestamp = j.at("timestamp").get<std::int64_t>();
  return e;
}

}  // namespace refground
