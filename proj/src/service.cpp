// SPDX-License-Identifier: Apache-2.0
#include "refground/service.hpp"

#include <condition_variable>
#include <sstream>

#include "refground/error.hpp"
#include "refground/hash.hpp"

namespace refground {

using nlohmann::json;

json SessionEvent::to_json() const { return {{"revision", revision}, {"type", type}, {"view", view}}; }

std::int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct SessionStore::Session {
  std::string id;
  std::shared_ptr<const Scene> scene;
  std::int64_t created_at = 0;
  std::optional<DialogState> dialog;
  std::vector<TranscriptEntry> history;
  std::uint64_t revision = 0;
  std::vector<SessionEvent> events;
  json last = nullptr;
  mutable std::mutex mutex;
  mutable std::condition_variable changed;

  bool awaiting() const { return dialog && dialog->status == DialogStatus::awaiting_response; }

  std::string state_hash() const {
    const json state = {{"revision", revision}, {"dialog", dialog ? dialog->to_json() : json(nullptr)}};
    return hex64(fnv1a(state.dump()));
  }

  // Callers hold `mutex`.
  void publish(const std::string& type, json& view) {
    view["revision"] = ++revision;
    last = view;
    events.push_back({revision, type, view});
    changed.notify_all();
  }
};

namespace {

json question_view(const DialogState& s, const json& trace) {
  return {{"kind", "question"},
          {"text", s.current->text},
          {"target", s.current->target_id},
          {"question_kind", to_string(s.current->kind)},
          {"candidates", s.candidates},
          {"narrowed", s.narrowed},
          {"trace", trace}};
}

std::string digest(const json& j) { return hex64(fnv1a(j.dump())); }

}  // namespace

SessionStore::SessionStore(EngineOptions engine, Clock clock, std::optional<std::filesystem::path> journal)
    : engine_(std::move(engine)), clock_(clock ? std::move(clock) : Clock(wall_clock_ms)) {
  engine_.validate();
  if (journal) {
    journal_ = std::make_unique<std::ofstream>(*journal, std::ios::app);
    if (!*journal_) throw Error("cannot open journal " + journal->string());
  }
}

SessionStore::~SessionStore() = default;

void SessionStore::journal(const json& line) {
  if (!journal_) return;
  std::lock_guard lock(journal_mutex_);
  *journal_ << line.dump() << '\n';
  journal_->flush();
  if (!*journal_) throw Error("journal write failed");
}

std::shared_ptr<SessionStore::Session> SessionStore::get(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
  return it->second;
}

std::string SessionStore::create_session(const json& scene_doc) {
  auto session = std::make_shared<Session>();
  session->scene = std::make_shared<const Scene>(scene_from_json(scene_doc));
  session->created_at = clock_();
  {
    std::unique_lock lock(sessions_mutex_);
    session->id = "s" + hex64(hash_combine(fnv1a("refground.session"), next_id_++));
    sessions_.emplace(session->id, session);
  }
  journal({{"op", "create"}, {"session", session->id}, {"scene", scene_doc}, {"timestamp", session->created_at}});
  return session->id;
}

json SessionStore::view(const std::string& id) const {
  auto s = get(id);
  std::lock_guard lock(s->mutex);
  json history = json::array();
  for (const auto& e : s->history) history.push_back(e.to_json());
  return {{"id", s->id},
          {"revision", s->revision},
          {"created_at", s->created_at},
          {"dialog_open", s->awaiting()},
          {"dialog", s->dialog ? s->dialog->to_json() : json(nullptr)},
          {"last", s->last},
          {"history", history},
          {"scene", scene_to_json(*s->scene)}};
}

json SessionStore::submit_instruction(const std::string& id, const std::string& text) {
  auto s = get(id);
  std::lock_guard lock(s->mutex);
  if (s->awaiting()) throw StateError("a question is awaiting a response");
  const GroundingOutcome outcome = ground(*s->scene, std::string_view(text), engine_);
  const std::int64_t now = clock_();
  const std::string before = s->state_hash();

  json view;
  std::string type;
  if (outcome.kind == OutcomeKind::unique) {
    s->dialog.reset();
    view = {{"kind", "unique"}, {"selected", *outcome.selected}, {"candidates", outcome.candidate_ids()},
            {"trace", to_json(outcome)}};
    type = "resolved";
  } else {
    s->dialog = open_dialog(s->scene, text, outcome.candidate_ids(), engine_);
    view = question_view(*s->dialog, to_json(outcome));
    type = "question-asked";
  }
  s->history.push_back({before, "", text, now});
  s->publish(type, view);
  journal({{"op", "instruction"}, {"session", id}, {"text", text}, {"timestamp", now}, {"view_digest", digest(view)}});
  return view;
}

json SessionStore::submit_response(const std::string& id, const std::string& text) {
  auto s = get(id);
  std::lock_guard lock(s->mutex);
  if (!s->awaiting()) throw StateError("no question is awaiting a response");
  const std::string question = s->dialog->current->text;
  DialogState next = dialog_step(*s->dialog, text, engine_);
  const std::int64_t now = clock_();
  const std::string before = s->state_hash();

  const json trace = next.regrounding ? to_json(*next.regrounding) : json(nullptr);
  json view;
  std::string type;
  switch (next.status) {
    case DialogStatus::resolved:
      view = {{"kind", "resolved"}, {"selected", *next.resolved_id}, {"candidates", next.candidates}, {"trace", trace}};
      type = "resolved";
      break;
    case DialogStatus::exhausted:
      view = {{"kind", "exhausted"}, {"candidates", json::array()}, {"trace", trace}};
      type = "exhausted";
      break;
    case DialogStatus::awaiting_response:
      view = question_view(next, trace);
      type = next.narrowed ? "narrowed" : "question-asked";
      break;
  }
  s->dialog = std::move(next);
  s->history.push_back({before, question, text, now});
  s->publish(type, view);
  journal({{"op", "response"}, {"session", id}, {"text", text}, {"timestamp", now}, {"view_digest", digest(view)}});
  return view;
}

std::vector<SessionEvent> SessionStore::events_since(const std::string& id, std::uint64_t since) const {
  auto s = get(id);
  std::lock_guard lock(s->mutex);
  return since >= s->events.size() ? std::vector<SessionEvent>{}
                                   : std::vector<SessionEvent>(s->events.begin() + static_cast<std::ptrdiff_t>(since),
                                                               s->events.end());
}

std::vector<SessionEvent> SessionStore::wait_events(const std::string& id, std::uint64_t since,
                                                    std::chrono::milliseconds timeout) const {
  auto s = get(id);
  std::unique_lock lock(s->mutex);
  s->changed.wait_for(lock, timeout, [&] { return s->revision > since; });
  if (since >= s->events.size()) return {};
  return {s->events.begin() + static_cast<std::ptrdiff_t>(since), s->events.end()};
}

std::vector<TranscriptEntry> SessionStore::transcript(const std::string& id) const {
  auto s = get(id);
  std::lock_guard lock(s->mutex);
  return s->history;
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

ReplayResult replay_journal(std::istream& in, const EngineOptions& engine) {
  std::int64_t now = 0;
  SessionStore store(engine, [&now] { return now; });
  std::map<std::string, std::string> ids;  // journal id -> replayed id
  ReplayResult result;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    json op;
    try {
      op = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("journal:" + std::to_string(lineno), e.what());
    }
    now = op.value("timestamp", std::int64_t{0});
    const std::string kind = op.at("op").get<std::string>();
    const std::string session = op.at("session").get<std::string>();
    ++result.operations;
    if (kind == "create") {
      ids[session] = store.create_session(op.at("scene"));
      continue;
    }
    auto it = ids.find(session);
    if (it == ids.end()) throw ParseError("journal:" + std::to_string(lineno), "session created before the journal began");
    const std::string text = op.at("text").get<std::string>();
    json view = kind == "instruction" ? store.submit_instruction(it->second, text) : store.submit_response(it->second, text);
    if (digest(view) != op.value("view_digest", std::string())) ++result.mismatches;
    result.views.push_back(std::move(view));
  }
  return result;
}

}  // namespace refground
