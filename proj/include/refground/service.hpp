// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "refground/dialog.hpp"
#include "refground/pipeline.hpp"

namespace refground {

/// State-change notification. Types: question-asked, narrowed, resolved, exhausted.
struct SessionEvent {
  std::uint64_t revision = 0;
  std::string type;
  nlohmann::json view;

  nlohmann::json to_json() const;
};

using Clock = std::function<std::int64_t()>;

/// Milliseconds since the Unix epoch.
std::int64_t wall_clock_ms();

/// In-memory sessions over the grounding engine. Requests on one session are
/// serialised; different sessions proceed independently. With a journal path,
/// every accepted request is appended as one JSON line for later replay.
class SessionStore {
 public:
  explicit SessionStore(EngineOptions engine = {}, Clock clock = wall_clock_ms,
                        std::optional<std::filesystem::path> journal = std::nullopt);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  /// Validates the scene document (`ParseError` names the field) and returns a fresh id.
  std::string create_session(const nlohmann::json& scene_doc);

  /// {id, revision, created_at, dialog_open, dialog, last, history, scene}
  nlohmann::json view(const std::string& id) const;

  /// Grounds an instruction. Unique: {kind: "unique", selected, ...};
  /// ambiguous: opens a dialog and returns {kind: "question", text, target, candidates, ...}.
  /// Throws `NotFound`, or `StateError` while a question is pending.
  nlohmann::json submit_instruction(const std::string& id, const std::string& text);

  /// Answers the pending question: {kind: "resolved" | "question" | "exhausted", ...}.
  /// Throws `NotFound`, or `StateError` when no question is pending.
  nlohmann::json submit_response(const std::string& id, const std::string& text);

  std::vector<SessionEvent> events_since(const std::string& id, std::uint64_t since) const;
  /// Like `events_since`, but waits up to `timeout` for a newer event.
  std::vector<SessionEvent> wait_events(const std::string& id, std::uint64_t since,
                                        std::chrono::milliseconds timeout) const;

  std::vector<TranscriptEntry> transcript(const std::string& id) const;
  std::size_t size() const;
  const EngineOptions& engine() const { return engine_; }

 private:
  struct Session;
  std::shared_ptr<Session> get(const std::string& id) const;
  void journal(const nlohmann::json& line);

  EngineOptions engine_;
  Clock clock_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 0;
  std::mutex journal_mutex_;
  std::unique_ptr<std::ofstream> journal_;
};

struct ReplayResult {
  std::size_t operations = 0;
  std::size_t mismatches = 0;
  std::vector<nlohmann::json> views;  // one per instruction or response, journal order
};

/// Re-applies a journal to a fresh store and checks each outcome view
/// against the recorded digest.
ReplayResult replay_journal(std::istream& journal, const EngineOptions& engine = {});

}  // namespace refground
