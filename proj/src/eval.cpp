// SPDX-License-Identifier: Apache-2.0
#include "refground/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "refground/config.hpp"
#include "refground/dialog.hpp"
#include "refground/error.hpp"
#include "refground/hash.hpp"

namespace refground {

using nlohmann::json;

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

SeedRange SeedRange::parse(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) throw ConfigError("seed range must look like A..B");
  auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
      throw ConfigError("bad seed '" + std::string(s) + "' in range '" + std::string(text) + "'");
    return v;
  };
  SeedRange r{number(text.substr(0, dots)), number(text.substr(dots + 2))};
  if (r.end <= r.begin) throw ConfigError("seed range '" + std::string(text) + "' is empty");
  return r;
}

std::string SeedRange::to_string() const { return std::to_string(begin) + ".." + std::to_string(end); }

BenchmarkConfig BenchmarkConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("benchmark config must be a JSON object");
  BenchmarkConfig c;
  if (j.contains("corpus")) c.corpus = CorpusConfig::from_json(j["corpus"]);
  if (j.contains("engine")) {
    const json& e = j["engine"];
    if (e.is_string()) {
      const auto path = std::filesystem::path(e.get<std::string>());
      c.engine = load_engine_options(path.is_absolute() || base_dir.empty() ? path : base_dir / path);
    } else {
      c.engine = engine_options_from_json(e, base_dir);
    }
  }
  try {
    c.paraphrase_probability = j.value("paraphrase_probability", 0.0);
    c.paraphrase_seed = j.value("paraphrase_seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("benchmark config: ") + e.what());
  }
  if (c.paraphrase_probability < 0.0 || c.paraphrase_probability > 1.0)
    throw ConfigError("paraphrase_probability outside [0, 1]");
  return c;
}

BenchmarkConfig BenchmarkConfig::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path), path.parent_path());
}

json BenchmarkConfig::to_json() const {
  return {{"corpus", corpus.to_json()},
          {"engine", engine_options_to_json(engine)},
          {"paraphrase_probability", paraphrase_probability},
          {"paraphrase_seed", paraphrase_seed}};
}

std::string BenchmarkConfig::fingerprint() const { return hex64(fnv1a(to_json().dump())); }

Expression paraphrase(const Expression& expr, const SynonymLexicon& lexicon, double probability, std::uint64_t seed) {
  std::mt19937_64 rng(hash_combine(fnv1a("refground.paraphrase"), seed));
  Expression out = expr;
  for (auto& token : out.tokens) {
    const auto alternatives = lexicon.synonyms_of(token);
    if (alternatives.empty()) continue;
    if (unit_uniform(rng) < probability) token = alternatives[uniform_index(rng, alternatives.size())];
  }
  return out;
}

std::vector<const SceneRecord*> BenchmarkReport::failures() const {
  std::vector<const SceneRecord*> out;
  for (const auto& r : records) {
    if (!r.success) out.push_back(&r);
  }
  return out;
}

json BenchmarkReport::to_json() const {
  json recs = json::array();
  for (const auto& r : records) {
    json j = {{"seed", r.seed},
              {"utterance", r.utterance},
              {"target", r.target_id},
              {"requires_relation", r.requires_relation},
              {"outcome", r.outcome},
              {"selected", r.selected ? json(*r.selected) : json(nullptr)},
              {"success", r.success},
              {"iou", r.iou},
              {"questions", r.questions},
              {"regions", r.regions},
              {"relevant", r.relevant},
              {"candidates", r.candidates},
              {"pairs", r.pairs}};
    if (!r.trace.is_null()) j["trace"] = r.trace;
    recs.push_back(std::move(j));
  }
  return {{"kind", kind},
          {"fingerprint", fingerprint},
          {"seeds", seeds.to_string()},
          {"trials", records.size()},
          {"successes", successes},
          {"accuracy", accuracy},
          {"ci95", {ci_low, ci_high}},
          {"mean_questions", mean_questions},
          {"mean_regions", mean_regions},
          {"mean_relevant", mean_relevant},
          {"max_pairs", max_pairs},
          {"records", recs}};
}

namespace {

void aggregate(BenchmarkReport& report) {
  const double n = static_cast<double>(report.records.size());
  double questions = 0.0, regions = 0.0, relevant = 0.0;
  report.successes = 0;
  for (const auto& r : report.records) {
    report.successes += r.success ? 1 : 0;
    questions += r.questions;
    regions += static_cast<double>(r.regions);
    relevant += static_cast<double>(r.relevant);
    report.max_pairs = std::max(report.max_pairs, r.pairs);
  }
  report.accuracy = static_cast<double>(report.successes) / n;
  const double half = 1.96 * std::sqrt(report.accuracy * (1.0 - report.accuracy) / n);
  report.ci_low = std::max(0.0, report.accuracy - half);
  report.ci_high = std::min(1.0, report.accuracy + half);
  report.mean_questions = questions / n;
  report.mean_regions = regions / n;
  report.mean_relevant = relevant / n;
}

json truth_json(const GroundTruth& t) {
  return {{"target", t.target_id},
          {"requires_relation", t.requires_relation},
          {"utterance", t.utterance.text()},
          {"context", t.context_id ? json(*t.context_id) : json(nullptr)},
          {"group", t.group}};
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& config, SeedRange seeds) {
  if (seeds.size() == 0) throw ConfigError("empty seed range");
  config.engine.validate();
  BenchmarkReport report;
  report.kind = "grounding";
  report.fingerprint = config.fingerprint();
  report.seeds = seeds;
  for (std::uint64_t seed = seeds.begin; seed < seeds.end; ++seed) {
    auto [scene, truth] = generate_scene(config.corpus, seed);
    Expression utterance = truth.utterance;
    if (config.paraphrase_probability > 0.0)
      utterance = paraphrase(utterance, config.engine.meteor.synonyms, config.paraphrase_probability,
                             hash_combine(config.paraphrase_seed, seed));
    const GroundingOutcome outcome = ground(scene, utterance, config.engine);

    SceneRecord r;
    r.seed = seed;
    r.utterance = utterance.text();
    r.target_id = truth.target_id;
    r.requires_relation = truth.requires_relation;
    r.outcome = std::string(to_string(outcome.kind));
    r.selected = outcome.selected;
    if (outcome.kind == OutcomeKind::unique) r.iou = iou(scene.at(*outcome.selected).box, scene.at(truth.target_id).box);
    r.success = outcome.kind == OutcomeKind::unique && r.iou > 0.5;
    r.regions = scene.regions().size();
    r.relevant = outcome.relevant_count();
    r.candidates = outcome.candidates.size();
    r.pairs = outcome.pair_trace.size();
    if (!r.success) r.trace = {{"scene", scene_to_json(scene)}, {"truth", truth_json(truth)}, {"outcome", to_json(outcome)}};
    report.records.push_back(std::move(r));
  }
  aggregate(report);
  return report;
}

std::string_view to_string(Protocol p) { return p == Protocol::object_specific ? "object-specific" : "exhaustive"; }
std::string_view to_string(UserModel u) { return u == UserModel::yes_no ? "yes-no" : "correcting"; }

Protocol parse_protocol(std::string_view s) {
  if (s == "object-specific") return Protocol::object_specific;
  if (s == "exhaustive" || s == "exhaustive-baseline") return Protocol::exhaustive;
  throw ConfigError("unknown protocol '" + std::string(s) + "'");
}

UserModel parse_user_model(std::string_view s) {
  if (s == "yes-no") return UserModel::yes_no;
  if (s == "correcting") return UserModel::correcting;
  throw ConfigError("unknown user model '" + std::string(s) + "'");
}

namespace {

struct DialogRun {
  int questions = 0;
  bool resolved = false;
  std::optional<std::string> selected;
  json transcript = json::array();
};

DialogRun run_object_specific(const std::shared_ptr<const Scene>& scene, const Expression& utterance,
                              const std::vector<std::string>& candidates, const std::string& target,
                              UserModel user, const EngineOptions& engine) {
  DialogRun run;
  DialogState state = open_dialog(scene, utterance.text(), candidates, engine);
  bool corrected = false;
  while (state.status == DialogStatus::awaiting_response) {
    ++run.questions;
    std::string response = "no";
    if (state.current->target_id == target) {
      response = "yes";
    } else if (user == UserModel::correcting && !corrected) {
      corrected = true;
      std::vector<std::string> remaining = state.candidates;
      std::erase(remaining, state.current->target_id);
      const Scene live = scene->restricted_to(remaining);
      if (auto d = unique_description(live, live.at(target), remaining, engine.templates))
        response = "no, " + d->expression.text();
    }
    run.transcript.push_back({{"question", state.current->text}, {"target", state.current->target_id}, {"response", response}});
    state = dialog_step(state, response, engine);
  }
  run.resolved = state.status == DialogStatus::resolved;
  run.selected = state.resolved_id;
  return run;
}

// Generic pointing questions in region-id order; any non-"yes" is a "no".
DialogRun run_exhaustive(const std::vector<std::string>& candidates, const std::string& target) {
  DialogRun run;
  std::vector<std::string> order = candidates;
  std::sort(order.begin(), order.end());
  for (const auto& id : order) {
    ++run.questions;
    const bool yes = id == target;
    run.transcript.push_back({{"question", "Do you mean this object?"}, {"target", id}, {"response", yes ? "yes" : "no"}});
    if (yes) {
      run.resolved = true;
      run.selected = id;
      break;
    }
  }
  return run;
}

}  // namespace

BenchmarkReport simulate_dialog(const BenchmarkConfig& config, SeedRange seeds, Protocol protocol, UserModel user) {
  if (seeds.size() == 0) throw ConfigError("empty seed range");
  if (!config.corpus.ambiguous) throw ConfigError("dialog simulation needs an ambiguous corpus config");
  config.engine.validate();
  BenchmarkReport report;
  report.kind = "dialog:" + std::string(to_string(protocol)) + ":" + std::string(to_string(user));
  report.fingerprint = config.fingerprint();
  report.seeds = seeds;
  for (std::uint64_t seed = seeds.begin; seed < seeds.end; ++seed) {
    auto generated = generate_scene(config.corpus, seed);
    auto scene = std::make_shared<const Scene>(std::move(generated.first));
    const GroundTruth& truth = generated.second;
    const std::vector<std::string>& candidates = truth.group;

    auto run_for = [&](const std::string& target) {
      return protocol == Protocol::object_specific
                 ? run_object_specific(scene, truth.utterance, candidates, target, user, config.engine)
                 : run_exhaustive(candidates, target);
    };

    const DialogRun run = run_for(truth.target_id);
    SceneRecord r;
    r.seed = seed;
    r.utterance = truth.utterance.text();
    r.target_id = truth.target_id;
    r.requires_relation = truth.requires_relation;
    r.outcome = run.resolved ? "resolved" : "exhausted";
    r.selected = run.selected;
    r.success = run.selected == truth.target_id;
    r.iou = r.success ? 1.0 : 0.0;
    r.regions = scene->regions().size();
    r.relevant = candidates.size();
    r.candidates = candidates.size();
    if (user == UserModel::yes_no) {
      double total = 0.0;
      for (const auto& id : candidates) total += run_for(id).questions;
      r.questions = total / static_cast<double>(candidates.size());
    } else {
      r.questions = run.questions;
    }
    if (!r.success) r.trace = {{"scene", scene_to_json(*scene)}, {"truth", truth_json(truth)}, {"transcript", run.transcript}};
    report.records.push_back(std::move(r));
  }
  aggregate(report);
  return report;
}

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("paired samples differ in length");
  if (a.size() < 2) throw Error("paired t-test needs at least two pairs");
  PairedTest t;
  t.n = a.size();
  const double n = static_cast<double>(t.n);
  std::vector<double> d(t.n);
  for (std::size_t i = 0; i < t.n; ++i) d[i] = a[i] - b[i];
  t.mean_difference = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : d) ss += (x - t.mean_difference) * (x - t.mean_difference);
  t.sd = std::sqrt(ss / (n - 1.0));
  if (t.sd == 0.0) {
    t.t = t.mean_difference > 0.0 ? INFINITY : (t.mean_difference < 0.0 ? -INFINITY : 0.0);
    t.p_value = t.mean_difference > 0.0 ? 0.0 : 1.0;
    return t;
  }
  t.t = t.mean_difference / (t.sd / std::sqrt(n));
  const boost::math::students_t dist(n - 1.0);
  t.p_value = boost::math::cdf(boost::math::complement(dist, t.t));
  return t;
}

}  // namespace refground
