// SPDX-License-Identifier: Apache-2.0
// Acceptance checks: one PASS/FAIL line per criterion with the measured values.
// Usage: acceptance [failure-dump-dir]

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "refground/cluster.hpp"
#include "refground/config.hpp"
#include "refground/corpus.hpp"
#include "refground/eval.hpp"
#include "refground/perspective.hpp"
#include "refground/service.hpp"

using namespace refground;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kData = REFGROUND_DATA_DIR;
int g_failed = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++g_failed;
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

void check_metrics() {
  const auto t0 = std::chrono::steady_clock::now();
  int failures = 0;
  auto near = [&](double got, double want) { failures += std::abs(got - want) > 1e-9; };

  const Vocabulary v({"<eos>", "<unk>", "the", "red", "cup", "ball", "blue", "box", "on", "left"});
  Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(4, 10);
  one_hot(0, 2) = one_hot(1, 3) = one_hot(2, 4) = one_hot(3, 0) = 1.0;
  near(cross_entropy_loss({"the", "red", "cup"}, ExpressionDistribution(one_hot), v), 0.0);
  near(cross_entropy_loss({"a", "b"}, ExpressionDistribution(Eigen::MatrixXd::Constant(3, 10, 0.1)), v), std::log(10.0));
  Eigen::MatrixXd two(2, 10);
  two.row(0).setConstant(0.2 / 9);
  two(0, 3) = 0.8;
  two.row(1).setConstant(0.5 / 9);
  two(1, 4) = 0.5;
  near(cross_entropy_loss({"red", "cup"}, ExpressionDistribution(two), v), (-std::log(0.8) - std::log(0.5)) / 2);

  const MeteorConfig exact = MeteorConfig::exact_only();
  near(meteor({"a", "b"}, {"c", "d"}, exact), 0.0);
  near(meteor({"the", "red", "cup"}, {"the", "red", "cup"}), 1.0 - 0.5 / 27.0);
  near(meteor({"the", "green", "glass"}, {"the", "green", "cup"}, exact), 0.625);
  failures += tokenize("The red Cup!") != Expression{"the", "red", "cup"};
  failures += tokenize("cup, on the left") != Expression{"cup", "on", "the", "left"};

  std::mt19937_64 rng(2024);
  const MeteorConfig cfg;
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    const Expression a = testing_oracle::random_sentence(rng, 6);
    const Expression b = testing_oracle::random_sentence(rng, 6);
    const auto o = testing_oracle::brute_force_alignment(a, b, cfg);
    const Alignment al = align(a, b, cfg);
    agree += al.matches == o.matches && al.chunks == o.chunks;
  }
  const double secs = seconds_since(t0);
  report(failures == 0 && agree == 1000 && secs < 5.0, "metric correctness",
         std::to_string(failures) + " example mismatches at 1e-9, alignment oracle agreement " + std::to_string(agree) +
             "/1000, " + fmt(secs) + " s (limit 5 s)");
}

void check_clustering() {
  const auto t0 = std::chrono::steady_clock::now();
  int agree = 0;
  std::vector<int> mismatched;
  for (int seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> cel(0.0, 8.0), met(0.0, 1.0);
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<ScorePair> scores;
    for (int i = 0; i < n; ++i) scores.push_back({cel(rng), met(rng)});
    const std::vector<bool> mask = relevant_mask(scores);

    // Oracle: exhaustive minimum-SSE partition of the normalised features, same relevance rule.
    const Eigen::MatrixX2d f = normalized_features(scores);
    std::vector<int> labels;
    testing_oracle::exhaustive_min_sse(f, &labels);
    Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
    Eigen::Vector2d count = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
      mean.row(labels[static_cast<std::size_t>(i)]) += f.row(i);
      count[labels[static_cast<std::size_t>(i)]] += 1;
    }
    mean.row(0) /= count[0];
    mean.row(1) /= count[1];
    const int rel = mean(1, 0) < mean(0, 0) || (mean(1, 0) == mean(0, 0) && mean(1, 1) > mean(0, 1)) ? 1 : 0;
    bool same = true;
    for (int i = 0; i < n; ++i) same = same && mask[static_cast<std::size_t>(i)] == (labels[static_cast<std::size_t>(i)] == rel);
    if (same) ++agree;
    else mismatched.push_back(seed);
  }
  const double secs = seconds_since(t0);
  std::string seeds;
  for (int s : mismatched) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  report(agree >= 990 && secs < 10.0, "clustering oracle",
         std::to_string(agree) + "/1000 match the exhaustive partition (need 990), " + fmt(secs) +
             " s (limit 10 s); mismatched seeds [" + seeds + "]");
}

std::string breakdown(const BenchmarkReport& r) {
  std::size_t rel = 0, rel_ok = 0, self_ok = 0;
  for (const auto& rec : r.records) {
    rel += rec.requires_relation;
    rel_ok += rec.requires_relation && rec.success;
    self_ok += !rec.requires_relation && rec.success;
  }
  return "self-referential targets " + std::to_string(self_ok) + "/" + std::to_string(r.records.size() - rel) +
         ", relational targets " + std::to_string(rel_ok) + "/" + std::to_string(rel);
}

void dump(const BenchmarkReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  for (const SceneRecord* f : r.failures()) std::ofstream(dir / ("seed-" + std::to_string(f->seed) + ".json")) << f->trace.dump(2);
}

void check_end_to_end(const fs::path& dump_dir) {
  const SeedRange seeds{0, 500};
  const auto t0 = std::chrono::steady_clock::now();
  const BenchmarkReport clean = run_benchmark(BenchmarkConfig::load(kData + "/bench.json"), seeds);
  const BenchmarkReport noisy = run_benchmark(BenchmarkConfig::load(kData + "/bench_noisy.json"), seeds);
  const double secs = seconds_since(t0);
  dump(clean, dump_dir / "noiseless");
  dump(noisy, dump_dir / "noisy");

  bool traces = true;
  for (const auto* r : {&clean, &noisy})
    for (const SceneRecord* f : r->failures()) traces = traces && f->trace.contains("outcome") && f->trace.contains("scene");

  report(clean.successes == clean.records.size(), "end-to-end noiseless accuracy",
         fmt(clean.accuracy) + " (" + std::to_string(clean.successes) + "/500, need 100%); " + breakdown(clean));
  report(noisy.accuracy >= 0.9, "end-to-end noisy accuracy",
         fmt(noisy.accuracy) + " (" + std::to_string(noisy.successes) + "/500, need >= 0.9, sharpness 0.8, paraphrase 0.3); " +
             breakdown(noisy));
  report(traces, "failure traces dumped",
         std::to_string(clean.failures().size() + noisy.failures().size()) + " traces under " + dump_dir.string());
  report(secs < 60.0, "end-to-end runtime", fmt(secs) + " s for 1000 scenes (limit 60 s)");

  bool pairs_ok = true;
  for (const auto& rec : clean.records) pairs_ok = pairs_ok && rec.pairs <= rec.relevant * rec.relevant;
  report(clean.mean_relevant < clean.mean_regions && pairs_ok, "two-stage filter",
         "mean |R'| " + fmt(clean.mean_relevant) + " < mean |R| " + fmt(clean.mean_regions) + ", max pairs " +
             std::to_string(clean.max_pairs) + ", pair bound " + (pairs_ok ? "held" : "violated") + " on every scene");
}

void check_dialog() {
  const BenchmarkConfig cfg = BenchmarkConfig::load(kData + "/dialog.json");
  const SeedRange seeds{0, 200};
  auto paired = [&](UserModel u) {
    const auto obj = simulate_dialog(cfg, seeds, Protocol::object_specific, u);
    const auto base = simulate_dialog(cfg, seeds, Protocol::exhaustive, u);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < obj.records.size(); ++i) {
      a.push_back(base.records[i].questions);
      b.push_back(obj.records[i].questions);
    }
    return std::make_tuple(obj.mean_questions, base.mean_questions, paired_t_test(a, b));
  };
  const auto [co, cb, ct] = paired(UserModel::correcting);
  report(co < cb && ct.p_value < 0.01, "dialog efficiency, correcting user",
         "object-specific " + fmt(co) + " vs exhaustive " + fmt(cb) + " questions over 200 scenes, one-sided paired p = " +
             fmt(ct.p_value, 3));
  const auto [yo, yb, yt] = paired(UserModel::yes_no);
  report(yo <= yb + 1e-12, "dialog efficiency, yes/no user",
         "object-specific " + fmt(yo) + " <= exhaustive " + fmt(yb) + " expected questions");
}

void check_perspective() {
  CorpusConfig cfg;
  int pass = 0;
  double worst_identity = 0.0, worst_aspect = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scene s = generate_scene(cfg, 10000 + seed).first;
    const Scene u = transform_scene(s, "user");
    bool ok = true;
    for (const auto& r : s.regions()) {
      const double id_err = (transform_region(r, s, s.primary_viewpoint()).box.center() - r.box.center()).norm();
      const double asp_err = std::abs(u.at(r.id).box.w / u.at(r.id).box.h - r.box.w / r.box.h);
      worst_identity = std::max(worst_identity, id_err);
      worst_aspect = std::max(worst_aspect, asp_err);
      ok = ok && id_err < 1e-6 && asp_err < 1e-9;
      for (const auto& o : s.regions()) {
        if (r.box.center().x() < o.box.center().x()) ok = ok && u.at(r.id).box.center().x() > u.at(o.id).box.center().x();
      }
    }
    pass += ok;
  }
  report(pass == 100, "perspective geometry",
         std::to_string(pass) + "/100 scenes; worst identity error " + fmt(worst_identity, 3) + " (limit 1e-6), worst aspect error " +
             fmt(worst_aspect, 3) + " (limit 1e-9), x-order reversal checked on every pair");
}

void check_determinism() {
  const SeedRange seeds{0, 100};
  const BenchmarkConfig bench = BenchmarkConfig::load(kData + "/bench_noisy.json");
  const bool bench_same = run_benchmark(bench, seeds).to_json().dump() == run_benchmark(bench, seeds).to_json().dump();
  const BenchmarkConfig dlg = BenchmarkConfig::load(kData + "/dialog.json");
  const bool dialog_same = simulate_dialog(dlg, seeds, Protocol::object_specific, UserModel::correcting).to_json().dump() ==
                           simulate_dialog(dlg, seeds, Protocol::object_specific, UserModel::correcting).to_json().dump();

  // Service transcripts: drive a journaled store, then replay the journal.
  const fs::path journal = fs::temp_directory_path() / "refground_acceptance_journal.jsonl";
  fs::remove(journal);
  std::vector<json> views;
  {
    std::int64_t t = 0;
    SessionStore store({}, [&t] { return ++t; }, journal);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto [scene, truth] = generate_scene(dlg.corpus, seed);
      const std::string id = store.create_session(scene_to_json(scene));
      json v = store.submit_instruction(id, truth.utterance.text());
      views.push_back(v);
      while (v.at("kind") == "question") {
        v = store.submit_response(id, v.at("target") == truth.target_id ? "yes" : "no");
        views.push_back(v);
      }
    }
  }
  std::ifstream in(journal);
  const ReplayResult replay = replay_journal(in);
  const bool replay_same = replay.mismatches == 0 && replay.views == views;
  fs::remove(journal);
  report(bench_same && dialog_same && replay_same, "determinism and replay",
         std::string("bench report ") + (bench_same ? "identical" : "differs") + ", dialog report " +
             (dialog_same ? "identical" : "differs") + ", journal replay of " + std::to_string(replay.operations) +
             " operations with " + std::to_string(replay.mismatches) + " mismatched views");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dump_dir = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "refground_failures";
  const std::vector<std::function<void()>> checks = {check_metrics,  check_clustering,  [&] { check_end_to_end(dump_dir); },
                                                     check_dialog,   check_perspective, check_determinism};
  for (const auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(false, "internal error", e.what());
    }
  }
  std::cout << (g_failed == 0 ? "all criteria passed" : std::to_string(g_failed) + " criteria failed") << std::endl;
  return g_failed == 0 ? 0 : 1;
}
