// SPDX-License-Identifier: Apache-2.0
// refground: command-line front end for grounding, benchmarks and the session service.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "refground/config.hpp"
#include "refground/corpus.hpp"
#include "refground/error.hpp"
#include "refground/eval.hpp"
#include "refground/http_server.hpp"
#include "refground/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace refground;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

EngineOptions engine_from(const std::string& path) {
  return path.empty() ? EngineOptions{} : load_engine_options(path);
}

void dump_failures(const BenchmarkReport& report, const std::string& dir) {
  if (dir.empty()) return;
  for (const SceneRecord* r : report.failures())
    write_file(fs::path(dir) / ("failure-" + std::to_string(r->seed) + ".json"), r->trace.dump(2) + "\n");
}

void print_summary(const BenchmarkReport& r) {
  std::cout << r.kind << " seeds " << r.seeds.to_string() << ": accuracy " << r.accuracy << " (" << r.successes << "/"
            << r.records.size() << ", 95% CI " << r.ci_low << ".." << r.ci_high << "), mean questions "
            << r.mean_questions << ", mean regions " << r.mean_regions << ", mean relevant " << r.mean_relevant
            << "\n";
}

HttpServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive referring-expression grounding"};
  app.require_subcommand(1);

  std::string scene_path, say, perspective = "auto", engine_path;
  auto* ground_cmd = app.add_subcommand("ground", "Ground one utterance in a scene file");
  ground_cmd->add_option("--scene", scene_path, "Scene JSON file")->required();
  ground_cmd->add_option("--say", say, "Utterance")->required();
  ground_cmd->add_option("--perspective", perspective, "Perspective handling")->check(CLI::IsMember({"auto", "off"}));
  ground_cmd->add_option("--config", engine_path, "Engine config JSON");

  std::string bench_path, seeds_text, out_path, dump_dir;
  auto* bench_cmd = app.add_subcommand("bench", "Grounding accuracy over a synthetic corpus");
  bench_cmd->add_option("--config", bench_path, "Benchmark config JSON")->required();
  bench_cmd->add_option("--seeds", seeds_text, "Seed range A..B (B excluded)")->required();
  bench_cmd->add_option("--out", out_path, "Report file")->required();
  bench_cmd->add_option("--dump-dir", dump_dir, "Directory for failure traces");

  std::string protocol = "object-specific", user = "correcting";
  auto* sim_cmd = app.add_subcommand("dialog-sim", "Simulated disambiguation dialogs");
  sim_cmd->add_option("--protocol", protocol, "object-specific, exhaustive or both")
      ->check(CLI::IsMember({"object-specific", "exhaustive", "exhaustive-baseline", "both"}));
  sim_cmd->add_option("--user", user, "Simulated user")->check(CLI::IsMember({"yes-no", "correcting"}));
  sim_cmd->add_option("--config", bench_path, "Benchmark config JSON (ambiguous corpus)")->required();
  sim_cmd->add_option("--seeds", seeds_text, "Seed range A..B (B excluded)")->required();
  sim_cmd->add_option("--out", out_path, "Report file")->required();
  sim_cmd->add_option("--dump-dir", dump_dir, "Directory for failure traces");

  std::string host = "127.0.0.1", journal_path;
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--config", engine_path, "Engine config JSON");
  serve_cmd->add_option("--journal", journal_path, "Append-only request journal");

  std::uint64_t seed = 0;
  auto* gen_cmd = app.add_subcommand("generate", "Write one synthetic scene and its ground truth");
  gen_cmd->add_option("--config", bench_path, "Benchmark config JSON (corpus section used)");
  gen_cmd->add_option("--seed", seed, "Scene seed")->required();
  gen_cmd->add_option("--out", out_path, "Scene file")->required();

  auto* replay_cmd = app.add_subcommand("replay", "Re-run a service journal and verify its outcome views");
  replay_cmd->add_option("--journal", journal_path, "Journal file")->required();
  replay_cmd->add_option("--config", engine_path, "Engine config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*ground_cmd) {
      EngineOptions engine = engine_from(engine_path);
      engine.perspective.enabled = perspective == "auto";
      const Scene scene = load_scene(read_file(scene_path));
      std::cout << to_json(ground(scene, std::string_view(say), engine)).dump(2) << "\n";
    } else if (*bench_cmd) {
      const BenchmarkConfig cfg = BenchmarkConfig::load(bench_path);
      const BenchmarkReport report = run_benchmark(cfg, SeedRange::parse(seeds_text));
      write_file(out_path, report.to_json().dump(2) + "\n");
      dump_failures(report, dump_dir);
      print_summary(report);
    } else if (*sim_cmd) {
      const BenchmarkConfig cfg = BenchmarkConfig::load(bench_path);
      const SeedRange seeds = SeedRange::parse(seeds_text);
      const UserModel u = parse_user_model(user);
      if (protocol == "both") {
        const BenchmarkReport obj = simulate_dialog(cfg, seeds, Protocol::object_specific, u);
        const BenchmarkReport base = simulate_dialog(cfg, seeds, Protocol::exhaustive, u);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < obj.records.size(); ++i) {
          a.push_back(base.records[i].questions);
          b.push_back(obj.records[i].questions);
        }
        const PairedTest t = paired_t_test(a, b);
        const json out = {{"object_specific", obj.to_json()},
                          {"exhaustive", base.to_json()},
                          {"paired_test",
                           {{"n", t.n}, {"mean_difference", t.mean_difference}, {"sd", t.sd}, {"t", t.t}, {"p_value", t.p_value}}}};
        write_file(out_path, out.dump(2) + "\n");
        dump_failures(obj, dump_dir);
        print_summary(obj);
        print_summary(base);
        std::cout << "paired difference (exhaustive - object-specific): " << t.mean_difference << ", p = " << t.p_value << "\n";
      } else {
        const BenchmarkReport report = simulate_dialog(cfg, seeds, parse_protocol(protocol), u);
        write_file(out_path, report.to_json().dump(2) + "\n");
        dump_failures(report, dump_dir);
        print_summary(report);
      }
    } else if (*serve_cmd) {
      std::optional<fs::path> journal;
      if (!journal_path.empty()) journal = journal_path;
      SessionStore store(engine_from(engine_path), wall_clock_ms, journal);
      HttpServer server(store);
      g_server = &server;
      std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
      });
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    } else if (*gen_cmd) {
      const BenchmarkConfig cfg = bench_path.empty() ? BenchmarkConfig{} : BenchmarkConfig::load(bench_path);
      const auto [scene, truth] = generate_scene(cfg.corpus, seed);
      write_file(out_path, save_scene(scene));
      const json t = {{"target", truth.target_id},
                      {"utterance", truth.utterance.text()},
                      {"requires_relation", truth.requires_relation},
                      {"group", truth.group}};
      std::cout << t.dump() << "\n";
    } else if (*replay_cmd) {
      std::ifstream in(journal_path);
      if (!in) throw ConfigError("cannot open " + journal_path);
      const ReplayResult r = replay_journal(in, engine_from(engine_path));
      std::cout << r.operations << " operations, " << r.mismatches << " mismatched views\n";
      return r.mismatches == 0 ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
