#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "gridcross/config.hpp"
#include "gridcross/error.hpp"
#include "gridcross/experiment.hpp"
#include "gridcross/metrics.hpp"
#include "gridcross/sim.hpp"
#include "gridcross/trace_io.hpp"

namespace fs = std::filesystem;
using namespace gridcross;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

struct Common {
  std::string config;
  std::string out;
  std::string topology;
  bool no_left = false;
};

SimConfig load_config(const Common& c) {
  SimConfig cfg = c.config.empty() ? SimConfig::defaults() : SimConfig::load(c.config);
  if (c.no_left) cfg.traffic.left_turns = false;
  if (!c.topology.empty()) cfg.auction.topology = Topology::parse(c.topology);
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InvalidConfiguration("--out", "cannot create directory " + dir);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InvalidConfiguration("--out", "cannot write " + p.string());
  os << text;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  auto number = [](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-') throw InvalidConfiguration("--seeds", "bad seed '" + s + "'");
    return static_cast<std::uint64_t>(v);
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const auto lo = number(item.substr(0, dash));
    const auto hi = number(item.substr(dash + 1));
    if (hi < lo) throw InvalidConfiguration("--seeds", "empty range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw InvalidConfiguration("--seeds", "no seeds given");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw InvalidConfiguration("--seeds", "seeds must be distinct");
  return seeds;
}

int cmd_run(const Common& c, std::optional<std::uint64_t> seed, std::optional<int> target, bool qp_dump) {
  SimConfig cfg = load_config(c);
  if (seed) cfg.run.seed = *seed;
  if (target) cfg.run.target_completed = *target;
  cfg.validate();
  ensure_dir(c.out);
  const fs::path out(c.out);
  std::ofstream dump;
  if (qp_dump) dump.open(out / "qp_dump.jsonl", std::ios::binary);
  const RunResult res = run(cfg, qp_dump ? &dump : nullptr);
  write_file(out / "config.json", cfg.to_json());
  write_file(out / "trace.csv", trace_csv(res.trace));
  const Summary s = summarize(res.trace, cfg.mpc.min_distance);
  write_file(out / "summary.json", summary_json(s));
  std::printf("seed=%llu ticks=%ld injected=%d completed=%d avg_speed_kmh=%.3f avg_accel_mps2=%.5f "
              "violations=%d infeasible=%d%s\n",
              static_cast<unsigned long long>(cfg.run.seed), res.stats.ticks, res.stats.injected,
              res.stats.completed, s.avg_speed_kmh, s.avg_accel, s.violations, res.stats.infeasible,
              res.stats.incomplete ? " incomplete" : "");
  return kOk;
}

int cmd_analyze(const Common& c, const std::string& trace_path) {
  const SimConfig cfg = load_config(c);
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot open trace %s\n", trace_path.c_str());
    return kUsage;
  }
  Trace trace;
  try {
    trace = read_trace_csv(in);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  ensure_dir(c.out);
  const fs::path out(c.out);
  const RoadNetwork net = RoadNetwork::build_grid(cfg.grid);
  std::ofstream series(out / "series.csv", std::ios::binary);
  write_series_csv(series, all_series(trace));
  std::ofstream cells(out / "cells.csv", std::ios::binary);
  write_cells_csv(cells, cell_averages(trace, 2.5, net.width(), net.height()));
  const Summary s = summarize(trace, cfg.mpc.min_distance);
  write_file(out / "summary.json", summary_json(s));
  std::printf("samples=%ld vehicles=%d completed=%d avg_speed_kmh=%.3f avg_accel_mps2=%.5f violations=%d\n",
              s.samples, s.vehicles, s.completed, s.avg_speed_kmh, s.avg_accel, s.violations);
  return kOk;
}

int cmd_compare(const Common& c, const std::string& seeds_text) {
  const SimConfig cfg = load_config(c);
  const auto seeds = parse_seeds(seeds_text);
  ensure_dir(c.out);
  const TurnComparison cmp = compare_turns(cfg, seeds);
  write_file(fs::path(c.out) / "comparison.json", comparison_json(cmp));
  for (const auto& p : cmp.pairs)
    std::printf("seed=%llu with_left_kmh=%.3f without_left_kmh=%.3f delta_kmh=%+.3f\n",
                static_cast<unsigned long long>(p.seed), p.with_left.avg_speed_kmh,
                p.without_left.avg_speed_kmh, p.without_left.avg_speed_kmh - p.with_left.avg_speed_kmh);
  std::printf("pooled with_left_kmh=%.3f without_left_kmh=%.3f delta_kmh=%+.3f\n", cmp.with_left.avg_speed_kmh,
              cmp.without_left.avg_speed_kmh, cmp.without_left.avg_speed_kmh - cmp.with_left.avg_speed_kmh);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  CLI::App app{"Grid intersection traffic simulator with auction-based crossing priorities"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  Common run_opts, an_opts, cmp_opts;
  std::optional<std::uint64_t> seed;
  std::optional<int> target;
  bool qp_dump = false;
  auto* run_cmd = app.add_subcommand("run", "Simulate and write trace.csv, summary.json, config.json");
  run_cmd->add_option("--config", run_opts.config, "JSON configuration file")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "RNG seed (overrides the config)");
  run_cmd->add_option("--target", target, "Completed-vehicle target (overrides the config)");
  run_cmd->add_option("--out", run_opts.out, "Output directory")->required();
  run_cmd->add_flag("--no-left-turns", run_opts.no_left, "Forbid left turns");
  run_cmd->add_option("--topology", run_opts.topology, "complete or disk:<radius>");
  run_cmd->add_flag("--qp-dump", qp_dump, "Write per-solve records to qp_dump.jsonl");

  std::string trace_path;
  auto* an_cmd = app.add_subcommand("analyze", "Compute series.csv, cells.csv, summary.json from a trace");
  an_cmd->add_option("trace", trace_path, "Trace CSV")->required();
  an_cmd->add_option("--config", an_opts.config, "Configuration used for the run")->check(CLI::ExistingFile);
  an_cmd->add_option("--out", an_opts.out, "Output directory")->required();

  std::string seeds_text;
  auto* cmp_cmd = app.add_subcommand("compare-turns", "Paired runs with and without left turns");
  cmp_cmd->add_option("--config", cmp_opts.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--seeds", seeds_text, "Seeds, e.g. 1,2,5-9")->required();
  cmp_cmd->add_option("--out", cmp_opts.out, "Output directory")->required();
  cmp_cmd->add_option("--topology", cmp_opts.topology, "complete or disk:<radius>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*run_cmd) return cmd_run(run_opts, seed, target, qp_dump);
    if (*an_cmd) return cmd_analyze(an_opts, trace_path);
    if (*cmp_cmd) return cmd_compare(cmp_opts, seeds_text);
  } catch (const InvalidConfiguration& e) {
    std::fprintf(stderr, "error: invalid configuration: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
  return kUsage;
}
