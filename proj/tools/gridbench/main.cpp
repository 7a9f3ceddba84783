#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridbench/bench/campaign.hpp"
#include "gridbench/bench/config.hpp"
#include "gridbench/bench/report.hpp"
#include "gridbench/radio/metrics.hpp"

namespace {

// exit codes: 0 ok, 1 threshold violation, 2 usage/config/backend trouble
constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::optional<gridbench::bench::CampaignConfig> load_config(
    const std::string& path) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read config file: " << path << "\n";
    return std::nullopt;
  }
  auto parsed = gridbench::bench::parse_config(*text);
  if (!parsed) {
    std::cerr << "config error ("
              << gridbench::bench::config_error_name(parsed.error()) << "): "
              << parsed.error_detail() << "\n";
    return std::nullopt;
  }
  return std::move(parsed).take();
}

struct RunOverrides {
  std::string backend;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string phases;
};

// --seed beats GRIDBENCH_SEED beats the config file.
bool apply_overrides(gridbench::bench::CampaignConfig& cfg,
                     const RunOverrides& ov) {
  using namespace gridbench::bench;
  if (ov.backend == "virtual") cfg.backend = Backend::Virtual;
  else if (ov.backend == "sockets") cfg.backend = Backend::Sockets;
  else if (!ov.backend.empty()) {
    std::cerr << "error: --backend expects virtual|sockets\n";
    return false;
  }
  if (ov.scenario == "isolated") cfg.scenario = Scenario::Isolated;
  else if (ov.scenario == "simultaneous") cfg.scenario = Scenario::Simultaneous;
  else if (!ov.scenario.empty()) {
    std::cerr << "error: --scenario expects isolated|simultaneous\n";
    return false;
  }
  if (ov.seed) {
    cfg.seed = *ov.seed;
  } else if (const char* env = std::getenv("GRIDBENCH_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      std::cerr << "error: GRIDBENCH_SEED is not an integer: " << env << "\n";
      return false;
    }
    cfg.seed = v;
  }
  if (!ov.phases.empty()) {
    cfg.phase_throughput = cfg.phase_echo = cfg.phase_app = false;
    std::stringstream ss(ov.phases);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part == "t") cfg.phase_throughput = true;
      else if (part == "e") cfg.phase_echo = true;
      else if (part == "a") cfg.phase_app = true;
      else {
        std::cerr << "error: --phases expects a subset of t,e,a\n";
        return false;
      }
    }
  }
  if (cfg.scenario == Scenario::Simultaneous &&
      cpe_nodes(cfg).size() < 2) {
    std::cerr << "error: simultaneous scenario requires at least 2 cpe nodes\n";
    return false;
  }
  return true;
}

int cmd_run(const std::string& config_path, const RunOverrides& ov,
            const std::string& out_dir) {
  auto cfg = load_config(config_path);
  if (!cfg) return kUsage;
  if (!apply_overrides(*cfg, ov)) return kUsage;

  gridbench::bench::CampaignReport report;
  try {
    report = gridbench::bench::run_campaign(*cfg);
  } catch (const gridbench::bench::CampaignRunError& e) {
    std::cerr << "backend unavailable: " << e.what() << "\n";
    return kUsage;
  }

  std::vector<std::string> paths;
  try {
    paths = gridbench::bench::emit_report(report, out_dir);
  } catch (const gridbench::bench::ReportWriteError& e) {
    std::cerr << "report write failed: " << e.what() << "\n";
    return kUsage;
  }

  std::cout << gridbench::bench::render_summary(report);
  std::cout << "\nwall runtime: " << report.wall_seconds << " s\n";
  std::cout << "report files:\n";
  for (const std::string& p : paths) std::cout << "  " << p << "\n";
  return report.violations.empty() ? kOk : kViolation;
}

int cmd_coverage(const std::string& config_path, const std::string& out_path) {
  auto cfg = load_config(config_path);
  if (!cfg) return kUsage;
  if (!cfg->radio.enabled) {
    std::cerr << "error: config has no [radio] section\n";
    return kUsage;
  }
  gridbench::radio::CoverageMap map;
  try {
    map = gridbench::bench::campaign_coverage(*cfg);
  } catch (const gridbench::radio::RadioError& e) {
    std::cerr << "coverage error: " << e.what() << "\n";
    return kUsage;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << gridbench::bench::render_coverage_raster_csv(map);
  out.close();
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kUsage;
  }
  std::cout << "raster: " << map.nx << " x " << map.ny << " cells -> "
            << out_path << "\n";
  std::cout << gridbench::bench::render_coverage_points_csv(map);
  return kOk;
}

int cmd_validate_metrics(const std::string& csv_path) {
  const auto text = read_file(csv_path);
  if (!text) {
    std::cerr << "error: cannot read " << csv_path << "\n";
    return kUsage;
  }
  std::vector<gridbench::radio::RadioMetricSample> samples;
  std::istringstream in(*text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.find("rssi") != std::string::npos) continue;  // header
    gridbench::radio::RadioMetricSample s{};
    char trailing = 0;
    const int n = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf%c", &s.t_s,
                              &s.rssi_dbm, &s.rsrp_dbm, &s.rsrq_db, &s.sinr_db,
                              &trailing);
    if (n < 5 || (n == 6 && trailing != '\r')) {
      std::cerr << "error: line " << lineno
                << ": expected t_s,rssi_dbm,rsrp_dbm,rsrq_db,sinr_db\n";
      return kUsage;
    }
    samples.push_back(s);
  }
  const auto violations = gridbench::radio::validate_metric_series(samples);
  std::cout << samples.size() << " samples, " << violations.size()
            << " violations\n";
  for (const auto& v : violations)
    std::cout << "sample " << v.index << ": " << v.reason << "\n";
  return violations.empty() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale grid telemetry network benchmark"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path = "raster.csv";
  std::string csv_path;
  RunOverrides ov;
  std::uint64_t seed_arg = 0;

  CLI::App* run = app.add_subcommand("run", "execute a campaign");
  run->add_option("config", config_path, "campaign config file")->required();
  run->add_option("--backend", ov.backend, "virtual|sockets");
  run->add_option("--scenario", ov.scenario, "isolated|simultaneous");
  CLI::Option* seed_opt = run->add_option("--seed", seed_arg, "rng seed");
  run->add_option("--out", out_dir, "report directory (default: out)");
  run->add_option("--phases", ov.phases, "subset of t,e,a");

  CLI::App* coverage = app.add_subcommand("coverage", "emit a coverage raster");
  coverage->add_option("config", config_path, "campaign config file")->required();
  coverage->add_option("--out", out_path, "raster csv path")->required();

  CLI::App* validate =
      app.add_subcommand("validate-metrics", "check a metric series csv");
  validate->add_option("csv", csv_path, "metric samples csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (seed_opt->count() > 0) ov.seed = seed_arg;
  if (run->parsed()) return cmd_run(config_path, ov, out_dir);
  if (coverage->parsed()) return cmd_coverage(config_path, out_path);
  return cmd_validate_metrics(csv_path);
}
