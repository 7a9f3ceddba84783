#include "gridbench/bench/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace gridbench::bench {

const char* config_error_name(ConfigError e) {
  switch (e) {
    case ConfigError::SyntaxError: return "SyntaxError";
    case ConfigError::UnknownKey: return "UnknownKey";
    case ConfigError::InvalidValue: return "InvalidValue";
    case ConfigError::MissingRequired: return "MissingRequired";
  }
  return "unknown";
}

const char* backend_name(Backend b) {
  return b == Backend::Virtual ? "virtual" : "sockets";
}
const char* scenario_name(Scenario s) {
  return s == Scenario::Isolated ? "isolated" : "simultaneous";
}
const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    case Direction::Both: return "both";
  }
  return "unknown";
}
const char* transport_choice_name(TransportChoice t) {
  switch (t) {
    case TransportChoice::Tcp: return "tcp";
    case TransportChoice::Udp: return "udp";
    case TransportChoice::Both: return "both";
  }
  return "unknown";
}

namespace {

using ParseFail = Failure<ConfigError>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct KeyLine {
  int line;
  std::string key;
  std::string value;
};

struct Section {
  int line;
  std::string kind;  // "campaign", "node", "plan", ...
  std::string name;  // node name ("" elsewhere)
  std::vector<KeyLine> keys;
};

std::string at_line(int line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

// Raw split into sections; only syntax is checked here.
Result<std::vector<Section>, ConfigError> split_sections(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        return ParseFail{ConfigError::SyntaxError,
                         at_line(line, "unterminated section header")};
      const std::string inside = trim(s.substr(1, s.size() - 2));
      if (inside.empty())
        return ParseFail{ConfigError::SyntaxError,
                         at_line(line, "empty section header")};
      const auto sp = inside.find_first_of(" \t");
      Section sec;
      sec.line = line;
      if (sp == std::string::npos) {
        sec.kind = inside;
      } else {
        sec.kind = inside.substr(0, sp);
        sec.name = trim(inside.substr(sp));
      }
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      return ParseFail{ConfigError::SyntaxError,
                       at_line(line, "expected `key = value` or a [section]")};
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      return ParseFail{ConfigError::SyntaxError, at_line(line, "empty key")};
    if (sections.empty())
      return ParseFail{ConfigError::SyntaxError,
                       at_line(line, "key before any [section]")};
    sections.back().keys.push_back(KeyLine{line, key, value});
  }
  return sections;
}

// ---- typed value parsers; every failure is InvalidValue at the line ----

Result<double, ConfigError> parse_f64(const KeyLine& kv) {
  const char* begin = kv.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (kv.value.empty() || end != begin + kv.value.size() || !std::isfinite(v))
    return ParseFail{ConfigError::InvalidValue,
                     at_line(kv.line, kv.key + ": not a number: `" + kv.value + "`")};
  return v;
}

Result<std::uint64_t, ConfigError> parse_u64(const KeyLine& kv) {
  if (kv.value.empty() || kv.value[0] == '-' ||
      kv.value.find_first_not_of("0123456789") != std::string::npos)
    return ParseFail{ConfigError::InvalidValue,
                     at_line(kv.line, kv.key + ": not a non-negative integer: `" +
                                          kv.value + "`")};
  errno = 0;
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(kv.value.c_str(), &end, 10);
  if (errno == ERANGE)
    return ParseFail{ConfigError::InvalidValue,
                     at_line(kv.line, kv.key + ": integer out of range")};
  return v;
}

Result<bool, ConfigError> parse_bool(const KeyLine& kv) {
  if (kv.value == "true") return true;
  if (kv.value == "false") return false;
  return ParseFail{ConfigError::InvalidValue,
                   at_line(kv.line, kv.key + ": expected true or false")};
}

Result<telemetry::RecordKind, ConfigError> parse_kind(const KeyLine& kv) {
  if (kv.value == "arm_log") return telemetry::RecordKind::ArmLog;
  if (kv.value == "cei_aci") return telemetry::RecordKind::CeiAci;
  if (kv.value == "pq_log") return telemetry::RecordKind::PqLog;
  return ParseFail{ConfigError::InvalidValue,
                   at_line(kv.line, kv.key + ": expected arm_log|cei_aci|pq_log")};
}

// Positive-range helper shared by the many "> 0" checks.
Result<double, ConfigError> parse_positive(const KeyLine& kv) {
  auto v = parse_f64(kv);
  if (!v) return v;
  if (v.value() <= 0.0)
    return ParseFail{ConfigError::InvalidValue,
                     at_line(kv.line, kv.key + " must be > 0")};
  return v;
}

ParseFail unknown_key(const std::string& section, const KeyLine& kv) {
  return ParseFail{ConfigError::UnknownKey,
                   at_line(kv.line, "unknown key `" + kv.key + "` in [" +
                                        section + "]")};
}

Result<bool, ConfigError> check_duplicates(const Section& sec) {
  std::set<std::string> seen;
  for (const KeyLine& kv : sec.keys)
    if (!seen.insert(kv.key).second)
      return ParseFail{ConfigError::InvalidValue,
                       at_line(kv.line, "duplicate key `" + kv.key + "`")};
  return true;
}

std::optional<ParseFail> apply_campaign(const Section& sec, CampaignConfig& cfg) {
  for (const KeyLine& kv : sec.keys) {
    if (kv.key == "seed") {
      auto v = parse_u64(kv);
      if (!v) return v.failure();
      cfg.seed = v.value();
    } else if (kv.key == "backend") {
      if (kv.value == "virtual") cfg.backend = Backend::Virtual;
      else if (kv.value == "sockets") cfg.backend = Backend::Sockets;
      else
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "backend: expected virtual|sockets")};
    } else if (kv.key == "scenario") {
      if (kv.value == "isolated") cfg.scenario = Scenario::Isolated;
      else if (kv.value == "simultaneous") cfg.scenario = Scenario::Simultaneous;
      else
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line,
                                 "scenario: expected isolated|simultaneous")};
    } else if (kv.key == "duration_s") {
      auto v = parse_positive(kv);
      if (!v) return v.failure();
      cfg.app_duration_s = v.value();
    } else if (kv.key == "phases") {
      cfg.phase_throughput = cfg.phase_echo = cfg.phase_app = false;
      std::stringstream ss(kv.value);
      std::string part;
      bool any = false;
      while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part == "t") cfg.phase_throughput = true;
        else if (part == "e") cfg.phase_echo = true;
        else if (part == "a") cfg.phase_app = true;
        else
          return ParseFail{ConfigError::InvalidValue,
                           at_line(kv.line, "phases: expected subset of t,e,a")};
        any = true;
      }
      if (!any)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "phases: empty list")};
    } else if (kv.key == "cell_pool_up_bps") {
      auto v = parse_positive(kv);
      if (!v) return v.failure();
      cfg.cell_pool_up_bps = v.value();
    } else if (kv.key == "trace") {
      auto v = parse_bool(kv);
      if (!v) return v.failure();
      cfg.trace = v.value();
    } else {
      return unknown_key("campaign", kv);
    }
  }
  return std::nullopt;
}

std::optional<ParseFail> apply_node(const Section& sec, CampaignConfig& cfg) {
  if (sec.name.empty())
    return ParseFail{ConfigError::SyntaxError,
                     at_line(sec.line, "node section needs a name: [node NAME]")};
  if (sec.name.find_first_of(" \t,/") != std::string::npos)
    return ParseFail{ConfigError::InvalidValue,
                     at_line(sec.line, "node name must be a single plain token")};
  for (const NodeConfig& existing : cfg.nodes)
    if (existing.name == sec.name)
      return ParseFail{ConfigError::InvalidValue,
                       at_line(sec.line, "duplicate node `" + sec.name + "`")};

  NodeConfig node;
  node.name = sec.name;
  // Role first: it decides the radio defaults the other keys override.
  for (const KeyLine& kv : sec.keys) {
    if (kv.key != "role") continue;
    if (kv.value == "hub") {
      node.is_hub = true;
      node.antenna_height_m = 25.0;  // mast
      node.tx_power_dbm = 35.0;
      node.antenna_gain_dbi = 4.0;
    } else if (kv.value != "cpe") {
      return ParseFail{ConfigError::InvalidValue,
                       at_line(kv.line, "role: expected hub|cpe")};
    }
  }

  for (const KeyLine& kv : sec.keys) {
    auto set_f64 = [&](double& slot) -> std::optional<ParseFail> {
      auto v = parse_f64(kv);
      if (!v) return v.failure();
      slot = v.value();
      return std::nullopt;
    };
    auto set_pos = [&](double& slot) -> std::optional<ParseFail> {
      auto v = parse_positive(kv);
      if (!v) return v.failure();
      slot = v.value();
      return std::nullopt;
    };
    std::optional<ParseFail> fail;
    if (kv.key == "role") continue;
    else if (kv.key == "source_id") {
      auto v = parse_u64(kv);
      if (!v) return v.failure();
      if (v.value() < 1 || v.value() > 3)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "source_id must be 1..3")};
      node.source_id = static_cast<std::uint8_t>(v.value());
    } else if (kv.key == "x_m") fail = set_f64(node.x_m);
    else if (kv.key == "y_m") fail = set_f64(node.y_m);
    else if (kv.key == "antenna_height_m") fail = set_pos(node.antenna_height_m);
    else if (kv.key == "tx_power_dbm") fail = set_f64(node.tx_power_dbm);
    else if (kv.key == "antenna_gain_dbi") fail = set_f64(node.antenna_gain_dbi);
    else if (kv.key == "sinr_db") fail = set_f64(node.profile.sinr_db);
    else if (kv.key == "loss_k") fail = set_pos(node.profile.loss_k);
    else if (kv.key == "loss_theta_db") fail = set_f64(node.profile.loss_theta_db);
    else if (kv.key == "base_delay_ms") {
      fail = set_f64(node.profile.base_delay_ms);
      if (!fail && node.profile.base_delay_ms < 0)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "base_delay_ms must be >= 0")};
    } else if (kv.key == "jitter_ms") {
      fail = set_f64(node.profile.jitter_ms);
      if (!fail && node.profile.jitter_ms < 0)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "jitter_ms must be >= 0")};
    } else if (kv.key == "rate_up_bps") fail = set_pos(node.profile.rate_up_bps);
    else if (kv.key == "rate_down_bps") fail = set_pos(node.profile.rate_down_bps);
    else if (kv.key == "reorder_prob") {
      fail = set_f64(node.profile.reorder_prob);
      if (!fail && (node.profile.reorder_prob < 0 || node.profile.reorder_prob > 1))
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "reorder_prob must be in [0, 1]")};
    } else if (kv.key == "queue_frames") {
      auto v = parse_u64(kv);
      if (!v) return v.failure();
      if (v.value() < 1 || v.value() > 1'000'000)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "queue_frames must be in [1, 1e6]")};
      node.profile.queue_frames = static_cast<std::uint32_t>(v.value());
    } else if (kv.key == "bucket_bytes") fail = set_pos(node.profile.bucket_bytes);
    else return unknown_key("node " + sec.name, kv);
    if (fail) return fail;
  }
  cfg.nodes.push_back(std::move(node));
  return std::nullopt;
}

std::optional<ParseFail> apply_plan(const Section& sec, CampaignConfig& cfg) {
  auto period = [&](const KeyLine& kv,
                    std::int64_t& slot) -> std::optional<ParseFail> {
    auto v = parse_positive(kv);
    if (!v) return v.failure();
    slot = std::llround(v.value() * 1e6);
    return std::nullopt;
  };
  for (const KeyLine& kv : sec.keys) {
    std::optional<ParseFail> fail;
    if (kv.key == "transport") {
      if (kv.value == "tcp") cfg.transport = TransportChoice::Tcp;
      else if (kv.value == "udp") cfg.transport = TransportChoice::Udp;
      else if (kv.value == "both") cfg.transport = TransportChoice::Both;
      else
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "transport: expected tcp|udp|both")};
    } else if (kv.key == "d1_kind") {
      auto v = parse_kind(kv);
      if (!v) return v.failure();
      cfg.plan.d1_kind = v.value();
    } else if (kv.key == "d2_kind") {
      auto v = parse_kind(kv);
      if (!v) return v.failure();
      cfg.plan.d2_kind = v.value();
    } else if (kv.key == "d3_kind") {
      auto v = parse_kind(kv);
      if (!v) return v.failure();
      cfg.plan.d3_kind = v.value();
    } else if (kv.key == "d1_period_s") fail = period(kv, cfg.plan.d1_period_us);
    else if (kv.key == "d2_period_s") fail = period(kv, cfg.plan.d2_period_us);
    else if (kv.key == "d3_period_s") fail = period(kv, cfg.plan.d3_period_us);
    else if (kv.key == "jitter_s") {
      auto v = parse_f64(kv);
      if (!v) return v.failure();
      if (v.value() < 0)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "jitter_s must be >= 0")};
      cfg.plan.jitter_us = std::llround(v.value() * 1e6);
    } else if (kv.key == "allow_any_period") {
      auto v = parse_bool(kv);
      if (!v) return v.failure();
      cfg.plan.allow_any_period = v.value();
    } else {
      return unknown_key("plan", kv);
    }
    if (fail) return fail;
  }
  return std::nullopt;
}

std::optional<ParseFail> apply_probe(const Section& sec, CampaignConfig& cfg) {
  for (const KeyLine& kv : sec.keys) {
    if (kv.key == "count") {
      auto v = parse_u64(kv);
      if (!v) return v.failure();
      if (v.value() < 1)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "count must be >= 1")};
      cfg.probe.count = v.value();
    } else if (kv.key == "interval_ms") {
      auto v = parse_positive(kv);
      if (!v) return v.failure();
      cfg.probe.interval_ms = v.value();
    } else if (kv.key == "pad_bytes") {
      auto v = parse_u64(kv);
      if (!v) return v.failure();
      if (v.value() > 32768)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "pad_bytes must be <= 32768")};
      cfg.probe.pad_bytes = static_cast<std::uint16_t>(v.value());
    } else if (kv.key == "timeout_ms") {
      auto v = parse_positive(kv);
      if (!v) return v.failure();
      cfg.probe.timeout_ms = v.value();
    } else {
      return unknown_key("probe", kv);
    }
  }
  return std::nullopt;
}

std::optional<ParseFail> apply_throughput(const Section& sec, CampaignConfig& cfg) {
  for (const KeyLine& kv : sec.keys) {
    if (kv.key == "duration_s") {
      auto v = parse_positive(kv);
      if (!v) return v.failure();
      cfg.throughput.duration_s = v.value();
    } else if (kv.key == "datagram_bytes") {
      auto v = parse_u64(kv);
      if (!v) return v.failure();
      if (v.value() < 1 || v.value() > 32768)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "datagram_bytes must be in [1, 32768]")};
      cfg.throughput.datagram_bytes = static_cast<std::size_t>(v.value());
    } else if (kv.key == "directions") {
      if (kv.value == "up") cfg.throughput.directions = Direction::Up;
      else if (kv.value == "down") cfg.throughput.directions = Direction::Down;
      else if (kv.value == "both") cfg.throughput.directions = Direction::Both;
      else
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "directions: expected up|down|both")};
    } else {
      return unknown_key("throughput", kv);
    }
  }
  return std::nullopt;
}

std::optional<ParseFail> apply_radio(const Section& sec, CampaignConfig& cfg) {
  cfg.radio.enabled = true;
  for (const KeyLine& kv : sec.keys) {
    std::optional<ParseFail> fail;
    auto set_pos = [&](double& slot) -> std::optional<ParseFail> {
      auto v = parse_positive(kv);
      if (!v) return v.failure();
      slot = v.value();
      return std::nullopt;
    };
    if (kv.key == "freq_mhz") fail = set_pos(cfg.radio.params.freq_mhz);
    else if (kv.key == "ref_distance_m")
      fail = set_pos(cfg.radio.params.ref_distance_m);
    else if (kv.key == "pathloss_exponent") {
      fail = set_pos(cfg.radio.params.pathloss_exponent);
      if (!fail && cfg.radio.params.pathloss_exponent < 2.0)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line, "pathloss_exponent must be >= 2")};
    } else if (kv.key == "height_gain_coeff") {
      auto v = parse_f64(kv);
      if (!v) return v.failure();
      cfg.radio.params.height_gain_coeff = v.value();
    } else if (kv.key == "ref_height_m")
      fail = set_pos(cfg.radio.params.ref_height_m);
    else if (kv.key == "bandwidth_mhz") fail = set_pos(cfg.radio.bandwidth_mhz);
    else if (kv.key == "noise_figure_db") {
      auto v = parse_f64(kv);
      if (!v) return v.failure();
      cfg.radio.noise_figure_db = v.value();
    } else if (kv.key == "high_threshold_db") {
      auto v = parse_f64(kv);
      if (!v) return v.failure();
      cfg.radio.grid.high_threshold_db = v.value();
    } else if (kv.key == "extent_x_m") fail = set_pos(cfg.radio.grid.extent_x_m);
    else if (kv.key == "extent_y_m") fail = set_pos(cfg.radio.grid.extent_y_m);
    else if (kv.key == "resolution_m") fail = set_pos(cfg.radio.grid.resolution_m);
    else return unknown_key("radio", kv);
    if (fail) return fail;
  }
  return std::nullopt;
}

std::optional<ParseFail> apply_thresholds(const Section& sec, CampaignConfig& cfg) {
  for (const KeyLine& kv : sec.keys) {
    auto v = parse_f64(kv);
    if (!v) return v.failure();
    if (kv.key == "stream_loss_max_pct") cfg.thresholds.stream_loss_max_pct = v.value();
    else if (kv.key == "datagram_loss_max_pct")
      cfg.thresholds.datagram_loss_max_pct = v.value();
    else if (kv.key == "rtt_avg_min_ms") cfg.thresholds.rtt_avg_min_ms = v.value();
    else if (kv.key == "rtt_avg_max_ms") cfg.thresholds.rtt_avg_max_ms = v.value();
    else if (kv.key == "throughput_min_fraction") {
      if (v.value() <= 0 || v.value() > 1)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(kv.line,
                                 "throughput_min_fraction must be in (0, 1]")};
      cfg.thresholds.throughput_min_fraction = v.value();
    } else {
      return unknown_key("thresholds", kv);
    }
  }
  return std::nullopt;
}

}  // namespace

Result<CampaignConfig, ConfigError> parse_config(const std::string& text) {
  auto split = split_sections(text);
  if (!split) return split.failure();
  const std::vector<Section>& sections = split.value();

  if (sections.empty())
    return ParseFail{ConfigError::MissingRequired,
                     "empty config; required sections: [campaign], [node NAME] "
                     "with role = hub, [node NAME] with role = cpe"};

  CampaignConfig cfg;
  std::set<std::string> seen_singletons;
  bool have_campaign = false;
  for (const Section& sec : sections) {
    if (sec.kind != "node") {
      if (!sec.name.empty())
        return ParseFail{ConfigError::SyntaxError,
                         at_line(sec.line, "section [" + sec.kind +
                                               "] does not take a name")};
      if (!seen_singletons.insert(sec.kind).second)
        return ParseFail{ConfigError::InvalidValue,
                         at_line(sec.line, "duplicate section [" + sec.kind + "]")};
    }
    auto dup = check_duplicates(sec);
    if (!dup) return dup.failure();

    std::optional<ParseFail> fail;
    if (sec.kind == "campaign") {
      have_campaign = true;
      fail = apply_campaign(sec, cfg);
    } else if (sec.kind == "node") fail = apply_node(sec, cfg);
    else if (sec.kind == "plan") fail = apply_plan(sec, cfg);
    else if (sec.kind == "probe") fail = apply_probe(sec, cfg);
    else if (sec.kind == "throughput") fail = apply_throughput(sec, cfg);
    else if (sec.kind == "radio") fail = apply_radio(sec, cfg);
    else if (sec.kind == "thresholds") fail = apply_thresholds(sec, cfg);
    else
      return ParseFail{ConfigError::UnknownKey,
                       at_line(sec.line, "unknown section [" + sec.kind + "]")};
    if (fail) return *fail;
  }

  // ---- cross-section validation ----
  if (!have_campaign)
    return ParseFail{ConfigError::MissingRequired, "missing [campaign] section"};

  std::size_t hubs = 0, cpes = 0;
  std::set<std::uint8_t> source_ids;
  for (const NodeConfig& node : cfg.nodes) {
    if (node.is_hub) {
      ++hubs;
      if (node.source_id != 0)
        return ParseFail{ConfigError::InvalidValue,
                         "hub `" + node.name + "` cannot carry a source_id"};
    } else {
      ++cpes;
    }
    if (node.source_id != 0 && !source_ids.insert(node.source_id).second)
      return ParseFail{ConfigError::InvalidValue,
                       "source_id " + std::to_string(node.source_id) +
                           " assigned to more than one node"};
  }
  if (hubs == 0)
    return ParseFail{ConfigError::MissingRequired,
                     "missing hub: one [node NAME] needs role = hub"};
  if (hubs > 1)
    return ParseFail{ConfigError::InvalidValue, "more than one hub node"};
  if (cpes == 0)
    return ParseFail{ConfigError::MissingRequired,
                     "missing nodes: at least one [node NAME] with role = cpe"};
  if (cfg.scenario == Scenario::Simultaneous && cpes < 2)
    return ParseFail{ConfigError::InvalidValue,
                     "simultaneous scenario requires at least 2 cpe nodes"};

  cfg.plan.sources.assign(source_ids.begin(), source_ids.end());
  if (cfg.phase_app) {
    if (cfg.plan.sources.empty())
      return ParseFail{ConfigError::InvalidValue,
                       "application phase enabled but no node has a source_id"};
    try {
      telemetry::build_plan(cfg.plan);
    } catch (const telemetry::PlanError& e) {
      return ParseFail{ConfigError::InvalidValue,
                       std::string("message plan: ") + e.what()};
    }
  }
  return cfg;
}

const NodeConfig& hub_node(const CampaignConfig& config) {
  for (const NodeConfig& node : config.nodes)
    if (node.is_hub) return node;
  throw CodedError<ConfigError>(ConfigError::MissingRequired, "no hub node");
}

std::vector<const NodeConfig*> cpe_nodes(const CampaignConfig& config) {
  std::vector<const NodeConfig*> out;
  for (const NodeConfig& node : config.nodes)
    if (!node.is_hub) out.push_back(&node);
  return out;
}

}  // namespace gridbench::bench
