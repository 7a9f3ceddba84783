#include "gridbench/bench/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "gridbench/measure/tables.hpp"

namespace gridbench::bench {
namespace {

using OrderedJson = nlohmann::ordered_json;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string fmt_ms(std::int64_t us) { return fmt("%.3f", us / 1000.0); }

std::string fmt_rate(double bps) {
  if (bps >= 1e6) return fmt("%.3f", bps / 1e6) + " Mbps";
  if (bps >= 1e3) return fmt("%.3f", bps / 1e3) + " Kbps";
  return fmt("%.1f", bps) + " bps";
}

// Loss table for a role, or nothing when the role's 3x3 flow grid is
// incomplete (small test campaigns).
std::optional<measure::LossTable> try_loss_table(
    const std::vector<measure::FlowLedger>& ledgers,
    measure::TransportRole role) {
  std::vector<const measure::FlowLedger*> ptrs;
  for (const measure::FlowLedger& led : ledgers) ptrs.push_back(&led);
  try {
    return measure::loss_table(ptrs, role);
  } catch (const measure::TableError&) {
    return std::nullopt;
  } catch (const measure::LedgerError&) {
    return std::nullopt;  // a flow that never transmitted
  }
}

void render_loss_table(std::ostringstream& out, const measure::LossTable& t) {
  out << "-- " << t.title << " --\n";
  std::size_t name_w = 0;
  for (const std::string& r : t.row_names) name_w = std::max(name_w, r.size());
  out << std::string(name_w, ' ');
  for (const std::string& c : t.column_names) {
    out << "  ";
    out << c << std::string(c.size() < 10 ? 10 - c.size() : 0, ' ');
  }
  out << "\n";
  for (std::size_t r = 0; r < t.row_names.size(); ++r) {
    out << t.row_names[r]
        << std::string(name_w - t.row_names[r].size(), ' ');
    for (const std::string& cell : t.cells[r]) {
      out << "  " << cell
          << std::string(cell.size() < 10 ? 10 - cell.size() : 0, ' ');
    }
    out << "\n";
  }
  out << "\n";
}

}  // namespace

std::string render_summary(const CampaignReport& report) {
  const CampaignConfig& cfg = report.config;
  std::ostringstream out;
  out << "gridbench campaign summary\n";
  out << "==========================\n\n";
  out << "seed:     " << report.seed << "\n";
  out << "backend:  " << backend_name(cfg.backend) << "\n";
  out << "scenario: " << scenario_name(cfg.scenario) << "\n";
  out << "phases:   " << (cfg.phase_throughput ? "throughput " : "")
      << (cfg.phase_echo ? "echo " : "") << (cfg.phase_app ? "application" : "")
      << "\n";
  if (report.virtual_end_us > 0)
    out << "virtual runtime: " << fmt("%.3f", report.virtual_end_us / 1e6)
        << " s\n";
  out << "nodes:    ";
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    if (i) out << ", ";
    out << cfg.nodes[i].name;
    if (cfg.nodes[i].is_hub) out << " (hub)";
    else if (cfg.nodes[i].source_id != 0)
      out << " (inverter " << int(cfg.nodes[i].source_id) << ")";
  }
  out << "\n";
  out << "probe plan: " << cfg.probe.count << " probes @ "
      << fmt("%.1f", cfg.probe.interval_ms) << " ms, pad "
      << cfg.probe.pad_bytes << " B, timeout "
      << fmt("%.1f", cfg.probe.timeout_ms) << " ms\n";
  out << "throughput plan: " << fmt("%.1f", cfg.throughput.duration_s)
      << " s per direction (" << direction_name(cfg.throughput.directions)
      << "), " << cfg.throughput.datagram_bytes << " B datagrams\n\n";

  if (!report.throughput.empty()) {
    out << "-- throughput --\n";
    for (const ThroughputRow& row : report.throughput) {
      out << row.node << " " << direction_name(row.direction) << ": ";
      try {
        const auto s = row.series.summary();
        out << "avg " << fmt_rate(s.avg_bps) << " (min " << fmt_rate(s.min_bps)
            << ", max " << fmt_rate(s.max_bps) << ", " << s.windows
            << " windows, shaped at " << fmt_rate(row.shaped_rate_bps) << ")";
      } catch (const measure::ThroughputError&) {
        out << "no complete window";
      }
      out << "\n";
    }
    out << "\n";
  }

  if (!report.rtt.empty()) {
    out << "-- echo --\n";
    for (const RttRow& row : report.rtt) {
      out << row.node << ": " << row.stats.probes() << " probes, ";
      if (row.stats.answered() == 0) {
        out << "min —, avg —, p50 —, p95 —, max —, loss "
            << measure::format_loss_cell(row.stats.loss_fraction()) << "\n";
        continue;
      }
      const auto s = row.stats.summary();
      out << "min " << fmt_ms(s.min_us) << " ms, avg "
          << fmt("%.3f", s.avg_us / 1000.0) << " ms, p50 " << fmt_ms(s.p50_us)
          << " ms, p95 " << fmt_ms(s.p95_us) << " ms, max " << fmt_ms(s.max_us)
          << " ms, loss " << measure::format_loss_cell(s.loss_fraction) << "\n";
    }
    out << "\n";
  }

  if (!report.ledgers.empty()) {
    const auto tcp =
        try_loss_table(report.ledgers, measure::TransportRole::Stream);
    if (tcp) render_loss_table(out, *tcp);
    const auto udp =
        try_loss_table(report.ledgers, measure::TransportRole::Datagram);
    if (udp) render_loss_table(out, *udp);

    out << "-- flows --\n";
    for (const measure::FlowLedger& led : report.ledgers) {
      out << measure::flow_id_label(led.id()) << ": tx " << led.tx_count()
          << ", rx " << led.rx_unique() << ", dup " << led.duplicates()
          << ", reorder " << led.reorders() << ", integrity "
          << led.integrity_failures() << ", loss "
          << (led.tx_count() ? measure::format_loss_cell(led.loss_rate())
                             : std::string("—"))
          << "\n";
    }
    out << "\n";
  }

  if (!report.coverage.empty()) {
    out << "-- coverage --\n";
    for (const radio::CpePoint& p : report.coverage) {
      out << p.name << ": d " << fmt("%.1f", p.distance_m) << " m, prx "
          << fmt("%.2f", p.prx_dbm) << " dBm, sinr " << fmt("%.2f", p.sinr_db)
          << " dB, " << radio::coverage_class_name(p.cls) << "\n";
    }
    out << "\n";
  }

  if (!report.flow_errors.empty()) {
    out << "-- flow errors --\n";
    for (const std::string& e : report.flow_errors) out << e << "\n";
    out << "\n";
  }

  out << "-- threshold violations --\n";
  if (report.violations.empty()) {
    out << "(none)\n";
  } else {
    for (const std::string& v : report.violations) out << v << "\n";
  }
  return std::move(out).str();
}

std::string render_ledgers_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "flow,source_id,message_class,transport,tx,rx_events,rx_unique,"
         "duplicates,reordered,integrity_failures,lost,loss_pct\n";
  for (const measure::FlowLedger& led : report.ledgers) {
    const measure::FlowId& id = led.id();
    const std::uint64_t lost =
        led.tx_count() >= led.rx_unique() ? led.tx_count() - led.rx_unique() : 0;
    out << measure::flow_id_label(id) << "," << int(id.source_id) << ","
        << telemetry::message_class_name(id.message_class) << ","
        << measure::transport_role_name(id.role) << "," << led.tx_count() << ","
        << led.rx_events() << "," << led.rx_unique() << "," << led.duplicates()
        << "," << led.reorders() << "," << led.integrity_failures() << ","
        << lost << ","
        << (led.tx_count() ? measure::format_loss_cell(led.loss_rate())
                           : std::string(""))
        << "\n";
  }
  return std::move(out).str();
}

std::string render_throughput_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "node,direction,window_index,window_start_us,bytes,frames,bps\n";
  for (const ThroughputRow& row : report.throughput) {
    const auto buckets = row.series.complete_buckets();
    const double window_s = row.series.window_us() / 1e6;
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      out << row.node << "," << direction_name(row.direction) << "," << i << ","
          << buckets[i].start_us << "," << buckets[i].bytes << ","
          << buckets[i].frames << ","
          << fmt("%.6f", 8.0 * static_cast<double>(buckets[i].bytes) / window_s)
          << "\n";
    }
  }
  return std::move(out).str();
}

std::string render_rtt_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "node,probe_seq,rtt_us\n";
  for (const RttRow& row : report.rtt)
    for (const measure::RttSample& s : row.stats.samples())
      out << row.node << "," << s.probe_seq << "," << s.rtt_us << "\n";
  return std::move(out).str();
}

std::string render_trace_csv(const netem::TraceSink& trace) {
  std::ostringstream out;
  out << "time_us,link,event,cause,size_bytes\n";
  for (const netem::TraceRow& row : trace)
    out << row.time_us << "," << row.link << "," << row.event << ","
        << row.cause << "," << row.size_bytes << "\n";
  return std::move(out).str();
}

std::string render_json(const CampaignReport& report) {
  const CampaignConfig& cfg = report.config;
  OrderedJson j;
  j["seed"] = report.seed;
  j["backend"] = backend_name(cfg.backend);
  j["scenario"] = scenario_name(cfg.scenario);
  j["virtual_end_us"] = report.virtual_end_us;
  j["phases"] = {{"throughput", cfg.phase_throughput},
                 {"echo", cfg.phase_echo},
                 {"application", cfg.phase_app}};
  OrderedJson nodes = OrderedJson::array();
  for (const NodeConfig& n : cfg.nodes) {
    OrderedJson node;
    node["name"] = n.name;
    node["role"] = n.is_hub ? "hub" : "cpe";
    if (n.source_id != 0) node["source_id"] = n.source_id;
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  j["parameters"] = {
      {"probe",
       {{"count", cfg.probe.count},
        {"interval_ms", cfg.probe.interval_ms},
        {"pad_bytes", cfg.probe.pad_bytes},
        {"timeout_ms", cfg.probe.timeout_ms}}},
      {"throughput",
       {{"duration_s", cfg.throughput.duration_s},
        {"datagram_bytes", cfg.throughput.datagram_bytes},
        {"directions", direction_name(cfg.throughput.directions)}}},
      {"plan",
       {{"transport", transport_choice_name(cfg.transport)},
        {"d1_period_us", cfg.plan.d1_period_us},
        {"d2_period_us", cfg.plan.d2_period_us},
        {"d3_period_us", cfg.plan.d3_period_us},
        {"jitter_us", cfg.plan.jitter_us},
        {"app_duration_s", cfg.app_duration_s}}},
      {"cell_pool_up_bps", cfg.cell_pool_up_bps}};

  OrderedJson tput = OrderedJson::array();
  for (const ThroughputRow& row : report.throughput) {
    OrderedJson r;
    r["node"] = row.node;
    r["direction"] = direction_name(row.direction);
    r["shaped_rate_bps"] = row.shaped_rate_bps;
    try {
      const auto s = row.series.summary();
      r["windows"] = s.windows;
      r["bytes"] = s.bytes;
      r["min_bps"] = s.min_bps;
      r["avg_bps"] = s.avg_bps;
      r["max_bps"] = s.max_bps;
    } catch (const measure::ThroughputError&) {
      r["windows"] = 0;
    }
    tput.push_back(std::move(r));
  }
  j["throughput"] = std::move(tput);

  OrderedJson rtt = OrderedJson::array();
  for (const RttRow& row : report.rtt) {
    OrderedJson r;
    r["node"] = row.node;
    r["probes"] = row.stats.probes();
    r["answered"] = row.stats.answered();
    r["timeouts"] = row.stats.timeouts();
    r["loss_fraction"] = row.stats.loss_fraction();
    if (row.stats.answered() > 0) {
      const auto s = row.stats.summary();
      r["min_us"] = s.min_us;
      r["avg_us"] = s.avg_us;
      r["p50_us"] = s.p50_us;
      r["p95_us"] = s.p95_us;
      r["max_us"] = s.max_us;
    } else {
      r["min_us"] = nullptr;
      r["avg_us"] = nullptr;
      r["p50_us"] = nullptr;
      r["p95_us"] = nullptr;
      r["max_us"] = nullptr;
    }
    rtt.push_back(std::move(r));
  }
  j["rtt"] = std::move(rtt);

  for (const auto role :
       {measure::TransportRole::Stream, measure::TransportRole::Datagram}) {
    const auto table = try_loss_table(report.ledgers, role);
    if (!table) continue;
    OrderedJson t;
    t["columns"] = table->column_names;
    OrderedJson rows = OrderedJson::array();
    for (std::size_t r = 0; r < table->row_names.size(); ++r) {
      OrderedJson row;
      row["name"] = table->row_names[r];
      row["cells"] = table->cells[r];
      rows.push_back(std::move(row));
    }
    t["rows"] = std::move(rows);
    j["loss_table_" + std::string(measure::transport_role_name(role))] =
        std::move(t);
  }

  OrderedJson flows = OrderedJson::array();
  for (const measure::FlowLedger& led : report.ledgers) {
    OrderedJson f;
    f["flow"] = measure::flow_id_label(led.id());
    f["tx"] = led.tx_count();
    f["rx_events"] = led.rx_events();
    f["rx_unique"] = led.rx_unique();
    f["duplicates"] = led.duplicates();
    f["reordered"] = led.reorders();
    f["integrity_failures"] = led.integrity_failures();
    if (led.tx_count() > 0) f["loss_rate"] = led.loss_rate();
    else f["loss_rate"] = nullptr;
    flows.push_back(std::move(f));
  }
  j["flows"] = std::move(flows);

  OrderedJson cov = OrderedJson::array();
  for (const radio::CpePoint& p : report.coverage) {
    OrderedJson c;
    c["name"] = p.name;
    c["x_m"] = p.x_m;
    c["y_m"] = p.y_m;
    c["distance_m"] = p.distance_m;
    c["prx_dbm"] = p.prx_dbm;
    c["sinr_db"] = p.sinr_db;
    c["class"] = radio::coverage_class_name(p.cls);
    cov.push_back(std::move(c));
  }
  j["coverage"] = std::move(cov);
  j["flow_errors"] = report.flow_errors;
  j["violations"] = report.violations;
  return j.dump(2) + "\n";
}

std::string render_coverage_raster_csv(const radio::CoverageMap& map) {
  std::ostringstream out;
  out << "x_m,y_m,sinr_db,class\n";
  for (const radio::CoverageCell& c : map.cells)
    out << fmt("%.3f", c.x_m) << "," << fmt("%.3f", c.y_m) << ","
        << fmt("%.6f", c.sinr_db) << "," << radio::coverage_class_name(c.cls)
        << "\n";
  return std::move(out).str();
}

std::string render_coverage_points_csv(const radio::CoverageMap& map) {
  std::ostringstream out;
  out << "name,x_m,y_m,distance_m,prx_dbm,sinr_db,class\n";
  for (const radio::CpePoint& p : map.points)
    out << p.name << "," << fmt("%.3f", p.x_m) << "," << fmt("%.3f", p.y_m)
        << "," << fmt("%.6f", p.distance_m) << "," << fmt("%.6f", p.prx_dbm)
        << "," << fmt("%.6f", p.sinr_db) << ","
        << radio::coverage_class_name(p.cls) << "\n";
  return std::move(out).str();
}

std::vector<std::string> emit_report(const CampaignReport& report,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw ReportWriteError(ReportError::IoError,
                           "cannot create " + out_dir + ": " + ec.message());

  const auto write = [&](const std::string& name,
                         const std::string& content) -> std::string {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f)
      throw ReportWriteError(ReportError::IoError, "cannot write " + path);
    return path;
  };

  std::vector<std::string> paths;
  paths.push_back(write("summary.txt", render_summary(report)));
  paths.push_back(write("ledgers.csv", render_ledgers_csv(report)));
  paths.push_back(write("throughput.csv", render_throughput_csv(report)));
  paths.push_back(write("rtt.csv", render_rtt_csv(report)));
  paths.push_back(write("report.json", render_json(report)));
  if (!report.trace.empty())
    paths.push_back(write("trace.csv", render_trace_csv(report.trace)));
  return paths;
}

}  // namespace gridbench::bench
