#include "gridbench/measure/tables.hpp"

#include <cstdio>

namespace gridbench::measure {

std::string format_loss_cell(double loss_fraction) {
  if (loss_fraction == 0.0) return "0%";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", loss_fraction * 100.0);
  return std::string(buf) + "%";
}

LossTable loss_table(const std::vector<const FlowLedger*>& ledgers,
                     TransportRole role) {
  using telemetry::MessageClass;
  LossTable table;
  table.title = std::string(transport_role_name(role)) + " loss";
  table.column_names = {"D1", "D2", "D3"};
  const MessageClass classes[3] = {MessageClass::D1, MessageClass::D2,
                                   MessageClass::D3};
  for (std::uint8_t source = 1; source <= 3; ++source) {
    table.row_names.push_back("Inverter 0" + std::to_string(source));
    std::vector<std::string> row;
    for (MessageClass cls : classes) {
      const FlowLedger* found = nullptr;
      for (const FlowLedger* ledger : ledgers) {
        const FlowId& id = ledger->id();
        if (id.source_id == source && id.message_class == cls && id.role == role) {
          found = ledger;
          break;
        }
      }
      if (!found)
        throw TableError(TableErrorCode::MissingFlow,
                         "missing flow " +
                             flow_id_label(FlowId{source, cls, role}));
      row.push_back(format_loss_cell(found->loss_rate()));
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

}  // namespace gridbench::measure
