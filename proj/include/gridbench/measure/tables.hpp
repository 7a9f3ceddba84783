#pragma once

#include <string>
#include <vector>

#include "gridbench/common/result.hpp"
#include "gridbench/measure/ledger.hpp"

namespace gridbench::measure {

enum class TableErrorCode : std::uint8_t { MissingFlow };
using TableError = CodedError<TableErrorCode>;

struct LossTable {
  std::string title;
  std::vector<std::string> column_names;           // message classes
  std::vector<std::string> row_names;              // inverters
  std::vector<std::vector<std::string>> cells;     // row-major percentages
};

// Percentage string with 4 significant digits; exact zero renders as "0%".
std::string format_loss_cell(double loss_fraction);

// One row per inverter (sources 1..3), one column per message class, for the
// given transport role. Throws MissingFlow naming any absent flow.
LossTable loss_table(const std::vector<const FlowLedger*>& ledgers,
                     TransportRole role);

}  // namespace gridbench::measure
