#pragma once

#include <string>

#include "json.hpp"

#include "feller/battery.hpp"

namespace feller {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values have no JSON spelling and become null.
std::string format_number(double v);

/// Serialises with every float at 17 significant digits so that equal
/// reports are byte-identical.
std::string dump_json(const Json& j, int indent = 2);

Json report_to_json(const FellerReport& report);
std::string report_to_csv(const FellerReport& report);

}  // namespace feller
