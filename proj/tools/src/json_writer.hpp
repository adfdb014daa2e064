#pragma once

#include <string>

#include <json.hpp>

namespace wmean::cli {

using Json = nlohmann::ordered_json;

/// Compact single-line JSON with every floating-point number printed with
/// 17 significant digits; non-finite numbers become null.
std::string to_json_line(const Json& j);

/// "%.17g" formatting shared with the CSV writer.
std::string format_real(double v);

}  // namespace wmean::cli
