#pragma once

#include <string>
#include <vector>

#include "pentestxx/toolio/parsers.hpp"

namespace pentestxx::toolio {

/// Frame lines around the data rows: top border, header, separator, bottom.
inline constexpr std::size_t kTableFrameLines = 4;

/// Bordered monospace table. Column widths count UTF-8 code points.
/// Throws Error(invalid_argument) when a row's arity differs from the headers.
std::string render_table(const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows);

std::string render_port_table(const std::vector<PortFinding>& ports);

}  // namespace pentestxx::toolio
