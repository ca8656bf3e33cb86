#include "pentestxx/toolio/table.hpp"

#include <algorithm>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/strings.hpp"

namespace pentestxx::toolio {

std::string render_table(const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) width[c] = utf8_length(headers[c]);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != headers.size()) {
      throw Error(ErrorCode::invalid_argument, "row " + std::to_string(r) + " has " +
                                                   std::to_string(rows[r].size()) + " cells, expected " +
                                                   std::to_string(headers.size()));
    }
    for (std::size_t c = 0; c < headers.size(); ++c) width[c] = std::max(width[c], utf8_length(rows[r][c]));
  }

  std::string border = "+";
  for (auto w : width) border += std::string(w + 2, '-') + "+";
  border += '\n';

  auto format_row = [&](const std::vector<std::string>& cells) {
    std::string line = "|";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      // Newlines would break the frame; flatten them.
      std::string cell = cells[c];
      std::replace(cell.begin(), cell.end(), '\n', ' ');
      line += " " + cell + std::string(width[c] - utf8_length(cells[c]), ' ') + " |";
    }
    return line + '\n';
  };

  std::string out = border + format_row(headers) + border;
  for (const auto& row : rows) out += format_row(row);
  out += border;
  return out;
}

std::string render_port_table(const std::vector<PortFinding>& ports) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(ports.size());
  for (const auto& p : ports) {
    rows.push_back({std::to_string(p.port) + "/" + to_string(p.protocol), to_string(p.status), p.service, p.version});
  }
  return render_table({"port", "status", "service", "version"}, rows);
}

}  // namespace pentestxx::toolio
