#include "pentestxx/toolio/command.hpp"

#include <algorithm>
#include <cctype>

#include "pentestxx/common/error.hpp"

namespace pentestxx::toolio {

namespace {

void check_token(const std::string& token, const char* what) {
  if (token.empty()) throw Error(ErrorCode::invalid_argument, std::string("empty ") + what);
  if (std::any_of(token.begin(), token.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " contains whitespace: '" + token + "'");
  }
}

}  // namespace

std::string CommandSpec::display_line() const {
  std::string line = program;
  for (const auto& a : args) {
    line += ' ';
    line += a;
  }
  return line;
}

CommandSpec make_command(std::string program, std::vector<std::string> args, bool gate_required) {
  check_token(program, "program");
  for (const auto& a : args) check_token(a, "argument");
  return CommandSpec{std::move(program), std::move(args), gate_required};
}

}  // namespace pentestxx::toolio
