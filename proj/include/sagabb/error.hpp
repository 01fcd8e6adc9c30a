#pragma once

#include <stdexcept>
#include <string>

namespace sagabb {

enum class Errc {
  empty_input,
  parse,
  dimension_mismatch,
  out_of_range,
  domain,
  infinite_divergence,
  unsupported,
  invalid_argument,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Parse failures keep the 1-based line number they refer to (0 when the
// failure is not tied to a line, e.g. an empty stream).
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t line, const std::string& what)
      : Error(code, line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sagabb
