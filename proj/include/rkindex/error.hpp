#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rkindex {

enum class Errc {
  invalid_argument = 1,
  insufficient_papers,
  unknown_label,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception. Every failure raised by the core carries one of
/// the Errc categories so the C API can map it onto a status code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(Errc::invalid_argument, message);
}

}  // namespace rkindex
