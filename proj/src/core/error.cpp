#include "rkindex/error.hpp"

namespace rkindex {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::insufficient_papers: return "insufficient papers";
    case Errc::unknown_label: return "unknown label";
    case Errc::parse_error: return "parse error";
    case Errc::io_error: return "i/o error";
  }
  return "unknown error";
}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace rkindex
