#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ew {

// Every failure surfaced by the library carries one of these categories so
// callers (and the CLI exit-code mapping) can react without string matching.
enum class ErrorCategory {
    domain,     // argument outside the mathematical domain of an operation
    parse,      // malformed scenario text
    config,     // inconsistent or invalid solver/run configuration
    numerical,  // a computation failed to reach its stated tolerance
    io,         // filesystem problems while reading or writing artifacts
};

std::string_view to_string(ErrorCategory cat) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(std::string(to_string(cat)) + ": " + msg), cat_(cat) {}

    ErrorCategory category() const noexcept { return cat_; }

  private:
    ErrorCategory cat_;
};

[[noreturn]] inline void fail(ErrorCategory cat, const std::string& msg) {
    throw Error(cat, msg);
}

inline void require(bool cond, ErrorCategory cat, const std::string& msg) {
    if (!cond) fail(cat, msg);
}

}  // namespace ew
