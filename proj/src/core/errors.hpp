#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace railenv {

// Process-level status codes. The CLI maps these 1:1 onto exit codes and the
// C API returns them unchanged.
enum class Status : int {
    ok = 0,
    usage = 1,
    input = 2,
    numeric = 3,
};

class Error : public std::runtime_error {
  public:
    Error(Status status, std::string message)
        : std::runtime_error(std::move(message)), status_(status) {}

    Status status() const noexcept { return status_; }

  private:
    Status status_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) { throw Error(Status::usage, msg); }
[[noreturn]] inline void throw_input(const std::string& msg) { throw Error(Status::input, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(Status::numeric, msg); }

}  // namespace railenv
