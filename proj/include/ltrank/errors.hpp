#pragma once

#include <stdexcept>
#include <string>

namespace ltrank {

/// Failure categories. The CLI maps these onto process exit codes.
enum class errc : int {
    config = 2,
    io = 3,
    format = 4,
    eval = 5,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    errc code() const { return code_; }
    int exit_code() const { return static_cast<int>(code_); }

  private:
    errc code_;
};

}  // namespace ltrank
