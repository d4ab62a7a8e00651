#pragma once

#include <stdexcept>
#include <string>

namespace mpskit {

// Error taxonomy shared by the library and the CLI exit-code mapping:
// user-facing input problems (Parse, InvalidArgument), structural problems
// (Shape, Incompatible), numeric trouble (Numeric) and resource guards
// (SizeGuard).
enum class ErrorKind {
    Parse,
    InvalidArgument,
    Shape,
    Incompatible,
    Numeric,
    SizeGuard,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace mpskit
