#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace schro {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
    Validation,   // bad input spec / grid / arguments
    Guard,        // runtime guard tripped (norm drift, xi contamination, window escape)
    Numerical,    // solver breakdown
    Unsupported,  // operation not available for this input
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace schro
