#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace fracdiff {

enum class ErrorKind {
    validation,      // malformed input (shape, range)
    precondition,    // input valid but outside a theorem's hypotheses
    pole,            // gamma pole or H pole collision
    singular,        // kernel evaluated at a singular point
    non_convergence, // quadrature or series did not reach tolerance
    disagreement,    // two evaluation routes disagree
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::pole: return "pole";
    case ErrorKind::singular: return "singular";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::disagreement: return "disagreement";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Process exit code for an error kind: 3 for numerical failures, 2 otherwise.
inline int exit_code(ErrorKind k) {
    return (k == ErrorKind::non_convergence || k == ErrorKind::disagreement) ? 3 : 2;
}

namespace detail {

template <class... Args>
[[noreturn]] void fail(ErrorKind kind, Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    throw Error(kind, os.str());
}

} // namespace detail
} // namespace fracdiff
