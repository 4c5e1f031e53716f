#pragma once

#include <stdexcept>
#include <string>

namespace mcd {

enum class ErrorKind {
    kDimension,  // non-conformable operands
    kRank,       // rank-deficient actuation/sensing or singular algebraic loop
    kDomain,     // scheduling point outside the box, bad parameter
    kNumeric,    // solver failure, non-convergence, unstable where stability is required
    kConfig,     // malformed input file or configuration
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) {
        throw Error(kind, what);
    }
}

}  // namespace mcd
