#pragma once

#include <stdexcept>
#include <string>

namespace lossdist {

// Bad configuration or out-of-range arguments. The CLI maps this to exit code 2.
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numeric failure: exact-integer overflow, non-convergence, root outside the
// representable domain. CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Resource exhaustion, e.g. a loss support too large for the memory budget.
// CLI exit code 4.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lossdist
