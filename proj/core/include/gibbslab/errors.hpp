#pragma once

#include <stdexcept>
#include <string>

namespace gibbslab {

// Bad inputs: malformed configs, out-of-range parameters, mismatched shapes.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Instance too large for the requested representation; message names the fallback.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A checked identity or inequality failed; message names it.
struct CheckFailure : std::runtime_error {
    explicit CheckFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gibbslab
