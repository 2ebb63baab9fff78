#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fvheat {

// Raised when a per-mode exponential leaves the representable range and the
// caller selected OverflowPolicy::fail.  Carries the offending mode indices.
class OverflowError : public std::runtime_error {
public:
    OverflowError(const std::string& what, std::vector<std::size_t> modes)
        : std::runtime_error(what), modes_(std::move(modes)) {}

    const std::vector<std::size_t>& modes() const noexcept { return modes_; }

private:
    std::vector<std::size_t> modes_;
};

// Malformed or missing input data (file level).  CLI maps this to exit 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration.  CLI maps this to exit 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fvheat
