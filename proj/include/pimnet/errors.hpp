#pragma once

#include <stdexcept>
#include <string>

namespace pimnet {

// Error taxonomy maps onto CLI exit codes:
//   usage_error / config_error -> 2, numerical_error -> 3, capacity_error -> 4.

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : config_error {
    parse_error(const std::string& what, long line)
        : config_error("line " + std::to_string(line) + ": " + what), line(line) {}
    long line;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pimnet
