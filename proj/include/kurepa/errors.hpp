#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kurepa {

// Violated operation precondition on a user-supplied value (bad range, even modulus, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Filesystem or stream failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or invariant-violating persisted data. `where` is a line number or byte offset.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t where)
        : std::runtime_error(what), where_(where) {}
    std::uint64_t where() const noexcept { return where_; }

private:
    std::uint64_t where_;
};

// A checkpoint that does not belong to the scan being resumed.
class CheckpointMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by long-running kernels when cooperative cancellation was requested.
class Cancelled : public std::runtime_error {
public:
    Cancelled() : std::runtime_error("cancelled") {}
};

} // namespace kurepa
