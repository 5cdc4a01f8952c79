#pragma once

#include <stdexcept>
#include <string>

namespace heliid {

/// Caller handed in something the contract forbids (non-finite parameter,
/// bad fraction, cutoff above Nyquist, ...).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed or inconsistent data (CSV parse failures, missing channels,
/// unreadable files).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace heliid
