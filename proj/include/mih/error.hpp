#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mih {

/// A caller violated an operation's preconditions (mismatched descriptor
/// lengths, out-of-range parameters, empty inputs where data is required).
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. `offset()` is the byte position of the first
/// inconsistency.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// The requested computation exceeds a supported size bound.
class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No result satisfies the requested constraints.
class not_found : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mih
