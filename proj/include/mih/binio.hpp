#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "mih/error.hpp"

// Little-endian binary stream helpers. The reader tracks its byte offset so
// malformed files can be reported with the exact position of the failure.

namespace mih::binio {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian and read via memcpy");

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint64_t offset() const { return offset_; }

    void bytes(void* dst, std::size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw parse_error("unexpected end of file", offset_);
        offset_ += n;
    }

    std::uint8_t u8() { return scalar<std::uint8_t>(); }
    std::uint32_t u32() { return scalar<std::uint32_t>(); }
    std::uint64_t u64() { return scalar<std::uint64_t>(); }
    double f64() { return scalar<double>(); }

    /// True once the underlying stream has no further bytes.
    bool at_end() {
        return in_.peek() == std::istream::traits_type::eof();
    }

private:
    template <typename T>
    T scalar() {
        T value;
        bytes(&value, sizeof(T));
        return value;
    }

    std::istream& in_;
    std::uint64_t offset_ = 0;
};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void bytes(const void* src, std::size_t n) {
        out_.write(static_cast<const char*>(src),
                   static_cast<std::streamsize>(n));
    }

    void u8(std::uint8_t v) { scalar(v); }
    void u32(std::uint32_t v) { scalar(v); }
    void u64(std::uint64_t v) { scalar(v); }
    void f64(double v) { scalar(v); }

private:
    template <typename T>
    void scalar(T value) {
        bytes(&value, sizeof(T));
    }

    std::ostream& out_;
};

} // namespace mih::binio
