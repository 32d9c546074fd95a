#pragma once

#include <cstdint>
#include <vector>

#include "mih/error.hpp"

// Binary descriptors, substring layouts and the distance primitives built on
// the popcount kernels. Bit order is fixed: bit i of a descriptor is
// (bytes[i / 8] >> (i % 8)) & 1, i.e. little-endian within each byte, so
// indexes built by different processes agree bit-exactly.

namespace mih {

/// Fixed-length bit string. Length is set at construction (multiple of 8,
/// default 256 bits) and immutable afterwards.
class BinaryDescriptor {
public:
    explicit BinaryDescriptor(std::uint32_t nbits = 256);
    BinaryDescriptor(const std::uint8_t* bytes, std::uint32_t nbits);

    std::uint32_t size_bits() const { return nbits_; }
    std::uint32_t size_bytes() const { return nbits_ / 8; }
    const std::uint8_t* data() const { return bytes_.data(); }
    std::uint8_t* data() { return bytes_.data(); }

    bool bit(std::uint32_t i) const;
    void set_bit(std::uint32_t i, bool value);
    void flip_bit(std::uint32_t i);

    bool operator==(const BinaryDescriptor&) const = default;

private:
    std::uint32_t nbits_;
    std::vector<std::uint8_t> bytes_;
};

/// Partition of [0, total_bits) into m contiguous substrings, each at most
/// 32 bits so substring values fit in a uint32 hash key.
struct SubstringLayout {
    std::vector<std::uint32_t> lengths;
    std::vector<std::uint32_t> offsets;
    std::uint32_t total_bits = 0;

    std::uint32_t table_count() const {
        return static_cast<std::uint32_t>(lengths.size());
    }

    /// Splits total_bits as evenly as possible: when total_bits % m != 0 the
    /// first total_bits % m substrings are one bit longer, so lengths differ
    /// by at most 1 and longer substrings come first.
    static SubstringLayout balanced(std::uint32_t m, std::uint32_t total_bits);
};

/// Popcount of a XOR b. Lengths must match.
std::uint32_t hamming_distance(const BinaryDescriptor& a,
                               const BinaryDescriptor& b);

/// Hamming distance restricted to the first prefix_bits bits. prefix_bits
/// must be a positive multiple of 8, at most the descriptor length.
std::uint32_t partial_hamming(const BinaryDescriptor& a,
                              const BinaryDescriptor& b,
                              std::uint32_t prefix_bits);

/// True iff the prefix distance already exceeds partial_threshold, meaning
/// the pair can be discarded without reading the remaining bits.
bool early_reject(const BinaryDescriptor& a, const BinaryDescriptor& b,
                  std::uint32_t partial_threshold, std::uint32_t prefix_bits);

/// Substring keys of d under the layout; key k is the unsigned value of bits
/// [offsets[k], offsets[k] + lengths[k]).
std::vector<std::uint32_t> extract_substrings(const BinaryDescriptor& d,
                                              const SubstringLayout& layout);

/// Raw-pointer variant for hot paths: writes layout.table_count() keys to
/// out. bytes must hold layout.total_bits bits.
void extract_substrings_raw(const std::uint8_t* bytes, std::size_t nbytes,
                            const SubstringLayout& layout, std::uint32_t* out);

/// One frame's descriptors in flat contiguous storage (count * L/8 bytes),
/// so batch distance kernels can stream over them.
class FrameFeatures {
public:
    explicit FrameFeatures(std::uint32_t frame_id = 0,
                           std::uint32_t descriptor_bits = 256);

    std::uint32_t frame_id() const { return frame_id_; }
    void set_frame_id(std::uint32_t id) { frame_id_ = id; }
    std::uint32_t descriptor_bits() const { return nbits_; }
    std::uint32_t descriptor_bytes() const { return nbits_ / 8; }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    void add(const BinaryDescriptor& d);
    /// Appends descriptor_bytes() bytes verbatim.
    void add_raw(const std::uint8_t* bytes);

    const std::uint8_t* descriptor_data(std::size_t i) const {
        return storage_.data() + i * descriptor_bytes();
    }
    BinaryDescriptor descriptor(std::size_t i) const;
    const std::uint8_t* raw_storage() const { return storage_.data(); }

private:
    std::uint32_t frame_id_;
    std::uint32_t nbits_;
    std::size_t count_ = 0;
    std::vector<std::uint8_t> storage_;
};

} // namespace mih
