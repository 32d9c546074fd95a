#include "mih/descriptor.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "mih/kernels.hpp"

static_assert(std::endian::native == std::endian::little,
              "substring extraction reads bytes through 64-bit windows and "
              "assumes a little-endian host");

namespace mih {

BinaryDescriptor::BinaryDescriptor(std::uint32_t nbits) : nbits_(nbits) {
    if (nbits == 0 || nbits % 8 != 0)
        throw invalid_input("descriptor length must be a positive multiple "
                            "of 8 bits");
    bytes_.assign(nbits / 8, 0);
}

BinaryDescriptor::BinaryDescriptor(const std::uint8_t* bytes,
                                   std::uint32_t nbits)
    : BinaryDescriptor(nbits) {
    std::memcpy(bytes_.data(), bytes, size_bytes());
}

bool BinaryDescriptor::bit(std::uint32_t i) const {
    if (i >= nbits_) throw invalid_input("bit index out of range");
    return (bytes_[i >> 3] >> (i & 7)) & 1;
}

void BinaryDescriptor::set_bit(std::uint32_t i, bool value) {
    if (i >= nbits_) throw invalid_input("bit index out of range");
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (i & 7));
    if (value)
        bytes_[i >> 3] |= mask;
    else
        bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
}

void BinaryDescriptor::flip_bit(std::uint32_t i) {
    if (i >= nbits_) throw invalid_input("bit index out of range");
    bytes_[i >> 3] ^= static_cast<std::uint8_t>(1u << (i & 7));
}

SubstringLayout SubstringLayout::balanced(std::uint32_t m,
                                          std::uint32_t total_bits) {
    if (m == 0) throw invalid_input("substring count must be positive");
    if (total_bits == 0 || total_bits % 8 != 0)
        throw invalid_input("total bits must be a positive multiple of 8");
    const std::uint32_t base = total_bits / m;
    const std::uint32_t rem = total_bits % m;
    if (base == 0)
        throw invalid_input("more substrings than bits");
    if (base + (rem ? 1 : 0) > 32)
        throw invalid_input("substring longer than 32 bits; increase the "
                            "substring count");
    SubstringLayout layout;
    layout.total_bits = total_bits;
    layout.lengths.reserve(m);
    layout.offsets.reserve(m);
    std::uint32_t off = 0;
    for (std::uint32_t k = 0; k < m; ++k) {
        const std::uint32_t len = base + (k < rem ? 1 : 0);
        layout.lengths.push_back(len);
        layout.offsets.push_back(off);
        off += len;
    }
    return layout;
}

std::uint32_t hamming_distance(const BinaryDescriptor& a,
                               const BinaryDescriptor& b) {
    if (a.size_bits() != b.size_bits())
        throw invalid_input("descriptor length mismatch");
    return kernels::hamming(a.data(), b.data(), a.size_bytes());
}

std::uint32_t partial_hamming(const BinaryDescriptor& a,
                              const BinaryDescriptor& b,
                              std::uint32_t prefix_bits) {
    if (a.size_bits() != b.size_bits())
        throw invalid_input("descriptor length mismatch");
    if (prefix_bits == 0 || prefix_bits % 8 != 0 ||
        prefix_bits > a.size_bits())
        throw invalid_input("prefix must be a positive multiple of 8 bits "
                            "within the descriptor length");
    return kernels::hamming(a.data(), b.data(), prefix_bits / 8);
}

bool early_reject(const BinaryDescriptor& a, const BinaryDescriptor& b,
                  std::uint32_t partial_threshold, std::uint32_t prefix_bits) {
    return partial_hamming(a, b, prefix_bits) > partial_threshold;
}

namespace {

inline std::uint32_t read_bits(const std::uint8_t* bytes, std::size_t nbytes,
                               std::uint32_t bit_off, std::uint32_t len) {
    // len <= 32 and shift <= 7, so the value spans at most 39 bits; an
    // 8-byte window starting at the containing byte always covers it, and
    // the layout guarantees enough bytes remain to hold the substring.
    const std::size_t byte_off = bit_off >> 3;
    const unsigned shift = bit_off & 7;
    std::uint64_t window = 0;
    const std::size_t avail = std::min<std::size_t>(8, nbytes - byte_off);
    std::memcpy(&window, bytes + byte_off, avail);
    window >>= shift;
    const std::uint64_t mask =
        len >= 64 ? ~0ull : ((std::uint64_t{1} << len) - 1);
    return static_cast<std::uint32_t>(window & mask);
}

} // namespace

void extract_substrings_raw(const std::uint8_t* bytes, std::size_t nbytes,
                            const SubstringLayout& layout,
                            std::uint32_t* out) {
    for (std::size_t k = 0; k < layout.lengths.size(); ++k)
        out[k] = read_bits(bytes, nbytes, layout.offsets[k],
                           layout.lengths[k]);
}

std::vector<std::uint32_t> extract_substrings(const BinaryDescriptor& d,
                                              const SubstringLayout& layout) {
    if (layout.total_bits != d.size_bits())
        throw invalid_input("layout does not cover the descriptor length");
    std::vector<std::uint32_t> keys(layout.table_count());
    extract_substrings_raw(d.data(), d.size_bytes(), layout, keys.data());
    return keys;
}

FrameFeatures::FrameFeatures(std::uint32_t frame_id,
                             std::uint32_t descriptor_bits)
    : frame_id_(frame_id), nbits_(descriptor_bits) {
    if (descriptor_bits == 0 || descriptor_bits % 8 != 0)
        throw invalid_input("descriptor length must be a positive multiple "
                            "of 8 bits");
}

void FrameFeatures::add(const BinaryDescriptor& d) {
    if (d.size_bits() != nbits_)
        throw invalid_input("descriptor length mismatch");
    add_raw(d.data());
}

void FrameFeatures::add_raw(const std::uint8_t* bytes) {
    storage_.insert(storage_.end(), bytes, bytes + descriptor_bytes());
    ++count_;
}

BinaryDescriptor FrameFeatures::descriptor(std::size_t i) const {
    if (i >= count_) throw invalid_input("feature index out of range");
    return BinaryDescriptor(descriptor_data(i), nbits_);
}

} // namespace mih
