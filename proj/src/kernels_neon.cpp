#include "mih/kernels.hpp"

#include <arm_neon.h>
#include <bit>
#include <cstring>

// NEON Hamming distance: XOR 16-byte blocks, per-byte popcount with vcntq_u8,
// widen-accumulate, horizontal add. Tails fall back to 64-bit popcounts.

namespace mih::kernels {

namespace {

inline std::uint32_t tail_distance(const std::uint8_t* a, const std::uint8_t* b,
                                   std::size_t nbytes) {
    std::uint32_t dist = 0;
    std::size_t i = 0;
    for (; i + 8 <= nbytes; i += 8) {
        std::uint64_t wa, wb;
        std::memcpy(&wa, a + i, 8);
        std::memcpy(&wb, b + i, 8);
        dist += static_cast<std::uint32_t>(std::popcount(wa ^ wb));
    }
    for (; i < nbytes; ++i)
        dist += static_cast<std::uint32_t>(
            std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
    return dist;
}

} // namespace

std::uint32_t hamming_neon(const std::uint8_t* a, const std::uint8_t* b,
                           std::size_t nbytes) {
    std::uint32_t dist = 0;
    std::size_t i = 0;
    if (nbytes >= 16) {
        uint16x8_t acc = vdupq_n_u16(0);
        for (; i + 16 <= nbytes; i += 16) {
            uint8x16_t va = vld1q_u8(a + i);
            uint8x16_t vb = vld1q_u8(b + i);
            acc = vpadalq_u8(acc, vcntq_u8(veorq_u8(va, vb)));
        }
        dist = vaddvq_u16(acc);
    }
    return dist + tail_distance(a + i, b + i, nbytes - i);
}

void hamming_batch_neon(const std::uint8_t* query, const std::uint8_t* base,
                        std::size_t count, std::size_t nbytes,
                        std::uint32_t* out) {
    for (std::size_t k = 0; k < count; ++k)
        out[k] = hamming_neon(query, base + k * nbytes, nbytes);
}

} // namespace mih::kernels
