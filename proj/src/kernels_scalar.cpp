#include "mih/kernels.hpp"

#include <bit>
#include <cstring>

namespace mih::kernels {

std::uint32_t hamming_scalar(const std::uint8_t* a, const std::uint8_t* b,
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

void hamming_batch_scalar(const std::uint8_t* query, const std::uint8_t* base,
                          std::size_t count, std::size_t nbytes,
                          std::uint32_t* out) {
    for (std::size_t k = 0; k < count; ++k)
        out[k] = hamming_scalar(query, base + k * nbytes, nbytes);
}

} // namespace mih::kernels
