#include "mih/kernels.hpp"

#include <bit>
#include <cstring>
#include <immintrin.h>

// AVX2 Hamming distance: XOR 32-byte blocks, count bits per byte with a
// nibble lookup table (pshufb), then horizontally add with SAD against zero.
// Tails shorter than 32 bytes fall back to 64-bit popcounts.

namespace mih::kernels {

namespace {

inline std::uint32_t popcount256(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i lo = _mm256_and_si256(v, low_mask);
    __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo),
                                  _mm256_shuffle_epi8(lut, hi));
    __m256i sums = _mm256_sad_epu8(cnt, _mm256_setzero_si256());
    // sums holds four 64-bit partial sums, one per 8-byte lane.
    __m128i lo128 = _mm256_castsi256_si128(sums);
    __m128i hi128 = _mm256_extracti128_si256(sums, 1);
    __m128i tot = _mm_add_epi64(lo128, hi128);
    return static_cast<std::uint32_t>(_mm_cvtsi128_si64(tot) +
                                      _mm_extract_epi64(tot, 1));
}

inline std::uint32_t tail_distance(const std::uint8_t* a, const std::uint8_t* b,
                                   std::size_t nbytes) {
    std::uint32_t dist = 0;
    std::size_t i = 0;
    for (; i + 8 <= nbytes; i += 8) {
        std::uint64_t wa, wb;
        std::memcpy(&wa, a + i, 8);
        std::memcpy(&wb, b + i, 8);
        dist += static_cast<std::uint32_t>(_mm_popcnt_u64(wa ^ wb));
    }
    for (; i < nbytes; ++i)
        dist += static_cast<std::uint32_t>(
            std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
    return dist;
}

} // namespace

std::uint32_t hamming_avx2(const std::uint8_t* a, const std::uint8_t* b,
                           std::size_t nbytes) {
    std::uint32_t dist = 0;
    std::size_t i = 0;
    for (; i + 32 <= nbytes; i += 32) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        dist += popcount256(_mm256_xor_si256(va, vb));
    }
    return dist + tail_distance(a + i, b + i, nbytes - i);
}

void hamming_batch_avx2(const std::uint8_t* query, const std::uint8_t* base,
                        std::size_t count, std::size_t nbytes,
                        std::uint32_t* out) {
    if (nbytes == 32) {
        // Dominant case: 256-bit descriptors, one vector pair per candidate.
        __m256i q = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(query));
        for (std::size_t k = 0; k < count; ++k) {
            __m256i c = _mm256_loadu_si256(
                reinterpret_cast<const __m256i*>(base + k * 32));
            out[k] = popcount256(_mm256_xor_si256(q, c));
        }
        return;
    }
    for (std::size_t k = 0; k < count; ++k)
        out[k] = hamming_avx2(query, base + k * nbytes, nbytes);
}

} // namespace mih::kernels
