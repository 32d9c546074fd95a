#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Hamming-distance kernels over packed binary descriptors.
//
// A scalar reference implementation is always available; on x86-64 an AVX2
// variant and on arm64 a NEON variant are compiled in and selected at
// runtime. The dispatched entry points (`hamming`, `hamming_batch`) bind the
// best available implementation once, at first use. All variants compute the
// identical result and are equivalence-tested against each other.

namespace mih::kernels {

/// Popcount of (a XOR b) over `nbytes` bytes. Scalar reference path.
std::uint32_t hamming_scalar(const std::uint8_t* a, const std::uint8_t* b,
                             std::size_t nbytes);

/// Distances from one query descriptor to `count` contiguous descriptors of
/// `nbytes` bytes each. Scalar reference path.
void hamming_batch_scalar(const std::uint8_t* query, const std::uint8_t* base,
                          std::size_t count, std::size_t nbytes,
                          std::uint32_t* out);

#if defined(MIH_BUILD_AVX2)
std::uint32_t hamming_avx2(const std::uint8_t* a, const std::uint8_t* b,
                           std::size_t nbytes);
void hamming_batch_avx2(const std::uint8_t* query, const std::uint8_t* base,
                        std::size_t count, std::size_t nbytes,
                        std::uint32_t* out);
#endif

#if defined(MIH_BUILD_NEON)
std::uint32_t hamming_neon(const std::uint8_t* a, const std::uint8_t* b,
                           std::size_t nbytes);
void hamming_batch_neon(const std::uint8_t* query, const std::uint8_t* base,
                        std::size_t count, std::size_t nbytes,
                        std::uint32_t* out);
#endif

using HammingFn = std::uint32_t (*)(const std::uint8_t*, const std::uint8_t*,
                                    std::size_t);
using HammingBatchFn = void (*)(const std::uint8_t*, const std::uint8_t*,
                                std::size_t, std::size_t, std::uint32_t*);

/// Dispatched single-pair distance.
extern const HammingFn hamming;

/// Dispatched one-vs-many distance.
extern const HammingBatchFn hamming_batch;

/// Name of the implementation bound at startup: "avx2", "neon" or "scalar".
std::string_view active_implementation();

} // namespace mih::kernels
