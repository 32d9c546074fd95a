#include "mih/kernels.hpp"

namespace mih::kernels {

namespace {

struct Binding {
    HammingFn single;
    HammingBatchFn batch;
    std::string_view name;
};

Binding select() {
#if defined(MIH_BUILD_AVX2)
    if (__builtin_cpu_supports("avx2"))
        return {hamming_avx2, hamming_batch_avx2, "avx2"};
#endif
#if defined(MIH_BUILD_NEON)
    return {hamming_neon, hamming_batch_neon, "neon"};
#endif
    return {hamming_scalar, hamming_batch_scalar, "scalar"};
}

const Binding bound = select();

} // namespace

const HammingFn hamming = bound.single;
const HammingBatchFn hamming_batch = bound.batch;

std::string_view active_implementation() { return bound.name; }

} // namespace mih::kernels
