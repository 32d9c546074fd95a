#pragma once

#include <cstdint>
#include <vector>

#include "mih/descriptor.hpp"
#include "mih/mih_index.hpp"

// Feature-pair and image-pair similarity. The exact image similarity is the
// brute-force all-pairs mean of the feature similarity; the index path
// approximates it by summing only over retrieved candidates, optionally
// re-weighting each query feature by an inverse-document-frequency term to
// suppress elements that repeat across many frames (burstiness).

namespace mih {

struct SimilarityParams {
    double sigma = 18.0;              // similarity bandwidth (Hamming units)
    std::uint32_t d0 = 50;            // distances above this score zero
    std::uint32_t idf_min_frames = 10;  // below this the IDF factor is 1
    std::uint32_t prefix_bits = 64;
    std::uint32_t partial_threshold = 24;
    bool early_termination = true;
};

/// exp(-(d/sigma)^2) for d <= d0, else exactly 0. Strictly decreasing on
/// [0, d0], equal to 1 at d = 0 and to e^-1 at d = sigma.
double feature_similarity(std::uint32_t d, const SimilarityParams& p);

/// Brute-force mean similarity over all feature pairs:
/// sum_i sum_j phi(d(f_i, f_j)) / (|Fp| * |Fq|). Symmetric; the oracle the
/// index path is validated against.
double image_similarity_exact(const FrameFeatures& fp,
                              const FrameFeatures& fq,
                              const SimilarityParams& p);

struct FrameScore {
    std::uint32_t frame_id = 0;
    double accumulated = 0.0;          // per-pair contributions, unnormalized
    std::uint64_t candidate_features = 0; // |F_k| of that frame
    double normalized = 0.0;           // accumulated / (|F_n| * |F_k|)
};

struct ScoreVector {
    std::uint32_t query_frame_id = 0;
    std::vector<FrameScore> scores;    // nonzero frames, ascending frame_id
    std::uint64_t candidates_examined = 0;
    std::uint64_t early_rejections = 0;
    std::uint64_t full_distance_evals = 0;

    /// Pointer to the entry for frame_id, or nullptr when it scored 0.
    const FrameScore* find(std::uint32_t frame_id) const;
};

/// Scores one query frame against every eligible stored frame. Per query
/// feature: retrieve candidates, early-reject on the descriptor prefix,
/// evaluate full distances for survivors, then accumulate phi per frame.
/// With burstiness on, each pair contribution becomes
/// ln(N / N_i) * phi / sum-of-phi-over-survivors, where N counts eligible
/// (non-excluded) stored frames and N_i the distinct frames holding a
/// survivor with phi > 0; when N < idf_min_frames the ln factor is replaced
/// by 1. Deterministic for any thread count.
ScoreVector score_query(const FrameFeatures& query, const MihIndex& index,
                        const SimilarityParams& p, bool burstiness,
                        const MihIndex::ExcludeFn& exclude = {});

} // namespace mih
