#pragma once

#include <cstdint>
#include <vector>

#include "mih/mih_index.hpp"

// One-shot frame-to-frame feature matching over a throwaway multi-index
// built on the first frame. The 24-way split keeps the fixed table overhead
// at 40,960 entries, so building and discarding the index per call is
// cheap; candidates are filtered by the descriptor-prefix early check
// before full distances are evaluated.

namespace mih {

struct SparseMatchParams {
    MihParams mih;     // defaults below: 24-way split, radius 0, caps off
    bool mutual = false;           // keep only mutual-best pairs
    bool early_termination = true;

    SparseMatchParams() {
        mih.layout = SubstringLayout::balanced(24, 256);
        mih.enable_caps = false;
    }
};

struct FeatureMatch {
    std::uint32_t query_feature = 0; // index into the second frame
    std::uint32_t train_feature = 0; // index into the first frame
    std::uint32_t distance = 0;
};

struct MatchResult {
    std::vector<FeatureMatch> matches; // ascending query_feature
    std::uint64_t candidates_examined = 0;
    std::uint64_t early_rejections = 0;
    std::uint64_t full_distance_evals = 0;
};

/// Indexes f1, then matches each feature of f2 to its minimum-distance
/// candidate at distance <= d0 (ties break toward the lowest train id).
/// With mutual set, a reverse pass filters to mutual-best pairs.
MatchResult match_frames(const FrameFeatures& f1, const FrameFeatures& f2,
                         const SparseMatchParams& params = {});

/// Exhaustive all-pairs baseline with the same cutoff and tie-break; its
/// full_distance_evals counter is |f1| * |f2|.
MatchResult match_frames_bruteforce(const FrameFeatures& f1,
                                    const FrameFeatures& f2,
                                    const SparseMatchParams& params = {});

} // namespace mih
