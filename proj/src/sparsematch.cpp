#include "mih/sparsematch.hpp"

#include <limits>
#include <optional>

#include "mih/error.hpp"
#include "mih/kernels.hpp"
#include "mih/parallel.hpp"

namespace mih {

namespace {

struct PerQuery {
    std::optional<FeatureMatch> match;
    std::uint64_t candidates = 0;
    std::uint64_t early_rejected = 0;
    std::uint64_t full_evals = 0;
};

void validate_pair(const FrameFeatures& f1, const FrameFeatures& f2,
                   const SparseMatchParams& params) {
    if (f1.empty() || f2.empty())
        throw invalid_input("sparse match requires nonempty frames");
    if (f1.descriptor_bits() != f2.descriptor_bits())
        throw invalid_input("descriptor length mismatch");
    if (f1.descriptor_bits() != params.mih.layout.total_bits)
        throw invalid_input("layout does not cover the descriptor length");
}

// Minimum-distance match of each f2 feature against the indexed f1.
MatchResult match_one_direction(const FrameFeatures& f1,
                                const FrameFeatures& f2,
                                const SparseMatchParams& params) {
    MihIndex index(params.mih);
    index.insert_frame(f1);

    const std::size_t prefix_bytes = params.mih.prefix_bits / 8;
    const std::size_t desc_bytes = f1.descriptor_bytes();
    std::vector<PerQuery> slots(f2.size());

    parallel::parallel_for(0, f2.size(), [&](std::size_t j) {
        PerQuery& slot = slots[j];
        const std::uint8_t* q = f2.descriptor_data(j);
        std::vector<CandidateRef> omega;
        index.query_candidates_raw(q, omega);
        slot.candidates = omega.size();
        std::uint32_t best_d = std::numeric_limits<std::uint32_t>::max();
        std::optional<std::uint32_t> best;
        // omega is sorted by feature id, so strict improvement keeps the
        // lowest train id on distance ties.
        for (const CandidateRef& ref : omega) {
            const std::uint8_t* c = f1.descriptor_data(ref.feature_id);
            if (params.early_termination &&
                kernels::hamming(q, c, prefix_bytes) >
                    params.mih.partial_threshold) {
                ++slot.early_rejected;
                continue;
            }
            const std::uint32_t d = kernels::hamming(q, c, desc_bytes);
            ++slot.full_evals;
            if (d <= params.mih.d0 && d < best_d) {
                best_d = d;
                best = ref.feature_id;
            }
        }
        if (best)
            slot.match = FeatureMatch{static_cast<std::uint32_t>(j), *best,
                                      best_d};
    });

    MatchResult result;
    for (const PerQuery& slot : slots) {
        result.candidates_examined += slot.candidates;
        result.early_rejections += slot.early_rejected;
        result.full_distance_evals += slot.full_evals;
        if (slot.match) result.matches.push_back(*slot.match);
    }
    return result;
}

MatchResult bruteforce_one_direction(const FrameFeatures& f1,
                                     const FrameFeatures& f2,
                                     const SparseMatchParams& params) {
    const std::size_t desc_bytes = f1.descriptor_bytes();
    std::vector<PerQuery> slots(f2.size());

    parallel::parallel_for(0, f2.size(), [&](std::size_t j) {
        PerQuery& slot = slots[j];
        std::vector<std::uint32_t> dists(f1.size());
        kernels::hamming_batch(f2.descriptor_data(j), f1.raw_storage(),
                               f1.size(), desc_bytes, dists.data());
        slot.full_evals = f1.size();
        std::uint32_t best_d = std::numeric_limits<std::uint32_t>::max();
        std::optional<std::uint32_t> best;
        for (std::size_t i = 0; i < f1.size(); ++i)
            if (dists[i] <= params.mih.d0 && dists[i] < best_d) {
                best_d = dists[i];
                best = static_cast<std::uint32_t>(i);
            }
        if (best)
            slot.match = FeatureMatch{static_cast<std::uint32_t>(j), *best,
                                      best_d};
    });

    MatchResult result;
    for (const PerQuery& slot : slots) {
        result.full_distance_evals += slot.full_evals;
        if (slot.match) result.matches.push_back(*slot.match);
    }
    return result;
}

// Keeps forward matches whose train feature maps straight back to the
// query feature in the reverse direction.
template <typename MatchFn>
MatchResult mutual_filter(MatchResult forward, const FrameFeatures& f1,
                          const FrameFeatures& f2,
                          const SparseMatchParams& params, MatchFn&& reverse) {
    MatchResult rev = reverse(f2, f1, params);
    std::vector<std::optional<std::uint32_t>> back(f1.size());
    for (const FeatureMatch& m : rev.matches)
        back[m.query_feature] = m.train_feature;

    MatchResult result;
    result.candidates_examined =
        forward.candidates_examined + rev.candidates_examined;
    result.early_rejections = forward.early_rejections + rev.early_rejections;
    result.full_distance_evals =
        forward.full_distance_evals + rev.full_distance_evals;
    for (const FeatureMatch& m : forward.matches)
        if (back[m.train_feature] &&
            *back[m.train_feature] == m.query_feature)
            result.matches.push_back(m);
    return result;
}

} // namespace

MatchResult match_frames(const FrameFeatures& f1, const FrameFeatures& f2,
                         const SparseMatchParams& params) {
    validate_pair(f1, f2, params);
    MatchResult forward = match_one_direction(f1, f2, params);
    if (!params.mutual) return forward;
    return mutual_filter(std::move(forward), f1, f2, params,
                         match_one_direction);
}

MatchResult match_frames_bruteforce(const FrameFeatures& f1,
                                    const FrameFeatures& f2,
                                    const SparseMatchParams& params) {
    validate_pair(f1, f2, params);
    MatchResult forward = bruteforce_one_direction(f1, f2, params);
    if (!params.mutual) return forward;
    return mutual_filter(std::move(forward), f1, f2, params,
                         bruteforce_one_direction);
}

} // namespace mih
