#include "mih/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "mih/error.hpp"
#include "mih/kernels.hpp"
#include "mih/parallel.hpp"

namespace mih {

double feature_similarity(std::uint32_t d, const SimilarityParams& p) {
    if (p.sigma <= 0.0) throw invalid_input("sigma must be positive");
    if (d > p.d0) return 0.0;
    const double z = static_cast<double>(d) / p.sigma;
    return std::exp(-z * z);
}

double image_similarity_exact(const FrameFeatures& fp,
                              const FrameFeatures& fq,
                              const SimilarityParams& p) {
    if (fp.empty() || fq.empty())
        throw invalid_input("image similarity requires nonempty frames");
    if (fp.descriptor_bits() != fq.descriptor_bits())
        throw invalid_input("descriptor length mismatch");
    const std::size_t nbytes = fp.descriptor_bytes();
    std::vector<std::uint32_t> dists(fq.size());
    double total = 0.0;
    for (std::size_t i = 0; i < fp.size(); ++i) {
        kernels::hamming_batch(fp.descriptor_data(i), fq.raw_storage(),
                               fq.size(), nbytes, dists.data());
        double row = 0.0;
        for (std::size_t j = 0; j < fq.size(); ++j)
            row += feature_similarity(dists[j], p);
        total += row;
    }
    return total / (static_cast<double>(fp.size()) *
                    static_cast<double>(fq.size()));
}

const FrameScore* ScoreVector::find(std::uint32_t frame_id) const {
    const auto it = std::lower_bound(
        scores.begin(), scores.end(), frame_id,
        [](const FrameScore& s, std::uint32_t id) { return s.frame_id < id; });
    return it != scores.end() && it->frame_id == frame_id ? &*it : nullptr;
}

namespace {

// One query feature's sparse result: phi sums per candidate frame plus the
// filter counters, merged sequentially after the parallel phase.
struct FeaturePartial {
    std::vector<std::pair<std::uint32_t, double>> frame_phi; // ascending id
    std::uint64_t candidates = 0;
    std::uint64_t early_rejected = 0;
    std::uint64_t full_evals = 0;
};

} // namespace

ScoreVector score_query(const FrameFeatures& query, const MihIndex& index,
                        const SimilarityParams& p, bool burstiness,
                        const MihIndex::ExcludeFn& exclude) {
    if (query.descriptor_bits() != index.descriptor_bits())
        throw invalid_input("descriptor length mismatch");
    if (p.prefix_bits == 0 || p.prefix_bits % 8 != 0 ||
        p.prefix_bits > query.descriptor_bits())
        throw invalid_input("prefix must be a positive multiple of 8 bits "
                            "within the descriptor length");

    std::uint32_t eligible_frames = 0;
    for (std::uint32_t f = 0; f < index.frame_count(); ++f)
        if (!exclude || !exclude(f)) ++eligible_frames;

    const std::size_t prefix_bytes = p.prefix_bits / 8;
    const std::size_t desc_bytes = query.descriptor_bytes();
    std::vector<FeaturePartial> partials(query.size());

    parallel::parallel_for(0, query.size(), [&](std::size_t i) {
        FeaturePartial& part = partials[i];
        const std::uint8_t* q = query.descriptor_data(i);
        std::vector<CandidateRef> omega;
        index.query_candidates_raw(q, omega, exclude);
        part.candidates = omega.size();
        // omega is sorted by frame, so per-frame sums build up in one pass.
        for (const CandidateRef& ref : omega) {
            const std::uint8_t* c =
                index.stored_frame(ref.frame_id).descriptor_data(
                    ref.feature_id);
            if (p.early_termination &&
                kernels::hamming(q, c, prefix_bytes) > p.partial_threshold) {
                ++part.early_rejected;
                continue;
            }
            const std::uint32_t d = kernels::hamming(q, c, desc_bytes);
            ++part.full_evals;
            const double phi = feature_similarity(d, p);
            if (phi <= 0.0) continue;
            if (!part.frame_phi.empty() &&
                part.frame_phi.back().first == ref.frame_id)
                part.frame_phi.back().second += phi;
            else
                part.frame_phi.emplace_back(ref.frame_id, phi);
        }
    });

    ScoreVector result;
    result.query_frame_id = query.frame_id();
    std::vector<double> accumulated(index.frame_count(), 0.0);
    for (FeaturePartial& part : partials) {
        result.candidates_examined += part.candidates;
        result.early_rejections += part.early_rejected;
        result.full_distance_evals += part.full_evals;
        if (part.frame_phi.empty()) continue;
        if (burstiness) {
            const auto similar_frames =
                static_cast<std::uint32_t>(part.frame_phi.size());
            double phi_total = 0.0;
            for (const auto& [frame, phi] : part.frame_phi) phi_total += phi;
            const double idf =
                eligible_frames < p.idf_min_frames
                    ? 1.0
                    : std::log(static_cast<double>(eligible_frames) /
                               static_cast<double>(similar_frames));
            for (const auto& [frame, phi] : part.frame_phi)
                accumulated[frame] += idf * (phi / phi_total);
        } else {
            for (const auto& [frame, phi] : part.frame_phi)
                accumulated[frame] += phi;
        }
    }

    const auto query_count = static_cast<double>(query.size());
    for (std::uint32_t f = 0; f < index.frame_count(); ++f) {
        if (accumulated[f] == 0.0) continue;
        FrameScore score;
        score.frame_id = f;
        score.accumulated = accumulated[f];
        score.candidate_features = index.stored_frame(f).size();
        score.normalized =
            accumulated[f] /
            (query_count * static_cast<double>(score.candidate_features));
        result.scores.push_back(score);
    }
    return result;
}

} // namespace mih
