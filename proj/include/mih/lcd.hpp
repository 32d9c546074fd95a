#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mih/mih_index.hpp"
#include "mih/similarity.hpp"

// Streaming loop-closure detection: each incoming frame is scored against
// every stored frame outside a trailing exclusion window, then inserted.
// Detection decisions are raw-score argmax + threshold; the PR harness
// sweeps the threshold over the recorded scores.

namespace mih {

struct LcdConfig {
    MihParams mih;
    SimilarityParams similarity;
    std::uint32_t exclusion_window = 30; // frames kept out of the candidates
    double detection_threshold = 0.0;
    bool burstiness = true;
    bool early_termination = true;
};

struct DetectionRecord {
    std::uint32_t query_index_id = 0; // sequential id assigned by the index
    std::uint32_t query_input_id = 0; // id carried by the input stream
    std::optional<std::uint32_t> best_candidate;       // index id
    std::optional<std::uint32_t> best_candidate_input; // stream id
    double best_score = 0.0;
    ScoreVector scores;
    std::uint64_t ingest_us = 0;
    std::uint64_t query_us = 0;
};

class LcdPipeline {
public:
    explicit LcdPipeline(const LcdConfig& cfg);

    /// Scores the frame against all stored frames except the most recent
    /// exclusion_window ones, then inserts it. Frames must arrive in
    /// temporal order; empty frames are rejected with invalid_input (the
    /// caller skips them, they carry no signal).
    DetectionRecord process_frame(const FrameFeatures& features);

    const MihIndex& index() const { return index_; }
    const LcdConfig& config() const { return cfg_; }
    std::uint32_t input_id_of(std::uint32_t index_id) const;

private:
    LcdConfig cfg_;
    MihIndex index_;
    std::vector<std::uint32_t> input_ids_; // index id -> stream id
};

struct SequenceReport {
    std::vector<DetectionRecord> records;
    std::uint32_t skipped_empty_frames = 0;
    double mean_query_us = 0.0;
    double p50_query_us = 0.0;
    double p95_query_us = 0.0;
    double max_query_us = 0.0;
    double mean_ingest_us = 0.0;
};

/// Folds process_frame over the stream, skipping empty frames, and
/// aggregates the per-frame query timings.
SequenceReport run_sequence(const std::vector<FrameFeatures>& frames,
                            const LcdConfig& cfg);

} // namespace mih
