#include "mih/lcd.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "mih/error.hpp"

namespace mih {

namespace {

std::uint64_t elapsed_us(std::chrono::steady_clock::time_point from) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - from)
            .count());
}

} // namespace

LcdPipeline::LcdPipeline(const LcdConfig& cfg)
    : cfg_(cfg), index_(cfg.mih) {
    cfg_.similarity.early_termination = cfg.early_termination;
}

DetectionRecord LcdPipeline::process_frame(const FrameFeatures& features) {
    if (features.empty())
        throw invalid_input("empty frame carries no signal; skip it");

    const std::uint32_t t = index_.frame_count();
    const std::uint32_t window = cfg_.exclusion_window;
    // Candidate c is eligible iff c + window < t, keeping the most recent
    // `window` stored frames (and the frame itself) out of the score.
    const auto exclude = [t, window](std::uint32_t c) {
        return c + window >= t;
    };

    DetectionRecord record;
    record.query_index_id = t;
    record.query_input_id = features.frame_id();

    auto start = std::chrono::steady_clock::now();
    record.scores = score_query(features, index_, cfg_.similarity,
                                cfg_.burstiness, exclude);
    record.query_us = elapsed_us(start);

    for (const FrameScore& s : record.scores.scores) {
        if (!record.best_candidate || s.normalized > record.best_score) {
            record.best_candidate = s.frame_id;
            record.best_score = s.normalized;
        }
    }
    if (record.best_candidate)
        record.best_candidate_input = input_ids_[*record.best_candidate];

    start = std::chrono::steady_clock::now();
    index_.insert_frame(features);
    record.ingest_us = elapsed_us(start);
    input_ids_.push_back(features.frame_id());
    return record;
}

std::uint32_t LcdPipeline::input_id_of(std::uint32_t index_id) const {
    if (index_id >= input_ids_.size())
        throw invalid_input("frame id out of range");
    return input_ids_[index_id];
}

SequenceReport run_sequence(const std::vector<FrameFeatures>& frames,
                            const LcdConfig& cfg) {
    LcdPipeline pipeline(cfg);
    SequenceReport report;
    for (std::size_t pos = 0; pos < frames.size(); ++pos) {
        if (frames[pos].empty()) {
            ++report.skipped_empty_frames;
            continue;
        }
        if (frames[pos].descriptor_bits() != cfg.mih.layout.total_bits)
            throw invalid_input("frame " + std::to_string(pos) +
                                ": descriptor length does not match the "
                                "index layout");
        report.records.push_back(pipeline.process_frame(frames[pos]));
    }

    if (report.records.empty()) return report;
    std::vector<double> query_times;
    query_times.reserve(report.records.size());
    double query_sum = 0.0, ingest_sum = 0.0;
    for (const DetectionRecord& rec : report.records) {
        query_times.push_back(static_cast<double>(rec.query_us));
        query_sum += static_cast<double>(rec.query_us);
        ingest_sum += static_cast<double>(rec.ingest_us);
    }
    std::sort(query_times.begin(), query_times.end());
    const auto n = query_times.size();
    report.mean_query_us = query_sum / static_cast<double>(n);
    report.p50_query_us = query_times[n / 2];
    report.p95_query_us = query_times[(n * 95) / 100 < n ? (n * 95) / 100
                                                         : n - 1];
    report.max_query_us = query_times.back();
    report.mean_ingest_us = ingest_sum / static_cast<double>(n);
    return report;
}

} // namespace mih
