#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "mih/descriptor.hpp"

// Multi-index hash structure: one hash table per descriptor substring,
// storing (frame, feature) references. A stored descriptor becomes a
// candidate when it collides with the query in at least one table; probe
// radius r additionally probes every key within Hamming distance r of the
// query's substring. Burstiness is contained at insert time by a per-entry
// per-frame cap and a per-entry saturation cap.

namespace mih {

struct MihParams {
    SubstringLayout layout = SubstringLayout::balanced(16, 256);
    std::uint32_t probe_radius = 0;
    std::uint32_t d0 = 50;              // Hamming acceptance threshold
    double sigma = 18.0;                // similarity bandwidth passthrough
    std::uint32_t intra_cap = 2;        // per-entry refs from one frame
    std::uint32_t bucket_cap_factor = 50;
    std::uint64_t expected_max_features = 2'000'000;
    std::uint32_t prefix_bits = 64;     // early-termination prefix
    std::uint32_t partial_threshold = 24;
    bool enable_caps = true;

    /// Per-table saturation cap: bucket_cap_factor * expected_max_features
    /// / 2^length, clamped to at least 1. Uses the table's own length when
    /// the layout is unbalanced.
    std::uint64_t bucket_cap(std::uint32_t table) const;

    /// Throws invalid_input when a field is out of range.
    void validate() const;
};

struct CandidateRef {
    std::uint32_t frame_id = 0;
    std::uint32_t feature_id = 0;

    friend bool operator==(const CandidateRef&, const CandidateRef&) = default;
    friend auto operator<=>(const CandidateRef&, const CandidateRef&) = default;
};

struct IndexStats {
    std::uint32_t frame_count = 0;
    std::uint64_t feature_count = 0;
    std::uint64_t saturated_entries = 0;
    double mean_entry_load = 0.0; // stored refs / total entry slots
    std::uint64_t stored_refs = 0;
};

class MihIndex {
public:
    /// Excluded frames return true; a default-constructed (empty) predicate
    /// excludes nothing.
    using ExcludeFn = std::function<bool(std::uint32_t)>;

    explicit MihIndex(const MihParams& params);

    /// Stores the frame and appends each feature's reference to its m
    /// entries, subject to the intra-frame and saturation caps. Returns the
    /// index-assigned sequential frame id.
    std::uint32_t insert_frame(const FrameFeatures& features);

    /// Deduplicated union of references across all probed entries, sorted
    /// by frame then feature. Saturated entries contribute nothing.
    std::vector<CandidateRef> query_candidates(
        const BinaryDescriptor& query, const ExcludeFn& exclude = {}) const;

    /// Raw-pointer variant; bytes must hold descriptor_bits() bits. Appends
    /// into out (cleared first).
    void query_candidates_raw(const std::uint8_t* bytes,
                              std::vector<CandidateRef>& out,
                              const ExcludeFn& exclude = {}) const;

    IndexStats candidate_stats() const;

    const MihParams& params() const { return params_; }
    std::uint32_t descriptor_bits() const { return params_.layout.total_bits; }
    std::uint32_t frame_count() const {
        return static_cast<std::uint32_t>(frames_.size());
    }
    const FrameFeatures& stored_frame(std::uint32_t id) const;

    /// Snapshot: magic "MIH1", version, params, stored frames, per-table
    /// entry dumps. A loaded index reproduces query results bit-exactly.
    void save(std::ostream& out) const;
    static MihIndex load(std::istream& in);

private:
    struct Entry {
        std::vector<CandidateRef> refs;
        bool saturated = false;
    };

    // Dense tables (length <= 16 bits) are flat arrays of 2^length slots,
    // realizing the fixed-overhead accounting; longer keys fall back to a
    // sparse map.
    struct Table {
        std::vector<Entry> dense;
        std::unordered_map<std::uint32_t, Entry> sparse;
        bool is_dense = false;
    };

    Entry* find_entry(std::uint32_t table, std::uint32_t key);
    const Entry* find_entry(std::uint32_t table, std::uint32_t key) const;
    Entry& entry_for_insert(std::uint32_t table, std::uint32_t key);
    void gather(const Entry* entry, const ExcludeFn& exclude,
                std::vector<CandidateRef>& out) const;

    MihParams params_;
    std::vector<Table> tables_;
    std::vector<FrameFeatures> frames_;
    std::uint64_t feature_count_ = 0;
    std::uint64_t stored_refs_ = 0;
    std::uint64_t saturated_entries_ = 0;
};

} // namespace mih
