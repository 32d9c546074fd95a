#include "mih/mih_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "mih/binio.hpp"
#include "mih/error.hpp"

namespace mih {

std::uint64_t MihParams::bucket_cap(std::uint32_t table) const {
    const std::uint32_t len = layout.lengths.at(table);
    const std::uint64_t slots = std::uint64_t{1} << len;
    if (bucket_cap_factor != 0 &&
        expected_max_features >
            std::numeric_limits<std::uint64_t>::max() / bucket_cap_factor)
        return std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t cap = bucket_cap_factor * expected_max_features / slots;
    return cap == 0 ? 1 : cap;
}

void MihParams::validate() const {
    if (layout.lengths.empty() || layout.total_bits == 0)
        throw invalid_input("layout must define at least one substring");
    std::uint32_t sum = 0;
    for (const std::uint32_t len : layout.lengths) {
        if (len == 0 || len > 32)
            throw invalid_input("substring lengths must lie in [1, 32]");
        sum += len;
    }
    if (sum != layout.total_bits || layout.total_bits % 8 != 0)
        throw invalid_input("layout lengths must cover the descriptor");
    if (d0 > layout.total_bits)
        throw invalid_input("acceptance threshold exceeds the descriptor "
                            "length");
    if (sigma <= 0.0) throw invalid_input("sigma must be positive");
    if (intra_cap == 0) throw invalid_input("intra-frame cap must be >= 1");
    if (prefix_bits == 0 || prefix_bits % 8 != 0 ||
        prefix_bits > layout.total_bits)
        throw invalid_input("prefix must be a positive multiple of 8 bits "
                            "within the descriptor length");
}

MihIndex::MihIndex(const MihParams& params) : params_(params) {
    params_.validate();
    tables_.resize(params_.layout.table_count());
    for (std::uint32_t k = 0; k < tables_.size(); ++k) {
        if (params_.layout.lengths[k] <= 16) {
            tables_[k].is_dense = true;
            tables_[k].dense.resize(std::size_t{1}
                                    << params_.layout.lengths[k]);
        }
    }
}

MihIndex::Entry* MihIndex::find_entry(std::uint32_t table,
                                      std::uint32_t key) {
    Table& t = tables_[table];
    if (t.is_dense) return &t.dense[key];
    const auto it = t.sparse.find(key);
    return it == t.sparse.end() ? nullptr : &it->second;
}

const MihIndex::Entry* MihIndex::find_entry(std::uint32_t table,
                                            std::uint32_t key) const {
    const Table& t = tables_[table];
    if (t.is_dense) return &t.dense[key];
    const auto it = t.sparse.find(key);
    return it == t.sparse.end() ? nullptr : &it->second;
}

MihIndex::Entry& MihIndex::entry_for_insert(std::uint32_t table,
                                            std::uint32_t key) {
    Table& t = tables_[table];
    return t.is_dense ? t.dense[key] : t.sparse[key];
}

std::uint32_t MihIndex::insert_frame(const FrameFeatures& features) {
    if (features.descriptor_bits() != descriptor_bits())
        throw invalid_input("descriptor length mismatch");
    const auto id = static_cast<std::uint32_t>(frames_.size());
    const std::uint32_t m = params_.layout.table_count();
    std::vector<std::uint32_t> keys(m);
    for (std::size_t i = 0; i < features.size(); ++i) {
        extract_substrings_raw(features.descriptor_data(i),
                               features.descriptor_bytes(), params_.layout,
                               keys.data());
        for (std::uint32_t k = 0; k < m; ++k) {
            Entry& entry = entry_for_insert(k, keys[k]);
            if (entry.saturated) continue;
            if (params_.enable_caps) {
                // Refs from the frame being inserted sit at the tail.
                std::uint32_t from_this_frame = 0;
                for (auto it = entry.refs.rbegin();
                     it != entry.refs.rend() && it->frame_id == id; ++it)
                    ++from_this_frame;
                if (from_this_frame >= params_.intra_cap) continue;
                if (entry.refs.size() >= params_.bucket_cap(k)) {
                    entry.saturated = true;
                    ++saturated_entries_;
                    continue;
                }
            }
            entry.refs.push_back({id, static_cast<std::uint32_t>(i)});
            ++stored_refs_;
        }
    }
    feature_count_ += features.size();
    frames_.push_back(features);
    frames_.back().set_frame_id(id);
    return id;
}

namespace {

// Visits the probe set of one substring: the key itself, then for each
// radius t = 1..r every key with t bits flipped, combinations in ascending
// flipped-bit order.
template <typename Fn>
void for_each_probe_key(std::uint32_t key, std::uint32_t len,
                        std::uint32_t radius, Fn&& fn) {
    fn(key);
    for (std::uint32_t t = 1; t <= radius && t <= len; ++t) {
        std::vector<std::uint32_t> c(t);
        std::iota(c.begin(), c.end(), 0u);
        for (;;) {
            std::uint32_t mask = 0;
            for (const std::uint32_t bit : c) mask |= 1u << bit;
            fn(key ^ mask);
            // next combination in lexicographic order
            int i = static_cast<int>(t) - 1;
            while (i >= 0 && c[i] == len - t + static_cast<std::uint32_t>(i))
                --i;
            if (i < 0) break;
            ++c[i];
            for (std::size_t j = static_cast<std::size_t>(i) + 1; j < t; ++j)
                c[j] = c[j - 1] + 1;
        }
    }
}

} // namespace

void MihIndex::gather(const Entry* entry, const ExcludeFn& exclude,
                      std::vector<CandidateRef>& out) const {
    if (!entry || entry->saturated) return;
    for (const CandidateRef& ref : entry->refs)
        if (!exclude || !exclude(ref.frame_id)) out.push_back(ref);
}

void MihIndex::query_candidates_raw(const std::uint8_t* bytes,
                                    std::vector<CandidateRef>& out,
                                    const ExcludeFn& exclude) const {
    out.clear();
    const std::uint32_t m = params_.layout.table_count();
    std::vector<std::uint32_t> keys(m);
    extract_substrings_raw(bytes, descriptor_bits() / 8, params_.layout,
                           keys.data());
    for (std::uint32_t k = 0; k < m; ++k)
        for_each_probe_key(keys[k], params_.layout.lengths[k],
                           params_.probe_radius, [&](std::uint32_t probe) {
                               gather(find_entry(k, probe), exclude, out);
                           });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::vector<CandidateRef> MihIndex::query_candidates(
    const BinaryDescriptor& query, const ExcludeFn& exclude) const {
    if (query.size_bits() != descriptor_bits())
        throw invalid_input("descriptor length mismatch");
    std::vector<CandidateRef> out;
    query_candidates_raw(query.data(), out, exclude);
    return out;
}

IndexStats MihIndex::candidate_stats() const {
    IndexStats stats;
    stats.frame_count = frame_count();
    stats.feature_count = feature_count_;
    stats.saturated_entries = saturated_entries_;
    stats.stored_refs = stored_refs_;
    long double slots = 0.0L;
    for (const std::uint32_t len : params_.layout.lengths)
        slots += std::pow(2.0L, static_cast<long double>(len));
    stats.mean_entry_load =
        slots > 0.0L
            ? static_cast<double>(static_cast<long double>(stored_refs_) /
                                  slots)
            : 0.0;
    return stats;
}

const FrameFeatures& MihIndex::stored_frame(std::uint32_t id) const {
    if (id >= frames_.size()) throw invalid_input("frame id out of range");
    return frames_[id];
}

void MihIndex::save(std::ostream& out) const {
    binio::Writer w(out);
    w.bytes("MIH1", 4);
    w.u32(1); // version
    w.u32(params_.layout.total_bits);
    w.u32(params_.layout.table_count());
    for (const std::uint32_t len : params_.layout.lengths) w.u32(len);
    w.u32(params_.probe_radius);
    w.u32(params_.d0);
    w.f64(params_.sigma);
    w.u32(params_.intra_cap);
    w.u32(params_.bucket_cap_factor);
    w.u64(params_.expected_max_features);
    w.u32(params_.prefix_bits);
    w.u32(params_.partial_threshold);
    w.u8(params_.enable_caps ? 1 : 0);

    w.u32(frame_count());
    for (const FrameFeatures& frame : frames_) {
        w.u32(frame.frame_id());
        w.u32(static_cast<std::uint32_t>(frame.size()));
        w.bytes(frame.raw_storage(), frame.size() * frame.descriptor_bytes());
    }

    auto dump_entry = [&](std::uint32_t key, const Entry& entry) {
        w.u32(key);
        w.u8(entry.saturated ? 1 : 0);
        w.u32(static_cast<std::uint32_t>(entry.refs.size()));
        for (const CandidateRef& ref : entry.refs) {
            w.u32(ref.frame_id);
            w.u32(ref.feature_id);
        }
    };
    for (const Table& table : tables_) {
        std::uint64_t nonempty = 0;
        if (table.is_dense) {
            for (const Entry& e : table.dense)
                if (!e.refs.empty() || e.saturated) ++nonempty;
            w.u64(nonempty);
            for (std::uint32_t key = 0; key < table.dense.size(); ++key) {
                const Entry& e = table.dense[key];
                if (!e.refs.empty() || e.saturated) dump_entry(key, e);
            }
        } else {
            std::vector<std::uint32_t> sorted_keys;
            sorted_keys.reserve(table.sparse.size());
            for (const auto& [key, e] : table.sparse)
                if (!e.refs.empty() || e.saturated)
                    sorted_keys.push_back(key);
            std::sort(sorted_keys.begin(), sorted_keys.end());
            w.u64(sorted_keys.size());
            for (const std::uint32_t key : sorted_keys)
                dump_entry(key, table.sparse.at(key));
        }
    }
}

MihIndex MihIndex::load(std::istream& in) {
    binio::Reader r(in);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "MIH1", 4) != 0)
        throw parse_error("bad magic, expected MIH1", 0);
    const std::uint64_t version_at = r.offset();
    if (r.u32() != 1)
        throw parse_error("unsupported snapshot version", version_at);

    MihParams params;
    params.layout.total_bits = r.u32();
    const std::uint32_t m = r.u32();
    params.layout.lengths.resize(m);
    params.layout.offsets.resize(m);
    std::uint32_t off = 0;
    for (std::uint32_t k = 0; k < m; ++k) {
        params.layout.lengths[k] = r.u32();
        params.layout.offsets[k] = off;
        off += params.layout.lengths[k];
    }
    params.probe_radius = r.u32();
    params.d0 = r.u32();
    params.sigma = r.f64();
    params.intra_cap = r.u32();
    params.bucket_cap_factor = r.u32();
    params.expected_max_features = r.u64();
    params.prefix_bits = r.u32();
    params.partial_threshold = r.u32();
    params.enable_caps = r.u8() != 0;

    MihIndex index{params}; // validates the layout

    const std::uint32_t frame_count = r.u32();
    index.frames_.reserve(frame_count);
    const std::uint32_t desc_bytes = params.layout.total_bits / 8;
    std::vector<std::uint8_t> buf;
    for (std::uint32_t f = 0; f < frame_count; ++f) {
        const std::uint32_t frame_id = r.u32();
        const std::uint32_t features = r.u32();
        FrameFeatures frame(frame_id, params.layout.total_bits);
        buf.resize(std::size_t{features} * desc_bytes);
        r.bytes(buf.data(), buf.size());
        for (std::uint32_t i = 0; i < features; ++i)
            frame.add_raw(buf.data() + std::size_t{i} * desc_bytes);
        index.feature_count_ += features;
        index.frames_.push_back(std::move(frame));
    }

    for (std::uint32_t k = 0; k < m; ++k) {
        const std::uint64_t nonempty = r.u64();
        for (std::uint64_t e = 0; e < nonempty; ++e) {
            const std::uint64_t key_at = r.offset();
            const std::uint32_t key = r.u32();
            if (params.layout.lengths[k] < 32 &&
                key >= (std::uint64_t{1} << params.layout.lengths[k]))
                throw parse_error("entry key exceeds the substring range",
                                  key_at);
            Entry entry;
            entry.saturated = r.u8() != 0;
            if (entry.saturated) ++index.saturated_entries_;
            const std::uint32_t refs = r.u32();
            entry.refs.reserve(refs);
            for (std::uint32_t j = 0; j < refs; ++j) {
                const std::uint32_t frame_id = r.u32();
                const std::uint32_t feature_id = r.u32();
                entry.refs.push_back({frame_id, feature_id});
            }
            index.stored_refs_ += refs;
            index.entry_for_insert(k, key) = std::move(entry);
        }
    }
    return index;
}

} // namespace mih
