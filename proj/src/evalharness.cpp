#include "mih/evalharness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "mih/binio.hpp"
#include "mih/error.hpp"
#include "mih/rng.hpp"

namespace mih {

namespace {

constexpr char kMagic[4] = {'M', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open file: " + path, 0);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open file for writing: " + path, 0);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Descriptor dumps
// ---------------------------------------------------------------------------

std::vector<FrameFeatures> load_descriptors(std::istream& in) {
    binio::Reader r(in);

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw parse_error("bad magic, not a descriptor dump", 0);

    const std::uint64_t version_at = r.offset();
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw parse_error("unsupported version " + std::to_string(version),
                          version_at);

    const std::uint64_t bits_at = r.offset();
    const std::uint32_t bits = r.u32();
    if (bits == 0 || bits % 8 != 0)
        throw parse_error("descriptor bits must be a positive multiple of 8",
                          bits_at);

    const std::uint32_t frame_count = r.u32();
    std::vector<FrameFeatures> frames;
    frames.reserve(frame_count);

    std::vector<std::uint8_t> buf(bits / 8);
    bool have_prev = false;
    std::uint32_t prev_id = 0;
    for (std::uint32_t f = 0; f < frame_count; ++f) {
        const std::uint64_t id_at = r.offset();
        const std::uint32_t frame_id = r.u32();
        if (have_prev && frame_id <= prev_id)
            throw parse_error("frame ids must be strictly increasing", id_at);
        prev_id = frame_id;
        have_prev = true;

        const std::uint32_t feature_count = r.u32();
        FrameFeatures frame(frame_id, bits);
        for (std::uint32_t i = 0; i < feature_count; ++i) {
            r.bytes(buf.data(), buf.size());
            frame.add_raw(buf.data());
        }
        frames.push_back(std::move(frame));
    }

    if (!r.at_end())
        throw parse_error("trailing data after the last frame", r.offset());
    return frames;
}

std::vector<FrameFeatures> load_descriptors(const std::string& path) {
    std::ifstream in = open_input(path);
    return load_descriptors(in);
}

void save_descriptors(const std::vector<FrameFeatures>& frames,
                      std::ostream& out) {
    const std::uint32_t bits =
        frames.empty() ? 256 : frames.front().descriptor_bits();
    for (std::size_t f = 0; f + 1 < frames.size(); ++f)
        if (frames[f].frame_id() >= frames[f + 1].frame_id())
            throw invalid_input("frame ids must be strictly increasing");
    for (const FrameFeatures& frame : frames)
        if (frame.descriptor_bits() != bits)
            throw invalid_input("frames must share one descriptor length");

    binio::Writer w(out);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u32(bits);
    w.u32(static_cast<std::uint32_t>(frames.size()));
    for (const FrameFeatures& frame : frames) {
        w.u32(frame.frame_id());
        w.u32(static_cast<std::uint32_t>(frame.size()));
        w.bytes(frame.raw_storage(), frame.size() * frame.descriptor_bytes());
    }
}

void save_descriptors(const std::vector<FrameFeatures>& frames,
                      const std::string& path) {
    std::ofstream out = open_output(path);
    save_descriptors(frames, out);
    if (!out) throw parse_error("write failed: " + path, 0);
}

// ---------------------------------------------------------------------------
// Ground truth and detection CSVs
// ---------------------------------------------------------------------------

namespace {

// Reads lines while tracking the byte offset of each line start so parse
// errors can point at the offending row.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        line_start_ = total_;
        if (!std::getline(in_, line)) return false;
        total_ += line.size() + (in_.eof() ? 0 : 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    std::size_t line_start() const { return line_start_; }

private:
    std::istream& in_;
    std::size_t total_ = 0;
    std::size_t line_start_ = 0;
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string field = line.substr(
            start, comma == std::string::npos ? comma : comma - start);
        // trim surrounding spaces
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        fields.push_back(b == std::string::npos
                             ? std::string()
                             : field.substr(b, e - b + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool parse_u32(const std::string& field, std::uint32_t& out) {
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !field.empty();
}

bool parse_f64(const std::string& field, double& out) {
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !field.empty();
}

bool blank_or_comment(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t");
    return pos == std::string::npos || line[pos] == '#';
}

} // namespace

GroundTruth load_ground_truth(std::istream& in) {
    GroundTruth gt;
    LineReader lines(in);
    std::string line;
    while (lines.next(line)) {
        if (blank_or_comment(line)) continue;
        const std::vector<std::string> fields = split_fields(line);
        std::uint32_t query = 0, match = 0;
        if (fields.size() != 2 || !parse_u32(fields[0], query) ||
            !parse_u32(fields[1], match))
            throw parse_error("expected 'query_id,match_id'",
                              lines.line_start());
        if (query <= match)
            throw parse_error("query_id must be greater than match_id",
                              lines.line_start());
        gt.pairs.emplace_back(query, match);
    }
    return gt;
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in = open_input(path);
    return load_ground_truth(in);
}

void save_ground_truth(const GroundTruth& gt, std::ostream& out) {
    out << "# query_id,match_id\n";
    for (const auto& [query, match] : gt.pairs)
        out << query << ',' << match << '\n';
}

void save_ground_truth(const GroundTruth& gt, const std::string& path) {
    std::ofstream out = open_output(path);
    save_ground_truth(gt, out);
    if (!out) throw parse_error("write failed: " + path, 0);
}

std::vector<ScoredDetection> load_detections_csv(std::istream& in) {
    std::vector<ScoredDetection> detections;
    LineReader lines(in);
    std::string line;
    bool header_allowed = true;
    while (lines.next(line)) {
        if (blank_or_comment(line)) continue;
        const std::vector<std::string> fields = split_fields(line);
        ScoredDetection det;
        if (fields.size() >= 3 && fields[1].empty()) {
            // query produced no detection; header no longer expected
            header_allowed = false;
            continue;
        }
        if (fields.size() >= 3 && parse_u32(fields[0], det.query_id) &&
            parse_u32(fields[1], det.candidate_id) &&
            parse_f64(fields[2], det.score)) {
            header_allowed = false;
            detections.push_back(det);
            continue;
        }
        if (header_allowed && !fields.empty() &&
            !parse_u32(fields[0], det.query_id)) {
            header_allowed = false; // one header row
            continue;
        }
        throw parse_error("expected 'query_id,candidate_id,score'",
                          lines.line_start());
    }
    return detections;
}

std::vector<ScoredDetection> load_detections_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    return load_detections_csv(in);
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

BinaryDescriptor random_descriptor(std::uint32_t bits, std::mt19937_64& gen) {
    BinaryDescriptor d(bits);
    std::uint8_t* bytes = d.data();
    std::uint32_t remaining = d.size_bytes();
    while (remaining > 0) {
        const std::uint64_t word = gen();
        const std::uint32_t take = remaining < 8 ? remaining : 8;
        std::memcpy(bytes, &word, take);
        bytes += take;
        remaining -= take;
    }
    return d;
}

BinaryDescriptor perturb_distinct(const BinaryDescriptor& base,
                                  std::uint32_t d, std::mt19937_64& gen) {
    if (d > base.size_bits())
        throw invalid_input("cannot flip more bits than the descriptor has");
    BinaryDescriptor out = base;
    for (std::uint32_t pos : rng::sample_distinct(gen, base.size_bits(), d))
        out.flip_bit(pos);
    return out;
}

BinaryDescriptor perturb_balls_into_bins(const BinaryDescriptor& base,
                                         std::uint32_t d,
                                         const SubstringLayout& layout,
                                         std::mt19937_64& gen) {
    if (layout.total_bits != base.size_bits())
        throw invalid_input("layout does not cover the descriptor length");
    if (d > base.size_bits())
        throw invalid_input("cannot flip more bits than the descriptor has");

    const std::uint32_t m = layout.table_count();
    std::vector<std::uint32_t> counts(m);
    while (true) {
        std::fill(counts.begin(), counts.end(), 0u);
        for (std::uint32_t i = 0; i < d; ++i) ++counts[rng::bounded(gen, m)];
        bool fits = true;
        for (std::uint32_t k = 0; k < m; ++k)
            if (counts[k] > layout.lengths[k]) {
                fits = false;
                break;
            }
        if (fits) break; // overflowing assignments are redrawn whole
    }

    BinaryDescriptor out = base;
    for (std::uint32_t k = 0; k < m; ++k)
        for (std::uint32_t off :
             rng::sample_distinct(gen, layout.lengths[k], counts[k]))
            out.flip_bit(layout.offsets[k] + off);
    return out;
}

namespace {

std::vector<PlantedPair> place_revisits(const SynthSpec& spec) {
    if (!spec.pairs.empty()) {
        std::set<std::uint32_t> queries;
        for (const PlantedPair& p : spec.pairs) {
            if (p.query >= spec.frame_count || p.source >= spec.frame_count)
                throw invalid_input("planted pair outside the frame range");
            if (p.query <= p.source)
                throw invalid_input("planted query must come after its source");
            if (!queries.insert(p.query).second)
                throw invalid_input("frame planted twice");
        }
        return spec.pairs;
    }

    std::vector<PlantedPair> pairs;
    if (spec.revisit_count == 0) return pairs;
    const std::uint32_t gap =
        std::max(1u, spec.frame_count / (2 * spec.revisit_count));
    for (std::uint32_t i = 0; i < spec.revisit_count; ++i) {
        const std::uint32_t source = i * gap;
        const std::uint32_t query_off = i * gap + 1;
        if (query_off > spec.frame_count)
            throw invalid_input("too many revisits for the frame count");
        const std::uint32_t query = spec.frame_count - query_off;
        if (query <= source)
            throw invalid_input("too many revisits for the frame count");
        pairs.push_back({query, source});
    }
    return pairs;
}

} // namespace

SynthCorpus synth_corpus(const SynthSpec& spec) {
    if (spec.frame_count == 0 || spec.features_per_frame == 0)
        throw invalid_input("corpus needs at least one frame and feature");
    if (spec.descriptor_bits == 0 || spec.descriptor_bits % 8 != 0)
        throw invalid_input("descriptor bits must be a positive multiple of 8");
    if (spec.fixed_distance && *spec.fixed_distance > spec.descriptor_bits)
        throw invalid_input("planted distance exceeds the descriptor length");

    const std::vector<PlantedPair> pairs = place_revisits(spec);
    std::map<std::uint32_t, std::uint32_t> source_of;
    for (const PlantedPair& p : pairs) source_of[p.query] = p.source;

    std::mt19937_64 gen(spec.seed);
    const double max_d = static_cast<double>(spec.descriptor_bits);

    SynthCorpus corpus;
    corpus.frames.reserve(spec.frame_count);
    for (std::uint32_t f = 0; f < spec.frame_count; ++f) {
        FrameFeatures frame(f, spec.descriptor_bits);
        const auto planted = source_of.find(f);
        if (planted == source_of.end()) {
            for (std::uint32_t i = 0; i < spec.features_per_frame; ++i)
                frame.add(random_descriptor(spec.descriptor_bits, gen));
        } else {
            const FrameFeatures& source = corpus.frames[planted->second];
            for (std::size_t i = 0; i < source.size(); ++i) {
                std::uint32_t d;
                if (spec.fixed_distance) {
                    d = *spec.fixed_distance;
                } else {
                    double drawn = std::llround(rng::normal(
                        gen, spec.model.inlier_mean, spec.model.inlier_sigma));
                    d = static_cast<std::uint32_t>(
                        std::clamp(drawn, 0.0, max_d));
                }
                frame.add(perturb_distinct(source.descriptor(i), d, gen));
            }
        }
        corpus.frames.push_back(std::move(frame));
    }

    corpus.gt.pairs.reserve(pairs.size());
    for (const PlantedPair& p : pairs)
        corpus.gt.pairs.emplace_back(p.query, p.source);
    std::sort(corpus.gt.pairs.begin(), corpus.gt.pairs.end());
    return corpus;
}

// ---------------------------------------------------------------------------
// Precision / recall
// ---------------------------------------------------------------------------

PrCurve pr_curve(const std::vector<ScoredDetection>& detections,
                 const GroundTruth& gt) {
    if (gt.pairs.empty())
        throw invalid_input(
            "precision/recall is undefined without ground-truth pairs");

    const std::int64_t rho = gt.neighbor_tolerance;

    // distinct ground-truth query frames, the recall denominator
    std::vector<std::uint32_t> gt_queries;
    gt_queries.reserve(gt.pairs.size());
    for (const auto& [query, match] : gt.pairs) gt_queries.push_back(query);
    std::sort(gt_queries.begin(), gt_queries.end());
    gt_queries.erase(std::unique(gt_queries.begin(), gt_queries.end()),
                     gt_queries.end());
    const double denom = static_cast<double>(gt_queries.size());

    auto query_slot = [&](std::uint32_t q) {
        return static_cast<std::size_t>(
            std::lower_bound(gt_queries.begin(), gt_queries.end(), q) -
            gt_queries.begin());
    };

    // which ground-truth queries each detection satisfies; empty means FP
    struct Judged {
        double score;
        std::vector<std::size_t> hits;
    };
    std::vector<Judged> judged;
    judged.reserve(detections.size());
    for (const ScoredDetection& det : detections) {
        Judged j{det.score, {}};
        for (const auto& [query, match] : gt.pairs) {
            const std::int64_t dq = static_cast<std::int64_t>(query) -
                                    static_cast<std::int64_t>(det.query_id);
            const std::int64_t dm = static_cast<std::int64_t>(match) -
                                    static_cast<std::int64_t>(det.candidate_id);
            if (std::llabs(dq) <= rho && std::llabs(dm) <= rho)
                j.hits.push_back(query_slot(query));
        }
        std::sort(j.hits.begin(), j.hits.end());
        j.hits.erase(std::unique(j.hits.begin(), j.hits.end()), j.hits.end());
        judged.push_back(std::move(j));
    }
    std::sort(judged.begin(), judged.end(),
              [](const Judged& a, const Judged& b) { return a.score > b.score; });

    PrCurve curve;
    std::vector<char> query_hit(gt_queries.size(), 0);
    std::uint64_t tp = 0, fp = 0, queries_hit = 0;
    std::size_t i = 0;
    while (i < judged.size()) {
        const double threshold = judged[i].score;
        for (; i < judged.size() && judged[i].score == threshold; ++i) {
            if (judged[i].hits.empty()) {
                ++fp;
                continue;
            }
            ++tp;
            for (std::size_t slot : judged[i].hits)
                if (!query_hit[slot]) {
                    query_hit[slot] = 1;
                    ++queries_hit;
                }
        }
        PrPoint point;
        point.threshold = threshold;
        point.true_positives = tp;
        point.false_positives = fp;
        point.precision =
            static_cast<double>(tp) / static_cast<double>(tp + fp);
        point.recall = static_cast<double>(queries_hit) / denom;
        curve.points.push_back(point);
        if (fp == 0)
            curve.recall_at_full_precision =
                std::max(curve.recall_at_full_precision, point.recall);
    }
    return curve;
}

PrCurve pr_curve(const std::vector<DetectionRecord>& records,
                 const GroundTruth& gt) {
    std::vector<ScoredDetection> detections;
    detections.reserve(records.size());
    for (const DetectionRecord& r : records)
        if (r.best_candidate_input)
            detections.push_back(
                {r.query_input_id, *r.best_candidate_input, r.best_score});
    return pr_curve(detections, gt);
}

} // namespace mih
