#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mih/descriptor.hpp"
#include "mih/lcd.hpp"
#include "mih/probmodel.hpp"

// Evaluation harness: descriptor-dump and ground-truth file I/O, synthetic
// corpus generation, and precision/recall computation with neighbor-tolerant
// ground truth.

namespace mih {

// ---------------------------------------------------------------------------
// Descriptor dumps
//
// Binary format, all integers little-endian:
//   magic "MLD1" | version u32 | descriptor bits u32 | frame count u32
//   then per frame: frame id u32 (strictly increasing) | feature count u32 |
//   feature_count * bits/8 descriptor bytes.
// The file length must match the header arithmetic exactly.
// ---------------------------------------------------------------------------

std::vector<FrameFeatures> load_descriptors(std::istream& in);
std::vector<FrameFeatures> load_descriptors(const std::string& path);

void save_descriptors(const std::vector<FrameFeatures>& frames,
                      std::ostream& out);
void save_descriptors(const std::vector<FrameFeatures>& frames,
                      const std::string& path);

// ---------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------

/// Known loop closures. Each pair is (query_id, match_id) with
/// query_id > match_id: a closure always points at an earlier frame. A
/// detection counts as correct when it lands within neighbor_tolerance
/// frames of a pair on both ends.
struct GroundTruth {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::uint32_t neighbor_tolerance = 2;
};

/// CSV lines "query_id,match_id"; '#' starts a comment, blank lines allowed.
GroundTruth load_ground_truth(std::istream& in);
GroundTruth load_ground_truth(const std::string& path);

void save_ground_truth(const GroundTruth& gt, std::ostream& out);
void save_ground_truth(const GroundTruth& gt, const std::string& path);

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

/// Returns a descriptor with uniformly random bits.
BinaryDescriptor random_descriptor(std::uint32_t bits, std::mt19937_64& gen);

/// Flips exactly d distinct, uniformly chosen bit positions of base.
BinaryDescriptor perturb_distinct(const BinaryDescriptor& base,
                                  std::uint32_t d, std::mt19937_64& gen);

/// Flips exactly d bits, but assigns each flip to a substring uniformly at
/// random first (redrawing the assignment if a substring overflows), then
/// picks distinct positions inside each substring. Matches the
/// balls-into-bins occupancy model the recall formulas assume.
BinaryDescriptor perturb_balls_into_bins(const BinaryDescriptor& base,
                                         std::uint32_t d,
                                         const SubstringLayout& layout,
                                         std::mt19937_64& gen);

/// A planted revisit: frame `query` repeats frame `source`'s descriptors,
/// each perturbed by the inlier distance law.
struct PlantedPair {
    std::uint32_t query = 0;
    std::uint32_t source = 0;
};

struct SynthSpec {
    std::uint32_t frame_count = 50;
    std::uint32_t features_per_frame = 50;
    std::uint32_t descriptor_bits = 256;

    /// Number of auto-placed revisits, used when pairs is empty: sources are
    /// spread over the early frames, queries over the late ones, spaced so
    /// closures stay isolated under the default neighbor tolerance.
    std::uint32_t revisit_count = 0;
    /// Explicit placements (query > source); overrides revisit_count.
    std::vector<PlantedPair> pairs;

    /// When set, every perturbed feature is flipped by exactly this many
    /// bits; otherwise the flip count is drawn from model's inlier law,
    /// rounded and clamped to [0, descriptor_bits].
    std::optional<std::uint32_t> fixed_distance;
    prob::DistanceModel model{};

    std::uint64_t seed = 1;
};

struct SynthCorpus {
    std::vector<FrameFeatures> frames;
    GroundTruth gt;
};

/// Deterministic per seed: outlier frames are uniformly random, planted
/// queries copy their source frame feature-by-feature with exact-d
/// perturbations (uniform distinct positions).
SynthCorpus synth_corpus(const SynthSpec& spec);

// ---------------------------------------------------------------------------
// Precision / recall
// ---------------------------------------------------------------------------

/// One scored answer of a detector: query frame q proposed candidate c.
struct ScoredDetection {
    std::uint32_t query_id = 0;
    std::uint32_t candidate_id = 0;
    double score = 0.0;
};

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
};

struct PrCurve {
    std::vector<PrPoint> points; // descending threshold
    double recall_at_full_precision = 0.0;
};

/// Sweeps the threshold over every distinct score, descending. A detection
/// (q, c) with score >= threshold is a true positive iff some ground-truth
/// pair (q', m') has |q' - q| <= rho and |m' - c| <= rho. Recall is the
/// fraction of distinct ground-truth query frames hit by a true positive;
/// recall_at_full_precision is the best recall among points with
/// precision exactly 1 (0 when there is none). Empty ground truth is an
/// error: the metric is undefined.
PrCurve pr_curve(const std::vector<ScoredDetection>& detections,
                 const GroundTruth& gt);

/// Convenience overload over pipeline output: records without a candidate
/// are skipped, ids are taken from the input stream.
PrCurve pr_curve(const std::vector<DetectionRecord>& records,
                 const GroundTruth& gt);

/// Reads detections from CSV rows "query_id,candidate_id,score[,...]".
/// '#' comments, blank lines and one header row are skipped; rows with an
/// empty candidate field (no detection) are ignored. Extra columns beyond
/// the third are allowed so pipeline CSV output can be fed back directly.
std::vector<ScoredDetection> load_detections_csv(std::istream& in);
std::vector<ScoredDetection> load_detections_csv(const std::string& path);

} // namespace mih
