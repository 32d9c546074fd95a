// Command-line front end: parameter analysis, loop-closure detection over
// descriptor dumps, frame-to-frame matching, PR evaluation and synthetic
// corpus generation. Exit codes: 0 success, 1 usage error, 2 data error.

#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mih/descriptor.hpp"
#include "mih/error.hpp"
#include "mih/evalharness.hpp"
#include "mih/kernels.hpp"
#include "mih/lcd.hpp"
#include "mih/parallel.hpp"
#include "mih/probmodel.hpp"
#include "mih/sparsematch.hpp"

namespace {

std::string fmt(double v, int precision) {
    std::ostringstream ss;
    ss << std::setprecision(precision) << v;
    return ss.str();
}

// Scores are printed with max_digits10 so a written CSV parses back to the
// identical double; probabilities use 12 digits for readability.
constexpr int kExact = 17;
constexpr int kProb = 12;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw mih::parse_error("cannot open file for writing: " + path, 0);
    return out;
}

// Picks --out when given, stdout otherwise.
struct OutTarget {
    explicit OutTarget(const std::string& path) {
        if (!path.empty()) file = open_out(path);
    }
    std::ostream& os() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

// Prefixes content parse errors with the file they came from.
template <typename Fn>
auto load_with_context(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const mih::parse_error& e) {
        std::string msg = e.what();
        if (msg.find(path) == std::string::npos) msg = path + ": " + msg;
        throw std::runtime_error(msg);
    }
}

bool parse_u32_str(const std::string& s, std::uint32_t& out) {
    const char* first = s.data();
    const char* last = first + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !s.empty();
}

const CLI::Validator MultipleOf8(
    [](std::string& s) -> std::string {
        std::uint32_t v = 0;
        if (!parse_u32_str(s, v)) return "value is not an unsigned integer";
        return v % 8 == 0 ? std::string()
                          : "value must be a multiple of 8";
    },
    "MULTIPLE-OF-8");

const CLI::Validator PlantedPairSyntax(
    [](std::string& s) -> std::string {
        const std::size_t sep = s.find_first_of(":,");
        std::uint32_t q = 0, src = 0;
        if (sep == std::string::npos || !parse_u32_str(s.substr(0, sep), q) ||
            !parse_u32_str(s.substr(sep + 1), src))
            return "expected QUERY:SOURCE with two frame numbers";
        return {};
    },
    "QUERY:SOURCE");

// ---------------------------------------------------------------------------
// analyze-params
// ---------------------------------------------------------------------------

struct AnalyzeOpts {
    double min_accuracy = 0.8;
    std::string mode = "offline";
    unsigned r_min = 0, r_max = 3;
    unsigned m_min = 4, m_max = 32;
    unsigned bits = 256;
    std::uint64_t memory_budget = std::uint64_t{1} << 24;
    double inlier_mean = 32.0, inlier_sigma = 10.0;
    double outlier_mean = 128.0, outlier_sigma = 20.0;
    std::string out;
};

void run_analyze(const AnalyzeOpts& o) {
    mih::prob::DistanceModel model{o.inlier_mean, o.inlier_sigma,
                                   o.outlier_mean, o.outlier_sigma, o.bits};
    mih::prob::SelectOptions sel;
    sel.r_min = o.r_min;
    sel.r_max = o.r_max;
    sel.m_min = o.m_min;
    sel.m_max = o.m_max;
    sel.descriptor_bits = o.bits;
    sel.memory_budget = mih::prob::BigInt(o.memory_budget);

    OutTarget target(o.out);
    std::ostream& os = target.os();
    os << "r,m,accuracy,complexity,fixed_entries\n";
    for (const mih::prob::GridCell& cell : mih::prob::analyze_grid(model, sel))
        os << cell.r << ',' << cell.m << ',' << fmt(cell.accuracy, kProb)
           << ',' << fmt(cell.complexity, kProb) << ',' << cell.fixed_entries
           << '\n';

    for (const mih::prob::ParamRecommendation& rec :
         mih::prob::param_frontier(o.min_accuracy, model, sel))
        os << "# frontier r=" << rec.r << ": minimal m=" << rec.m
           << " accuracy=" << fmt(rec.accuracy, kProb)
           << " complexity=" << fmt(rec.complexity, kProb)
           << " fixed_entries=" << rec.fixed_entries << '\n';

    const mih::prob::SelectMode mode = o.mode == "online"
                                           ? mih::prob::SelectMode::online
                                           : mih::prob::SelectMode::offline;
    try {
        const mih::prob::ParamRecommendation best =
            mih::prob::select_params(o.min_accuracy, mode, model, sel);
        os << "# recommendation: (m,r)=(" << best.m << "," << best.r
           << ") accuracy=" << fmt(best.accuracy, kProb)
           << " complexity=" << fmt(best.complexity, kProb)
           << " fixed_entries=" << best.fixed_entries << '\n';
    } catch (const mih::not_found&) {
        os << "# recommendation: none (no configuration satisfies the "
              "constraints)\n";
    }
}

// ---------------------------------------------------------------------------
// probe
// ---------------------------------------------------------------------------

struct ProbeOpts {
    unsigned r = 0;
    unsigned m = 16;
    unsigned d = 0;
};

void run_probe(const ProbeOpts& o) {
    std::cout << fmt(mih::prob::p_recall(o.r, o.m, o.d), kProb) << '\n';
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectOpts {
    std::string input;
    std::string out;
    std::string dump_scores;
    unsigned threads = 0;
    unsigned tables = 16;
    unsigned probe_radius = 0;
    unsigned d0 = 50;
    double sigma = 18.0;
    unsigned intra_cap = 2;
    unsigned bucket_cap_factor = 50;
    std::uint64_t expected_max_features = 2'000'000;
    unsigned prefix_bits = 64;
    unsigned partial_threshold = 24;
    unsigned idf_min_frames = 10;
    unsigned window = 30;
    double threshold = 0.0;
    bool caps = true;
    bool burstiness = true;
    bool early_termination = true;
};

void run_detect(const DetectOpts& o) {
    mih::parallel::set_max_threads(o.threads);
    const std::vector<mih::FrameFeatures> frames = load_with_context(
        o.input, [&] { return mih::load_descriptors(o.input); });
    const std::uint32_t bits =
        frames.empty() ? 256 : frames.front().descriptor_bits();

    mih::LcdConfig cfg;
    cfg.mih.layout = mih::SubstringLayout::balanced(o.tables, bits);
    cfg.mih.probe_radius = o.probe_radius;
    cfg.mih.d0 = o.d0;
    cfg.mih.sigma = o.sigma;
    cfg.mih.intra_cap = o.intra_cap;
    cfg.mih.bucket_cap_factor = o.bucket_cap_factor;
    cfg.mih.expected_max_features = o.expected_max_features;
    cfg.mih.prefix_bits = o.prefix_bits;
    cfg.mih.partial_threshold = o.partial_threshold;
    cfg.mih.enable_caps = o.caps;
    cfg.similarity.sigma = o.sigma;
    cfg.similarity.d0 = o.d0;
    cfg.similarity.idf_min_frames = o.idf_min_frames;
    cfg.similarity.prefix_bits = o.prefix_bits;
    cfg.similarity.partial_threshold = o.partial_threshold;
    cfg.exclusion_window = o.window;
    cfg.detection_threshold = o.threshold;
    cfg.burstiness = o.burstiness;
    cfg.early_termination = o.early_termination;

    const mih::SequenceReport report = mih::run_sequence(frames, cfg);

    OutTarget target(o.out);
    std::ostream& os = target.os();
    os << "frame_id,best_candidate,best_score,t_query_us\n";
    for (const mih::DetectionRecord& rec : report.records) {
        if (rec.best_candidate_input && rec.best_score >= o.threshold)
            os << rec.query_input_id << ',' << *rec.best_candidate_input
               << ',' << fmt(rec.best_score, kExact) << ',' << rec.query_us
               << '\n';
        else
            os << rec.query_input_id << ",,," << rec.query_us << '\n';
    }

    if (!o.dump_scores.empty()) {
        std::ofstream ds = open_out(o.dump_scores);
        ds << "query_id,candidate_id,score\n";
        for (const mih::DetectionRecord& rec : report.records)
            for (const mih::FrameScore& fs : rec.scores.scores)
                ds << rec.query_input_id << ','
                   << report.records[fs.frame_id].query_input_id << ','
                   << fmt(fs.normalized, kExact) << '\n';
    }

    // timing lands on stderr: the detection CSV stays deterministic
    std::cerr << "# frames=" << report.records.size()
              << " skipped_empty=" << report.skipped_empty_frames
              << " mean_query_us=" << fmt(report.mean_query_us, 6)
              << " p50_query_us=" << fmt(report.p50_query_us, 6)
              << " p95_query_us=" << fmt(report.p95_query_us, 6)
              << " max_query_us=" << fmt(report.max_query_us, 6)
              << " mean_ingest_us=" << fmt(report.mean_ingest_us, 6)
              << " kernel=" << mih::kernels::active_implementation() << '\n';
}

// ---------------------------------------------------------------------------
// match
// ---------------------------------------------------------------------------

struct MatchOpts {
    std::string frame_a;
    std::string frame_b;
    std::string out;
    unsigned threads = 0;
    unsigned tables = 24;
    unsigned probe_radius = 0;
    unsigned d0 = 50;
    unsigned prefix_bits = 64;
    unsigned partial_threshold = 24;
    bool mutual = false;
    bool brute_force = false;
    bool early_termination = true;
};

void run_match(const MatchOpts& o) {
    mih::parallel::set_max_threads(o.threads);
    const auto fa = load_with_context(
        o.frame_a, [&] { return mih::load_descriptors(o.frame_a); });
    const auto fb = load_with_context(
        o.frame_b, [&] { return mih::load_descriptors(o.frame_b); });
    if (fa.empty() || fb.empty())
        throw std::runtime_error((fa.empty() ? o.frame_a : o.frame_b) +
                                 ": descriptor file contains no frames");

    mih::SparseMatchParams params;
    params.mih.layout =
        mih::SubstringLayout::balanced(o.tables, fa.front().descriptor_bits());
    params.mih.probe_radius = o.probe_radius;
    params.mih.d0 = o.d0;
    params.mih.prefix_bits = o.prefix_bits;
    params.mih.partial_threshold = o.partial_threshold;
    params.mutual = o.mutual;
    params.early_termination = o.early_termination;

    const auto t0 = std::chrono::steady_clock::now();
    const mih::MatchResult result =
        o.brute_force ? mih::match_frames_bruteforce(fa.front(), fb.front(),
                                                     params)
                      : mih::match_frames(fa.front(), fb.front(), params);
    const auto elapsed_us =
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - t0)
            .count();

    OutTarget target(o.out);
    std::ostream& os = target.os();
    os << "query_feature,train_feature,distance\n";
    for (const mih::FeatureMatch& m : result.matches)
        os << m.query_feature << ',' << m.train_feature << ',' << m.distance
           << '\n';
    os << "# matches=" << result.matches.size()
       << " candidates_examined=" << result.candidates_examined
       << " early_rejections=" << result.early_rejections
       << " full_distance_evals=" << result.full_distance_evals << '\n';
    std::cerr << "# elapsed_us=" << elapsed_us
              << " kernel=" << mih::kernels::active_implementation() << '\n';
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOpts {
    std::string scores;
    std::string gt;
    std::string out;
    unsigned rho = 2;
};

void run_eval(const EvalOpts& o) {
    mih::GroundTruth gt = load_with_context(
        o.gt, [&] { return mih::load_ground_truth(o.gt); });
    gt.neighbor_tolerance = o.rho;
    const auto detections = load_with_context(
        o.scores, [&] { return mih::load_detections_csv(o.scores); });
    const mih::PrCurve curve = mih::pr_curve(detections, gt);

    OutTarget target(o.out);
    std::ostream& os = target.os();
    os << "threshold,precision,recall,true_positives,false_positives\n";
    for (const mih::PrPoint& p : curve.points)
        os << fmt(p.threshold, kExact) << ',' << fmt(p.precision, kProb)
           << ',' << fmt(p.recall, kProb) << ',' << p.true_positives << ','
           << p.false_positives << '\n';
    os << "# recall_at_full_precision="
       << fmt(curve.recall_at_full_precision, kProb) << '\n';
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthOpts {
    std::string out;
    std::string gt_out;
    unsigned frames = 50;
    unsigned features = 50;
    unsigned bits = 256;
    unsigned revisits = 0;
    std::vector<std::string> pairs;
    std::optional<unsigned> fixed_distance;
    double inlier_mean = 32.0;
    double inlier_sigma = 10.0;
    std::uint64_t seed = 1;
};

void run_synth(const SynthOpts& o) {
    mih::SynthSpec spec;
    spec.frame_count = o.frames;
    spec.features_per_frame = o.features;
    spec.descriptor_bits = o.bits;
    spec.revisit_count = o.revisits;
    spec.fixed_distance = o.fixed_distance;
    spec.model.inlier_mean = o.inlier_mean;
    spec.model.inlier_sigma = o.inlier_sigma;
    spec.model.support_bits = o.bits;
    spec.seed = o.seed;
    for (const std::string& s : o.pairs) {
        const std::size_t sep = s.find_first_of(":,");
        mih::PlantedPair p;
        if (sep == std::string::npos ||
            !parse_u32_str(s.substr(0, sep), p.query) ||
            !parse_u32_str(s.substr(sep + 1), p.source))
            throw CLI::ValidationError("--pair",
                                       "expected QUERY:SOURCE frame numbers");
        spec.pairs.push_back(p);
    }

    const mih::SynthCorpus corpus = mih::synth_corpus(spec);
    mih::save_descriptors(corpus.frames, o.out);
    if (!o.gt_out.empty()) mih::save_ground_truth(corpus.gt, o.gt_out);
    std::cerr << "# wrote " << corpus.frames.size() << " frames ("
              << corpus.gt.pairs.size() << " planted pairs) to " << o.out
              << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binary-descriptor search toolkit built on multi-index "
                 "hashing: parameter analysis, loop-closure detection, "
                 "frame matching and PR evaluation"};
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "",
                   "read option values from a TOML file with one section "
                   "per subcommand, e.g. [detect]; flags override");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // -- analyze-params
    AnalyzeOpts an;
    CLI::App* analyze = app.add_subcommand(
        "analyze-params",
        "Grid of accuracy R, complexity E and fixed table overhead over "
        "(r, m), with frontier and recommendation");
    analyze->add_option("--min-accuracy", an.min_accuracy,
                        "accuracy floor for the recommendation")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--mode", an.mode,
                        "offline minimizes E; online also respects the "
                        "memory budget")
        ->capture_default_str()
        ->check(CLI::IsMember({"offline", "online"}));
    analyze->add_option("--r-min", an.r_min, "smallest probe radius")
        ->capture_default_str()
        ->check(CLI::Range(0u, 8u));
    analyze->add_option("--r-max", an.r_max, "largest probe radius")
        ->capture_default_str()
        ->check(CLI::Range(0u, 8u));
    analyze->add_option("--m-min", an.m_min, "smallest table count")
        ->capture_default_str()
        ->check(CLI::Range(1u, 64u));
    analyze->add_option("--m-max", an.m_max, "largest table count")
        ->capture_default_str()
        ->check(CLI::Range(1u, 64u));
    analyze->add_option("--bits", an.bits, "descriptor length in bits")
        ->capture_default_str()
        ->check(MultipleOf8);
    analyze->add_option("--memory-budget", an.memory_budget,
                        "hash-entry budget for online mode")
        ->capture_default_str();
    analyze->add_option("--inlier-mean", an.inlier_mean,
                        "mean of the true-pair distance law")
        ->capture_default_str();
    analyze->add_option("--inlier-sigma", an.inlier_sigma,
                        "standard deviation of the true-pair distance law")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    analyze->add_option("--outlier-mean", an.outlier_mean,
                        "mean of the unrelated-pair distance law")
        ->capture_default_str();
    analyze->add_option("--outlier-sigma", an.outlier_sigma,
                        "standard deviation of the unrelated-pair distance "
                        "law")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    analyze->add_option("--out", an.out, "write CSV here instead of stdout");
    analyze->callback([&] { run_analyze(an); });

    // -- probe
    ProbeOpts pb;
    CLI::App* probe = app.add_subcommand(
        "probe", "Print the collision probability for one (r, m, d) cell");
    probe->add_option("--r", pb.r, "probe radius")
        ->capture_default_str()
        ->check(CLI::Range(0u, 32u));
    probe->add_option("--m", pb.m, "table count")
        ->capture_default_str()
        ->check(CLI::Range(1u, 64u));
    probe->add_option("--d", pb.d, "pair Hamming distance")
        ->capture_default_str()
        ->check(CLI::Range(0u, 4096u));
    probe->callback([&] { run_probe(pb); });

    // -- detect
    DetectOpts de;
    CLI::App* detect = app.add_subcommand(
        "detect",
        "Run loop-closure detection over a descriptor dump, one query + "
        "insert per frame");
    detect->add_option("--input", de.input, "descriptor dump to stream")
        ->required();
    detect->add_option("--out", de.out,
                       "write the detection CSV here instead of stdout");
    detect->add_option("--dump-scores", de.dump_scores,
                       "also write the full query/candidate score matrix");
    detect->add_option("--threads", de.threads,
                       "worker thread cap, 0 = all cores")
        ->capture_default_str();
    detect->add_option("--tables", de.tables, "substring count m")
        ->capture_default_str()
        ->check(CLI::Range(1u, 64u));
    detect->add_option("--probe-radius", de.probe_radius,
                       "probe all keys within this substring distance")
        ->capture_default_str()
        ->check(CLI::Range(0u, 8u));
    detect->add_option("--d0", de.d0, "Hamming acceptance threshold")
        ->capture_default_str();
    detect->add_option("--sigma", de.sigma, "similarity bandwidth")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    detect->add_option("--intra-cap", de.intra_cap,
                       "per-entry cap on references from one frame")
        ->capture_default_str()
        ->check(CLI::Range(1u, 1000000u));
    detect->add_option("--bucket-cap-factor", de.bucket_cap_factor,
                       "saturation cap factor relative to the mean load")
        ->capture_default_str();
    detect->add_option("--expected-max-features", de.expected_max_features,
                       "sizing estimate behind the saturation cap")
        ->capture_default_str();
    detect->add_option("--prefix-bits", de.prefix_bits,
                       "early-termination prefix length")
        ->capture_default_str()
        ->check(MultipleOf8);
    detect->add_option("--partial-threshold", de.partial_threshold,
                       "prefix distance above which a candidate is dropped")
        ->capture_default_str();
    detect->add_option("--idf-min-frames", de.idf_min_frames,
                       "database size below which the IDF factor is 1")
        ->capture_default_str();
    detect->add_option("--window", de.window,
                       "most recent frames excluded from candidacy")
        ->capture_default_str();
    detect->add_option("--threshold", de.threshold,
                       "minimum score for a row to count as a detection")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    detect->add_flag("--caps,!--no-caps", de.caps,
                     "per-entry burstiness caps (default: on)");
    detect->add_flag("--burstiness,!--no-burstiness", de.burstiness,
                     "IDF-weighted, sum-normalized scoring (default: on)");
    detect->add_flag("--early-termination,!--no-early-termination",
                     de.early_termination,
                     "prefix-distance candidate rejection (default: on)");
    detect->callback([&] { run_detect(de); });

    // -- match
    MatchOpts ma;
    CLI::App* match = app.add_subcommand(
        "match",
        "Match features of two frames (first frame of each dump) via a "
        "throwaway index");
    match->add_option("--frame-a", ma.frame_a, "dump holding the train frame")
        ->required();
    match->add_option("--frame-b", ma.frame_b, "dump holding the query frame")
        ->required();
    match->add_option("--out", ma.out,
                      "write the match CSV here instead of stdout");
    match->add_option("--threads", ma.threads,
                      "worker thread cap, 0 = all cores")
        ->capture_default_str();
    match->add_option("--tables", ma.tables, "substring count m")
        ->capture_default_str()
        ->check(CLI::Range(1u, 64u));
    match->add_option("--probe-radius", ma.probe_radius,
                      "probe all keys within this substring distance")
        ->capture_default_str()
        ->check(CLI::Range(0u, 8u));
    match->add_option("--d0", ma.d0, "maximum accepted match distance")
        ->capture_default_str();
    match->add_option("--prefix-bits", ma.prefix_bits,
                      "early-termination prefix length")
        ->capture_default_str()
        ->check(MultipleOf8);
    match->add_option("--partial-threshold", ma.partial_threshold,
                      "prefix distance above which a candidate is dropped")
        ->capture_default_str();
    match->add_flag("--mutual", ma.mutual,
                    "keep only mutual-best pairs (default: off)");
    match->add_flag("--brute-force", ma.brute_force,
                    "exhaustive all-pairs baseline (default: off)");
    match->add_flag("--early-termination,!--no-early-termination",
                    ma.early_termination,
                    "prefix-distance candidate rejection (default: on)");
    match->callback([&] { run_match(ma); });

    // -- eval
    EvalOpts ev;
    CLI::App* eval = app.add_subcommand(
        "eval",
        "Precision/recall sweep of a detection CSV against ground truth");
    eval->add_option("--scores", ev.scores,
                     "detection CSV (query_id,candidate_id,score)")
        ->required();
    eval->add_option("--gt", ev.gt, "ground-truth CSV (query_id,match_id)")
        ->required();
    eval->add_option("--rho", ev.rho,
                     "neighbor tolerance in frames on both pair ends")
        ->capture_default_str()
        ->check(CLI::Range(0u, 1000u));
    eval->add_option("--out", ev.out,
                     "write the PR CSV here instead of stdout");
    eval->callback([&] { run_eval(ev); });

    // -- synth
    SynthOpts sy;
    CLI::App* synth = app.add_subcommand(
        "synth",
        "Generate a synthetic descriptor dump with planted revisits");
    synth->add_option("--out", sy.out, "descriptor dump to write")
        ->required();
    synth->add_option("--gt-out", sy.gt_out,
                      "also write the planted pairs as ground-truth CSV");
    synth->add_option("--frames", sy.frames, "frame count")
        ->capture_default_str()
        ->check(CLI::Range(1u, 1000000u));
    synth->add_option("--features", sy.features, "features per frame")
        ->capture_default_str()
        ->check(CLI::Range(1u, 1000000u));
    synth->add_option("--bits", sy.bits, "descriptor length in bits")
        ->capture_default_str()
        ->check(MultipleOf8);
    synth->add_option("--revisits", sy.revisits,
                      "auto-placed planted revisit count")
        ->capture_default_str();
    synth->add_option("--pair", sy.pairs,
                      "explicit planted pair QUERY:SOURCE, repeatable")
        ->check(PlantedPairSyntax);
    synth->add_option("--fixed-distance", sy.fixed_distance,
                      "flip exactly this many bits per planted feature "
                      "instead of drawing from the inlier law");
    synth->add_option("--inlier-mean", sy.inlier_mean,
                      "mean planted perturbation distance")
        ->capture_default_str();
    synth->add_option("--inlier-sigma", sy.inlier_sigma,
                      "standard deviation of the planted perturbation")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", sy.seed, "generator seed")
        ->capture_default_str();
    synth->callback([&] { run_synth(sy); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const mih::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
