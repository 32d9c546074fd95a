#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mih/binio.hpp"
#include "mih/descriptor.hpp"
#include "mih/error.hpp"
#include "mih/evalharness.hpp"

using namespace mih;

namespace {

std::string saved_bytes(const std::vector<FrameFeatures>& frames) {
    std::ostringstream out;
    save_descriptors(frames, out);
    return out.str();
}

std::vector<FrameFeatures> load_bytes(const std::string& bytes) {
    std::istringstream in(bytes);
    return load_descriptors(in);
}

} // namespace

TEST_CASE("descriptor dumps round-trip byte-identically") {
    std::mt19937_64 gen(3);
    std::vector<FrameFeatures> frames;
    for (std::uint32_t f = 0; f < 4; ++f) {
        FrameFeatures frame(f * 10 + 1, 256);
        for (std::uint32_t i = 0; i <= f; ++i)
            frame.add(random_descriptor(256, gen));
        frames.push_back(std::move(frame));
    }

    const std::string bytes = saved_bytes(frames);
    const std::vector<FrameFeatures> loaded = load_bytes(bytes);
    REQUIRE(loaded.size() == 4);
    for (std::uint32_t f = 0; f < 4; ++f) {
        CHECK(loaded[f].frame_id() == frames[f].frame_id());
        REQUIRE(loaded[f].size() == frames[f].size());
        for (std::size_t i = 0; i < loaded[f].size(); ++i)
            CHECK(hamming_distance(loaded[f].descriptor(i),
                                   frames[f].descriptor(i)) == 0);
    }
    CHECK(saved_bytes(loaded) == bytes);
}

TEST_CASE("dump sizes are exactly header plus payload") {
    FrameFeatures frame(0, 256);
    frame.add(BinaryDescriptor(256));
    // magic + version + bits + frame count + frame id + feature count + 32
    CHECK(saved_bytes({frame}).size() == 4 + 4 + 4 + 4 + 4 + 4 + 32);
    // an empty dump still records the default descriptor width
    const std::string empty = saved_bytes({});
    CHECK(empty.size() == 16);
    CHECK(load_bytes(empty).empty());
}

TEST_CASE("descriptor dump writing validates its input") {
    FrameFeatures a(5, 256), b(5, 256), narrow(9, 128);
    a.add(BinaryDescriptor(256));
    b.add(BinaryDescriptor(256));
    narrow.add(BinaryDescriptor(128));
    std::ostringstream out;
    CHECK_THROWS_AS(save_descriptors({a, b}, out), invalid_input);
    CHECK_THROWS_AS(save_descriptors({a, narrow}, out), invalid_input);
    CHECK_THROWS_AS(save_descriptors({a}, "/nonexistent-dir/out.mld"),
                    parse_error);
    CHECK_THROWS_AS(load_descriptors("/nonexistent-dir/in.mld"), parse_error);
}

TEST_CASE("corrupt descriptor dumps are rejected with byte offsets") {
    FrameFeatures frame(7, 256);
    frame.add(BinaryDescriptor(256));
    const std::string good = saved_bytes({frame});

    const auto expect_error = [](const std::string& bytes,
                                 const std::string& fragment,
                                 std::uint64_t offset) {
        try {
            load_bytes(bytes);
            FAIL("expected parse_error for ", fragment);
        } catch (const parse_error& e) {
            CAPTURE(fragment);
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
            CHECK(e.offset() == offset);
        }
    };

    expect_error("", "unexpected end of file", 0);

    std::string bad = good;
    bad[0] = 'Z';
    expect_error(bad, "bad magic", 0);

    bad = good;
    bad[4] = 3; // version
    expect_error(bad, "unsupported version 3", 4);

    {
        std::ostringstream out;
        binio::Writer w(out);
        w.bytes("MLD1", 4);
        w.u32(1);
        w.u32(12); // not a byte multiple
        w.u32(0);
        expect_error(out.str(), "positive multiple of 8", 8);
    }

    expect_error(good.substr(0, 30), "unexpected end of file", 24);
    expect_error(good + "x", "trailing data", good.size());

    {
        // two frames with non-increasing ids: the second id sits right
        // after the first frame's 40-byte record
        std::ostringstream out;
        binio::Writer w(out);
        w.bytes("MLD1", 4);
        w.u32(1);
        w.u32(256);
        w.u32(2);
        const std::uint8_t zeros[32] = {};
        w.u32(5);
        w.u32(1);
        w.bytes(zeros, 32);
        w.u32(5); // repeats the previous id
        w.u32(1);
        w.bytes(zeros, 32);
        expect_error(out.str(), "strictly increasing", 56);
    }
}

TEST_CASE("ground-truth CSV round-trips and tolerates comments") {
    GroundTruth gt;
    gt.pairs = {{30, 10}, {40, 20}};
    std::ostringstream out;
    save_ground_truth(gt, out);
    CHECK(out.str() == "# query_id,match_id\n30,10\n40,20\n");

    std::istringstream in(out.str());
    const GroundTruth back = load_ground_truth(in);
    CHECK(back.pairs == gt.pairs);

    // spaces, blank lines, and CRLF endings are all accepted
    std::istringstream messy(
        "# header\r\n\r\n 30 , 10 \r\n\n40,20\r\n");
    CHECK(load_ground_truth(messy).pairs == gt.pairs);
}

TEST_CASE("ground-truth parsing reports the offending line's offset") {
    {
        std::istringstream in("# c\n2,1\n1,2,3\n");
        try {
            load_ground_truth(in);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(std::string(e.what()).find("query_id,match_id") !=
                  std::string::npos);
            CHECK(e.offset() == 8); // after "# c\n" and "2,1\n"
        }
    }
    {
        std::istringstream in("10,10\n");
        CHECK_THROWS_WITH_AS(
            load_ground_truth(in),
            "query_id must be greater than match_id (byte offset 0)",
            parse_error);
    }
    {
        std::istringstream in("abc,def\n");
        CHECK_THROWS_AS(load_ground_truth(in), parse_error);
    }
}

TEST_CASE("detection CSV loading: header, gaps, and extra columns") {
    std::istringstream in(
        "frame_id,best_candidate,best_score,t_query_us\n"
        "# a comment\n"
        "0,,,12\n"
        "5,1,0.75,9\n"
        "\n"
        "6,2,0.5\n");
    const std::vector<ScoredDetection> dets = load_detections_csv(in);
    REQUIRE(dets.size() == 2);
    CHECK(dets[0].query_id == 5);
    CHECK(dets[0].candidate_id == 1);
    CHECK(dets[0].score == 0.75);
    CHECK(dets[1].query_id == 6);
    CHECK(dets[1].candidate_id == 2);

    // only one header row is allowed
    std::istringstream two_headers("h1,h2,h3\nh1,h2,h3\n");
    CHECK_THROWS_AS(load_detections_csv(two_headers), parse_error);
    // short rows are malformed
    std::istringstream short_row("1,2\n");
    CHECK_THROWS_AS(load_detections_csv(short_row), parse_error);
}

TEST_CASE("random descriptors have the expected pairwise distance") {
    std::mt19937_64 gen(11);
    double total = 0.0;
    const int pairs = 1000;
    for (int i = 0; i < pairs; ++i)
        total += hamming_distance(random_descriptor(256, gen),
                                  random_descriptor(256, gen));
    const double mean = total / pairs;
    // mean 128, per-pair sigma 8, so the sample mean lands within ~1
    CHECK(std::abs(mean - 128.0) < 1.0);
}

TEST_CASE("perturbations flip exactly the requested number of bits") {
    std::mt19937_64 gen(13);
    const BinaryDescriptor base = random_descriptor(256, gen);
    for (const std::uint32_t d : {0u, 1u, 17u, 128u, 256u})
        CHECK(hamming_distance(base, perturb_distinct(base, d, gen)) == d);
    CHECK_THROWS_AS(perturb_distinct(base, 257, gen), invalid_input);

    const SubstringLayout layout = SubstringLayout::balanced(16, 256);
    for (const std::uint32_t d : {0u, 1u, 9u, 31u, 64u}) {
        const BinaryDescriptor p =
            perturb_balls_into_bins(base, d, layout, gen);
        CHECK(hamming_distance(base, p) == d);
    }
    // no table (16 bits each) can absorb more flips than its width, so a
    // feasible assignment caps per-table flips at the length
    for (int rep = 0; rep < 50; ++rep) {
        const BinaryDescriptor p =
            perturb_balls_into_bins(base, 40, layout, gen);
        std::uint32_t keys_base[16], keys_p[16];
        extract_substrings_raw(base.data(), 32, layout, keys_base);
        extract_substrings_raw(p.data(), 32, layout, keys_p);
        for (int k = 0; k < 16; ++k)
            CHECK(std::popcount(keys_base[k] ^ keys_p[k]) <= 16);
    }
    CHECK_THROWS_AS(perturb_balls_into_bins(base, 257, layout, gen),
                    invalid_input);
    const SubstringLayout narrow = SubstringLayout::balanced(16, 128);
    CHECK_THROWS_AS(perturb_balls_into_bins(base, 4, narrow, gen),
                    invalid_input);
}

TEST_CASE("synthetic corpora are deterministic per seed") {
    SynthSpec spec;
    spec.frame_count = 10;
    spec.features_per_frame = 5;
    spec.revisit_count = 2;
    spec.seed = 99;
    const SynthCorpus a = synth_corpus(spec);
    const SynthCorpus b = synth_corpus(spec);
    CHECK(saved_bytes(a.frames) == saved_bytes(b.frames));
    CHECK(a.gt.pairs == b.gt.pairs);

    spec.seed = 100;
    const SynthCorpus c = synth_corpus(spec);
    CHECK(saved_bytes(a.frames) != saved_bytes(c.frames));
    CHECK(a.gt.pairs == c.gt.pairs); // placement does not depend on the seed
}

TEST_CASE("auto-placed revisits are spread and sorted") {
    SynthSpec spec;
    spec.frame_count = 50;
    spec.features_per_frame = 2;
    spec.revisit_count = 5;
    const SynthCorpus corpus = synth_corpus(spec);
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> expect = {
        {29, 20}, {34, 15}, {39, 10}, {44, 5}, {49, 0}};
    CHECK(corpus.gt.pairs == expect);
    REQUIRE(corpus.frames.size() == 50);
    for (std::uint32_t f = 0; f < 50; ++f) {
        CHECK(corpus.frames[f].frame_id() == f);
        CHECK(corpus.frames[f].size() == 2);
    }
}

TEST_CASE("planted frames sit at the requested distance") {
    SynthSpec spec;
    spec.frame_count = 6;
    spec.features_per_frame = 8;
    spec.pairs = {{5, 1}};
    spec.fixed_distance = 17;
    const SynthCorpus corpus = synth_corpus(spec);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(hamming_distance(corpus.frames[5].descriptor(i),
                               corpus.frames[1].descriptor(i)) == 17);

    spec.fixed_distance = 0; // an exact repeat
    const SynthCorpus dup = synth_corpus(spec);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(hamming_distance(dup.frames[5].descriptor(i),
                               dup.frames[1].descriptor(i)) == 0);
}

TEST_CASE("sampled planted distances follow the inlier law") {
    SynthSpec spec;
    spec.frame_count = 2;
    spec.features_per_frame = 2000;
    spec.pairs = {{1, 0}};
    spec.seed = 7;
    const SynthCorpus corpus = synth_corpus(spec);
    double total = 0.0;
    for (std::size_t i = 0; i < 2000; ++i)
        total += hamming_distance(corpus.frames[1].descriptor(i),
                                  corpus.frames[0].descriptor(i));
    const double mean = total / 2000.0;
    // law mean 32, sigma 10: the sample mean lands within ~1
    CHECK(std::abs(mean - 32.0) < 1.0);
}

TEST_CASE("corpus validation rejects inconsistent requests") {
    SynthSpec spec;
    spec.frame_count = 10;
    spec.features_per_frame = 2;

    SynthSpec bad = spec;
    bad.pairs = {{3, 3}};
    CHECK_THROWS_AS(synth_corpus(bad), invalid_input);
    bad.pairs = {{10, 0}};
    CHECK_THROWS_AS(synth_corpus(bad), invalid_input);
    bad.pairs = {{5, 0}, {5, 1}};
    CHECK_THROWS_AS(synth_corpus(bad), invalid_input);
    bad.pairs.clear();
    bad.revisit_count = 30;
    CHECK_THROWS_AS(synth_corpus(bad), invalid_input);

    bad = spec;
    bad.frame_count = 0;
    CHECK_THROWS_AS(synth_corpus(bad), invalid_input);
    bad = spec;
    bad.descriptor_bits = 100;
    CHECK_THROWS_AS(synth_corpus(bad), invalid_input);
    bad = spec;
    bad.fixed_distance = 300;
    CHECK_THROWS_AS(synth_corpus(bad), invalid_input);
}

TEST_CASE("PR curve: perfect and useless detectors") {
    GroundTruth gt;
    gt.pairs = {{30, 10}, {40, 20}};

    const std::vector<ScoredDetection> perfect = {
        {30, 10, 0.9}, {40, 20, 0.8}};
    const PrCurve good = pr_curve(perfect, gt);
    CHECK(good.recall_at_full_precision == 1.0);
    CHECK(good.points.back().precision == 1.0);
    CHECK(good.points.back().recall == 1.0);

    const std::vector<ScoredDetection> useless = {
        {31, 25, 0.9}, {12, 2, 0.8}}; // query 31 near 30 but wrong match
    const PrCurve bad = pr_curve(useless, gt);
    CHECK(bad.recall_at_full_precision == 0.0);
    for (const PrPoint& pt : bad.points) {
        CHECK(pt.precision == 0.0);
        CHECK(pt.recall == 0.0);
    }

    CHECK_THROWS_AS(pr_curve(perfect, GroundTruth{}), invalid_input);
}

TEST_CASE("PR curve: hand-computed confusion table") {
    GroundTruth gt;
    gt.pairs = {{30, 10}, {40, 20}, {25, 5}};
    const std::vector<ScoredDetection> dets = {
        {30, 10, 0.9}, // exact hit
        {40, 21, 0.8}, // candidate off by one
        {25, 5, 0.7},  // exact hit
        {40, 20, 0.6}, // exact hit
        {33, 2, 0.5},  // miss
    };

    // strict matching: the off-by-one candidate is a false positive
    gt.neighbor_tolerance = 0;
    const PrCurve strict = pr_curve(dets, gt);
    REQUIRE(strict.points.size() == 5);
    const double expect_strict[5][4] = {
        // precision, recall, tp, fp
        {1.0, 1.0 / 3.0, 1, 0},
        {0.5, 1.0 / 3.0, 1, 1},
        {2.0 / 3.0, 2.0 / 3.0, 2, 1},
        {0.75, 1.0, 3, 1},
        {0.6, 1.0, 3, 2},
    };
    for (int i = 0; i < 5; ++i) {
        CAPTURE(i);
        CHECK(strict.points[i].threshold ==
              doctest::Approx(0.9 - 0.1 * i).epsilon(1e-12));
        CHECK(strict.points[i].precision ==
              doctest::Approx(expect_strict[i][0]).epsilon(1e-12));
        CHECK(strict.points[i].recall ==
              doctest::Approx(expect_strict[i][1]).epsilon(1e-12));
        CHECK(strict.points[i].true_positives == expect_strict[i][2]);
        CHECK(strict.points[i].false_positives == expect_strict[i][3]);
    }
    CHECK(strict.recall_at_full_precision ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // the default tolerance of two forgives the off-by-one candidate
    gt.neighbor_tolerance = 2;
    const PrCurve loose = pr_curve(dets, gt);
    CHECK(loose.recall_at_full_precision == 1.0);
    CHECK(loose.points[1].true_positives == 2);
    CHECK(loose.points[1].false_positives == 0);
    CHECK(loose.points[2].recall == 1.0);

    // counts only grow as the threshold drops
    for (const PrCurve* curve : {&strict, &loose})
        for (std::size_t i = 1; i < curve->points.size(); ++i) {
            CHECK(curve->points[i].threshold <
                  curve->points[i - 1].threshold);
            CHECK(curve->points[i].true_positives >=
                  curve->points[i - 1].true_positives);
            CHECK(curve->points[i].false_positives >=
                  curve->points[i - 1].false_positives);
        }
}

TEST_CASE("PR curve: equal scores collapse into one point") {
    GroundTruth gt;
    gt.pairs = {{30, 10}, {40, 20}};
    const std::vector<ScoredDetection> dets = {
        {30, 10, 0.5}, {40, 20, 0.5}, {7, 3, 0.5}};
    const PrCurve curve = pr_curve(dets, gt);
    REQUIRE(curve.points.size() == 1);
    CHECK(curve.points[0].true_positives == 2);
    CHECK(curve.points[0].false_positives == 1);
    CHECK(curve.points[0].recall == 1.0);
}

TEST_CASE("PR curve over detection records uses stream ids and skips "
          "non-detections") {
    GroundTruth gt;
    gt.pairs = {{300, 100}};
    std::vector<DetectionRecord> records(3);
    records[0].query_index_id = 0;
    records[0].query_input_id = 100; // no candidate: skipped
    records[1].query_index_id = 1;
    records[1].query_input_id = 200;
    records[1].best_candidate = 0;
    records[1].best_candidate_input = 100;
    records[1].best_score = 0.2;
    records[2].query_index_id = 2;
    records[2].query_input_id = 300;
    records[2].best_candidate = 0;
    records[2].best_candidate_input = 100;
    records[2].best_score = 0.9;

    const PrCurve curve = pr_curve(records, gt);
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0].true_positives == 1);  // the input-id pair matches
    CHECK(curve.points[0].false_positives == 0);
    CHECK(curve.points[1].false_positives == 1); // query 200 is not in gt
    CHECK(curve.recall_at_full_precision == 1.0);
}
