#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mih/descriptor.hpp"
#include "mih/error.hpp"
#include "mih/evalharness.hpp"
#include "mih/parallel.hpp"
#include "mih/similarity.hpp"

using namespace mih;

namespace {

FrameFeatures frame_of(std::uint32_t id,
                       const std::vector<BinaryDescriptor>& descs) {
    FrameFeatures f(id, descs.front().size_bits());
    for (const BinaryDescriptor& d : descs) f.add(d);
    return f;
}

MihParams open_params() {
    MihParams p;
    p.enable_caps = false;
    return p;
}

} // namespace

TEST_CASE("feature similarity: anchor points and cutoff") {
    const SimilarityParams p; // sigma 18, d0 50
    CHECK(feature_similarity(0, p) == 1.0);
    CHECK(feature_similarity(18, p) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(feature_similarity(50, p) ==
          doctest::Approx(std::exp(-(50.0 / 18.0) * (50.0 / 18.0)))
              .epsilon(1e-14));
    CHECK(feature_similarity(51, p) == 0.0);
    CHECK(feature_similarity(200, p) == 0.0);

    for (std::uint32_t d = 1; d <= 50; ++d)
        CHECK(feature_similarity(d, p) < feature_similarity(d - 1, p));

    SimilarityParams wide = p;
    wide.sigma = 36.0;
    CHECK(feature_similarity(36, wide) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(feature_similarity(20, wide) > feature_similarity(20, p));

    SimilarityParams bad = p;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(feature_similarity(1, bad), invalid_input);
}

TEST_CASE("exact image similarity: identity, cutoff, and hand computation") {
    std::mt19937_64 gen(5);
    const SimilarityParams p;

    // identical frames of one repeated descriptor: every pair at d = 0
    const BinaryDescriptor d = random_descriptor(256, gen);
    const FrameFeatures same = frame_of(0, {d, d, d});
    CHECK(image_similarity_exact(same, same, p) == 1.0);

    // single features past the cutoff score exactly zero
    const FrameFeatures a = frame_of(0, {d});
    const FrameFeatures b = frame_of(1, {perturb_distinct(d, 51, gen)});
    CHECK(image_similarity_exact(a, b, p) == 0.0);
    const FrameFeatures c = frame_of(2, {perturb_distinct(d, 50, gen)});
    CHECK(image_similarity_exact(a, c, p) ==
          doctest::Approx(feature_similarity(50, p)).epsilon(1e-14));

    // five-feature frames against an explicit double loop
    std::vector<BinaryDescriptor> fa, fb;
    for (int i = 0; i < 5; ++i) {
        fa.push_back(random_descriptor(256, gen));
        // mix of close and far partners
        fb.push_back(i % 2 == 0
                         ? perturb_distinct(fa.back(), 10u + 7u * i, gen)
                         : random_descriptor(256, gen));
    }
    const FrameFeatures pa = frame_of(0, fa);
    const FrameFeatures pb = frame_of(1, fb);
    double expect = 0.0;
    for (const BinaryDescriptor& x : fa)
        for (const BinaryDescriptor& y : fb)
            expect += feature_similarity(hamming_distance(x, y), p);
    expect /= 25.0;
    CHECK(image_similarity_exact(pa, pb, p) ==
          doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("exact image similarity: symmetry and self-similarity floor") {
    std::mt19937_64 gen(17);
    const SimilarityParams p;
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<BinaryDescriptor> fa, fb;
        const BinaryDescriptor base = random_descriptor(256, gen);
        for (int i = 0; i < 4; ++i) {
            fa.push_back(perturb_distinct(base, 5u * i, gen));
            fb.push_back(perturb_distinct(base, 3u * i + 2u, gen));
        }
        const FrameFeatures pa = frame_of(0, fa);
        const FrameFeatures pb = frame_of(1, fb);
        CHECK(image_similarity_exact(pa, pb, p) ==
              doctest::Approx(image_similarity_exact(pb, pa, p))
                  .epsilon(1e-14));
        // the diagonal alone contributes |F| exact matches
        CHECK(image_similarity_exact(pa, pa, p) >= 1.0 / 4.0);
    }

    FrameFeatures empty(0, 256);
    const FrameFeatures one = frame_of(1, {random_descriptor(256, gen)});
    CHECK_THROWS_AS(image_similarity_exact(empty, one, p), invalid_input);
    FrameFeatures short_frame(2, 128);
    short_frame.add(BinaryDescriptor(128));
    CHECK_THROWS_AS(image_similarity_exact(one, short_frame, p),
                    invalid_input);
}

TEST_CASE("index scoring never exceeds the exact similarity") {
    // without burstiness the index path sums phi over a subset of the
    // all-pairs grid, so each normalized score is bounded by the oracle
    std::mt19937_64 gen(23);
    const SimilarityParams p;
    MihIndex index(open_params());
    const BinaryDescriptor base = random_descriptor(256, gen);

    std::vector<FrameFeatures> stored;
    for (std::uint32_t f = 0; f < 8; ++f) {
        std::vector<BinaryDescriptor> descs;
        for (int i = 0; i < 6; ++i)
            descs.push_back(i < 3 ? perturb_distinct(base, 4u * f + i, gen)
                                  : random_descriptor(256, gen));
        stored.push_back(frame_of(f, descs));
        index.insert_frame(stored.back());
    }

    std::vector<BinaryDescriptor> qd;
    for (int i = 0; i < 6; ++i)
        qd.push_back(i < 4 ? perturb_distinct(base, 3u * i, gen)
                           : random_descriptor(256, gen));
    const FrameFeatures query = frame_of(100, qd);

    const ScoreVector sv = score_query(query, index, p, false);
    CHECK(sv.query_frame_id == 100);
    for (std::uint32_t f = 0; f < 8; ++f) {
        const double exact = image_similarity_exact(query, stored[f], p);
        const FrameScore* s = sv.find(f);
        const double approx = s ? s->normalized : 0.0;
        CAPTURE(f);
        CHECK(approx <= exact + 1e-12);
    }
    CHECK(sv.find(8) == nullptr); // no such frame
}

TEST_CASE("index scoring equals the oracle when every close pair collides") {
    // frames hold exact duplicates of some query features; all other pairs
    // sit near d = 128 where phi = 0, so retrieval misses nothing
    std::mt19937_64 gen(31);
    const SimilarityParams p;
    MihIndex index(open_params());

    std::vector<BinaryDescriptor> qd;
    for (int i = 0; i < 5; ++i) qd.push_back(random_descriptor(256, gen));
    const FrameFeatures query = frame_of(9, qd);

    std::vector<FrameFeatures> stored;
    for (std::uint32_t f = 0; f < 4; ++f) {
        std::vector<BinaryDescriptor> descs;
        for (std::uint32_t i = 0; i <= f; ++i) descs.push_back(qd[i]);
        while (descs.size() < 5) descs.push_back(random_descriptor(256, gen));
        stored.push_back(frame_of(f, descs));
        index.insert_frame(stored.back());
    }

    const ScoreVector sv = score_query(query, index, p, false);
    for (std::uint32_t f = 0; f < 4; ++f) {
        const double exact = image_similarity_exact(query, stored[f], p);
        const FrameScore* s = sv.find(f);
        REQUIRE(s != nullptr);
        CHECK(s->candidate_features == 5);
        CHECK(s->normalized == doctest::Approx(exact).epsilon(1e-12));
        // duplicated features contribute phi = 1 apiece
        CHECK(s->accumulated >= static_cast<double>(f + 1) - 1e-12);
    }
}

TEST_CASE("burstiness shares each feature's unit vote across frames") {
    // below the IDF activation count the weight is exactly 1 per feature,
    // split in proportion to phi; with one duplicate in each of five frames
    // every frame collects one fifth
    std::mt19937_64 gen(47);
    const SimilarityParams p; // idf_min_frames = 10
    MihIndex index(open_params());
    const BinaryDescriptor shared = random_descriptor(256, gen);
    for (std::uint32_t f = 0; f < 5; ++f)
        index.insert_frame(frame_of(f, {shared}));

    const FrameFeatures query = frame_of(50, {shared});
    const ScoreVector sv = score_query(query, index, p, true);
    double total = 0.0;
    for (std::uint32_t f = 0; f < 5; ++f) {
        const FrameScore* s = sv.find(f);
        REQUIRE(s != nullptr);
        CHECK(s->accumulated == doctest::Approx(0.2).epsilon(1e-12));
        total += s->accumulated;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a unique match earns the full log-IDF weight") {
    std::mt19937_64 gen(53);
    const SimilarityParams p;
    MihIndex index(open_params());
    const BinaryDescriptor rare = random_descriptor(256, gen);
    const std::uint32_t n = 12; // past the IDF activation threshold
    for (std::uint32_t f = 0; f < n; ++f)
        index.insert_frame(
            frame_of(f, {f == 7 ? rare : random_descriptor(256, gen)}));

    const ScoreVector sv = score_query(frame_of(90, {rare}), index, p, true);
    const FrameScore* s = sv.find(7);
    REQUIRE(s != nullptr);
    CHECK(s->accumulated ==
          doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-12));
}

TEST_CASE("a feature present everywhere scores zero under burstiness") {
    std::mt19937_64 gen(59);
    const SimilarityParams p;
    MihIndex index(open_params());
    const BinaryDescriptor everywhere = random_descriptor(256, gen);
    for (std::uint32_t f = 0; f < 12; ++f)
        index.insert_frame(frame_of(f, {everywhere}));

    // ln(12 / 12) = 0: the vote vanishes and no frame is reported
    const ScoreVector burst =
        score_query(frame_of(80, {everywhere}), index, p, true);
    CHECK(burst.scores.empty());

    // without burstiness the same corpus scores phi = 1 per frame
    const ScoreVector plain =
        score_query(frame_of(80, {everywhere}), index, p, false);
    CHECK(plain.scores.size() == 12);
    for (const FrameScore& s : plain.scores)
        CHECK(s.accumulated == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("IDF respects the exclusion predicate when counting frames") {
    // eligible frames drop below idf_min_frames once exclusions apply,
    // reverting the weight to 1
    std::mt19937_64 gen(61);
    const SimilarityParams p;
    MihIndex index(open_params());
    const BinaryDescriptor shared = random_descriptor(256, gen);
    for (std::uint32_t f = 0; f < 12; ++f)
        index.insert_frame(frame_of(f, {shared}));

    const auto exclude = [](std::uint32_t f) { return f >= 5; };
    const ScoreVector sv =
        score_query(frame_of(70, {shared}), index, p, true, exclude);
    REQUIRE(sv.scores.size() == 5); // only eligible frames surface
    for (const FrameScore& s : sv.scores) {
        CHECK(s.frame_id < 5);
        CHECK(s.accumulated == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("early termination leaves scores untouched on close-pair corpora") {
    // planted matches at d <= 24 can never exceed the partial threshold in
    // the prefix, so only phi-zero outliers get rejected early
    std::mt19937_64 gen(67);
    const SimilarityParams with_et; // early_termination = true
    SimilarityParams no_et = with_et;
    no_et.early_termination = false;

    MihIndex index(open_params());
    const BinaryDescriptor base = random_descriptor(256, gen);
    std::vector<FrameFeatures> stored;
    for (std::uint32_t f = 0; f < 6; ++f) {
        std::vector<BinaryDescriptor> descs;
        for (int i = 0; i < 5; ++i)
            descs.push_back(i < 2
                                ? perturb_distinct(base, 4u * f + i, gen)
                                : random_descriptor(256, gen));
        stored.push_back(frame_of(f, descs));
        index.insert_frame(stored.back());
    }
    std::vector<BinaryDescriptor> qd;
    for (int i = 0; i < 5; ++i)
        qd.push_back(i < 3 ? perturb_distinct(base, 2u * i, gen)
                           : random_descriptor(256, gen));
    const FrameFeatures query = frame_of(44, qd);

    for (const bool burst : {false, true}) {
        const ScoreVector a = score_query(query, index, with_et, burst);
        const ScoreVector b = score_query(query, index, no_et, burst);
        REQUIRE(a.scores.size() == b.scores.size());
        for (std::size_t i = 0; i < a.scores.size(); ++i) {
            CHECK(a.scores[i].frame_id == b.scores[i].frame_id);
            CHECK(a.scores[i].accumulated == b.scores[i].accumulated);
            CHECK(a.scores[i].normalized == b.scores[i].normalized);
        }
        CHECK(a.candidates_examined == b.candidates_examined);
        CHECK(b.early_rejections == 0);
        CHECK(a.full_distance_evals <= b.full_distance_evals);
    }
}

TEST_CASE("scores are identical for any thread count") {
    std::mt19937_64 gen(71);
    const SimilarityParams p;
    MihIndex index(open_params());
    const BinaryDescriptor base = random_descriptor(256, gen);
    for (std::uint32_t f = 0; f < 10; ++f) {
        std::vector<BinaryDescriptor> descs;
        for (int i = 0; i < 20; ++i)
            descs.push_back(i < 10 ? perturb_distinct(base, i + f, gen)
                                   : random_descriptor(256, gen));
        index.insert_frame(frame_of(f, descs));
    }
    std::vector<BinaryDescriptor> qd;
    for (int i = 0; i < 20; ++i)
        qd.push_back(i < 10 ? perturb_distinct(base, 2u * i, gen)
                            : random_descriptor(256, gen));
    const FrameFeatures query = frame_of(33, qd);

    parallel::set_max_threads(1);
    const ScoreVector serial = score_query(query, index, p, true);
    parallel::set_max_threads(8);
    const ScoreVector threaded = score_query(query, index, p, true);
    parallel::set_max_threads(0);

    REQUIRE(serial.scores.size() == threaded.scores.size());
    for (std::size_t i = 0; i < serial.scores.size(); ++i) {
        CHECK(serial.scores[i].frame_id == threaded.scores[i].frame_id);
        // bit-exact: the merge order is fixed regardless of scheduling
        CHECK(serial.scores[i].accumulated == threaded.scores[i].accumulated);
        CHECK(serial.scores[i].normalized == threaded.scores[i].normalized);
    }
    CHECK(serial.candidates_examined == threaded.candidates_examined);
    CHECK(serial.early_rejections == threaded.early_rejections);
    CHECK(serial.full_distance_evals == threaded.full_distance_evals);
}

TEST_CASE("score_query validates its inputs") {
    MihIndex index(open_params());
    std::mt19937_64 gen(73);
    index.insert_frame(frame_of(0, {random_descriptor(256, gen)}));

    FrameFeatures short_query(1, 128);
    short_query.add(BinaryDescriptor(128));
    CHECK_THROWS_AS(score_query(short_query, index, {}, false),
                    invalid_input);

    SimilarityParams bad;
    bad.prefix_bits = 12;
    const FrameFeatures query = frame_of(2, {random_descriptor(256, gen)});
    CHECK_THROWS_AS(score_query(query, index, bad, false), invalid_input);
}
