#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "mih/descriptor.hpp"

// Occupancy-probability model for multi-index hashing. A descriptor pair at
// Hamming distance d collides in at least one of m tables with the
// probability that d balls thrown into m bins leave some bin with at most r
// balls (r = probe radius). Everything here is computed in exact big-integer
// arithmetic and only converted to double at the boundary.

namespace mih::prob {

using BigInt = boost::multiprecision::cpp_int;

/// Exact C(n, k); 0 when k > n. Memoized process-wide.
BigInt binomial(unsigned n, unsigned k);

/// Number of assignments of d labeled balls to m bins leaving no bin empty:
/// sum_k (-1)^k C(m,k) (m-k)^d. Zero when d < m.
BigInt surjection_count(unsigned d, unsigned m);

/// Probability that at least one of m bins is empty after d balls:
/// 1 - surjection_count(d, m) / m^d.
double p_recall_zero(unsigned m, unsigned d);

/// Probability that the minimum bin occupancy is <= r after d uniform
/// balls into m bins. Production path: inclusion-exclusion over the events
/// "bin i holds at most r balls", exact arithmetic.
double p_recall(unsigned r, unsigned m, unsigned d);

/// p_recall for every d in [0, max_d] in one pass (shares the internal
/// bounded-occupancy tables across distances; memoized per (r, m)).
std::vector<double> p_recall_row(unsigned r, unsigned m, unsigned max_d);

/// Independent verification paths. Each computes the same probability as
/// p_recall without using its inclusion-exclusion decomposition.

/// Enumerates every occupancy vector (n_1..n_m) with its exact multinomial
/// weight. Feasible while C(d+m-1, m-1) stays small; otherwise throws
/// capacity_error.
double p_recall_enum(unsigned r, unsigned m, unsigned d);

/// Complement dynamic program: counts assignments where every bin holds at
/// least r+1 balls by convolving per-bin binomial choices, then subtracts
/// from m^d. Throws capacity_error beyond m <= 64, d <= 512.
double p_recall_dp(unsigned r, unsigned m, unsigned d);

/// p_recall_dp for every d in [0, max_d], sharing one DP table.
std::vector<double> p_recall_dp_row(unsigned r, unsigned m, unsigned max_d);

/// Raw odometer over all m^d assignments; the strongest (and slowest)
/// check. Requires m^d <= 10^7, else capacity_error.
double p_recall_bruteforce(unsigned r, unsigned m, unsigned d);

/// Dispatching oracle: enumeration when feasible, complement DP otherwise;
/// capacity_error when neither applies.
double p_recall_oracle(unsigned r, unsigned m, unsigned d);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

/// Monte-Carlo estimate of p_recall with its binomial standard error;
/// deterministic for a fixed seed.
McEstimate p_recall_mc(unsigned r, unsigned m, unsigned d,
                       std::uint64_t trials, std::uint64_t seed);

/// Probability that a designated bin receives exactly one of d balls while
/// every other bin receives at least one: d * surjection_count(d-1, m-1) /
/// m^d. Retained as a unit-tested building block of the radius-1 analysis.
double single_ball_rest_covered(unsigned m, unsigned d);

/// Inlier/outlier Hamming-distance laws, normal with the given mean and
/// standard deviation, discretized over [0, support_bits].
struct DistanceModel {
    double inlier_mean = 32.0;
    double inlier_sigma = 10.0;
    double outlier_mean = 128.0;
    double outlier_sigma = 20.0;
    unsigned support_bits = 256;
};

struct DistancePmfs {
    std::vector<double> inlier;  // index d in [0, support_bits]
    std::vector<double> outlier;
};

/// Gaussian densities evaluated at integer d, truncated to [0, support]
/// and renormalized to sum to 1.
DistancePmfs distance_pmfs(const DistanceModel& model);

/// Expected candidate recall over the inlier law: R = sum_d p_recall * P_i.
double accuracy_R(unsigned r, unsigned m, const DistanceModel& model);

/// Expected wasted-candidate rate over the outlier law:
/// E = sum_d p_recall * P_o.
double complexity_E(unsigned r, unsigned m, const DistanceModel& model);

/// Total hash entries across all tables: sum_k 2^lengths[k] over the
/// balanced m-way split of L bits (m * 2^(L/m) when m divides L).
BigInt fixed_overhead(unsigned m, unsigned L);
BigInt fixed_overhead(const SubstringLayout& layout);

enum class SelectMode { offline, online };

struct ParamRecommendation {
    unsigned m = 0;
    unsigned r = 0;
    double accuracy = 0.0;
    double complexity = 0.0;
    BigInt fixed_entries;
};

struct SelectOptions {
    unsigned r_min = 0;
    unsigned r_max = 3;
    unsigned m_min = 4;
    unsigned m_max = 32;
    unsigned descriptor_bits = 256;
    BigInt memory_budget = BigInt(1) << 24; // hash entries, online mode only
};

struct GridCell {
    unsigned r = 0;
    unsigned m = 0;
    double accuracy = 0.0;
    double complexity = 0.0;
    BigInt fixed_entries;
};

/// Every grid cell with its R, E and fixed overhead, ordered r ascending
/// then m ascending (the analyze-params CSV order).
std::vector<GridCell> analyze_grid(const DistanceModel& model,
                                   const SelectOptions& opts = {});

/// Among grid cells with accuracy >= min_accuracy: offline mode minimizes E
/// alone; online mode minimizes E among cells whose fixed overhead fits the
/// memory budget. Ties break toward smaller m, then smaller r. Throws
/// not_found when nothing qualifies.
ParamRecommendation select_params(double min_accuracy, SelectMode mode,
                                  const DistanceModel& model,
                                  const SelectOptions& opts = {});

/// For each r in the grid, the minimal m whose accuracy reaches
/// min_accuracy (radii with no qualifying m are omitted).
std::vector<ParamRecommendation> param_frontier(double min_accuracy,
                                                const DistanceModel& model,
                                                const SelectOptions& opts = {});

/// P(prefix distance > threshold | total distance d) when the d error bits
/// occupy d distinct positions uniform among L: hypergeometric tail.
double prefix_reject_probability(unsigned d, unsigned partial_threshold,
                                 unsigned prefix_bits, unsigned L);

struct EarlyTermRates {
    double inlier_reject = 0.0;   // among inlier-law pairs with d <= d0
    double outlier_reject = 0.0;  // among outlier-law pairs with d > d0
};

/// Early-termination rejection rates marginalized over the distance laws.
/// The inlier rate conditions on d <= d0 (pairs the scorer would keep, so
/// any rejection is a false reject); the outlier rate conditions on d > d0.
EarlyTermRates early_term_rates(unsigned partial_threshold,
                                unsigned prefix_bits, unsigned L,
                                const DistanceModel& model, unsigned d0 = 50);

/// Collision probability for a pair whose d error bits occupy d distinct
/// uniform positions (the physical bit-flip model), under an arbitrary
/// layout: 1 - [x^d] prod_k (sum_{j>r} C(len_k, j) x^j) / C(L, d). For
/// equal-length tables this differs from the balls-into-bins p_recall,
/// which lets each table receive repeated errors.
double layout_recall(const SubstringLayout& layout, unsigned r, unsigned d);

} // namespace mih::prob
