#include "mih/probmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "mih/error.hpp"
#include "mih/rng.hpp"

namespace mih::prob {

using Rational = boost::multiprecision::cpp_rational;

namespace {

std::mutex binom_mutex;
std::vector<std::vector<BigInt>> binom_rows;

BigInt power(unsigned base, unsigned exp) {
    return boost::multiprecision::pow(BigInt(base), exp);
}

double to_double(const BigInt& num, const BigInt& den) {
    return Rational(num, den).convert_to<double>();
}

} // namespace

BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    std::lock_guard lock(binom_mutex);
    while (binom_rows.size() <= n) {
        const auto row = static_cast<unsigned>(binom_rows.size());
        std::vector<BigInt> cur(row + 1);
        cur.front() = 1;
        cur.back() = 1;
        for (unsigned j = 1; j < row; ++j)
            cur[j] = binom_rows[row - 1][j - 1] + binom_rows[row - 1][j];
        binom_rows.push_back(std::move(cur));
    }
    return binom_rows[n][k];
}

BigInt surjection_count(unsigned d, unsigned m) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (d < m) return 0;
    BigInt total = 0;
    for (unsigned k = 0; k <= m; ++k) {
        const BigInt term = binomial(m, k) * power(m - k, d);
        if (k % 2 == 0)
            total += term;
        else
            total -= term;
    }
    return total;
}

double p_recall_zero(unsigned m, unsigned d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (d < m) return 1.0;
    return 1.0 - to_double(surjection_count(d, m), power(m, d));
}

namespace {

// Counts assignments where the minimum occupancy is <= r by
// inclusion-exclusion over the events "bin i holds at most r balls":
// N = sum_{k=1..m} (-1)^{k+1} C(m,k) U_k, where U_k picks s balls for the k
// constrained bins (each <= r, W table below) and spreads the rest over the
// remaining m-k bins.
std::vector<double> compute_row(unsigned r, unsigned m, unsigned max_d) {
    const auto s_cap = static_cast<unsigned>(std::min<std::uint64_t>(
        max_d, static_cast<std::uint64_t>(m) * r));

    // W[k][s]: placements of s labeled balls into k bins, each bin <= r.
    std::vector<std::vector<BigInt>> W(m + 1,
                                       std::vector<BigInt>(s_cap + 1));
    W[0][0] = 1;
    for (unsigned k = 1; k <= m; ++k) {
        const auto hi = static_cast<unsigned>(std::min<std::uint64_t>(
            s_cap, static_cast<std::uint64_t>(k) * r));
        for (unsigned s = 0; s <= hi; ++s) {
            BigInt acc = 0;
            const unsigned jmax = std::min(r, s);
            for (unsigned j = 0; j <= jmax; ++j)
                acc += binomial(s, j) * W[k - 1][s - j];
            W[k][s] = std::move(acc);
        }
    }

    // P[b][e] = b^e with P[b][0] = 1 (including b = 0).
    std::vector<std::vector<BigInt>> P(m + 1,
                                       std::vector<BigInt>(max_d + 1));
    for (unsigned b = 0; b <= m; ++b) {
        P[b][0] = 1;
        for (unsigned e = 1; e <= max_d; ++e) P[b][e] = P[b][e - 1] * b;
    }

    std::vector<double> row(max_d + 1);
    for (unsigned d = 0; d <= max_d; ++d) {
        if (d < static_cast<std::uint64_t>(m) * (r + 1)) {
            row[d] = 1.0; // pigeonhole: some bin must hold <= r balls
            continue;
        }
        BigInt favorable = 0;
        for (unsigned k = 1; k <= m; ++k) {
            const auto shi = static_cast<unsigned>(std::min<std::uint64_t>(
                d, static_cast<std::uint64_t>(k) * r));
            BigInt u = 0;
            for (unsigned s = 0; s <= shi; ++s) {
                if (W[k][s].is_zero()) continue;
                u += W[k][s] * binomial(d, s) * P[m - k][d - s];
            }
            const BigInt term = binomial(m, k) * u;
            if (k % 2 == 1)
                favorable += term;
            else
                favorable -= term;
        }
        row[d] = to_double(favorable, P[m][d]);
    }
    return row;
}

std::mutex row_mutex;
std::map<std::pair<unsigned, unsigned>, std::vector<double>> row_cache;

} // namespace

std::vector<double> p_recall_row(unsigned r, unsigned m, unsigned max_d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    std::lock_guard lock(row_mutex);
    auto& slot = row_cache[{r, m}];
    if (slot.size() <= max_d)
        slot = compute_row(r, m, std::max(max_d, 256u));
    return {slot.begin(), slot.begin() + max_d + 1};
}

double p_recall(unsigned r, unsigned m, unsigned d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (d < static_cast<std::uint64_t>(m) * (r + 1)) return 1.0;
    return p_recall_row(r, m, d)[d];
}

double p_recall_enum(unsigned r, unsigned m, unsigned d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (binomial(d + m - 1, m - 1) > 2'000'000)
        throw capacity_error("occupancy-vector enumeration infeasible for "
                             "this (m, d)");
    BigInt favorable = 0;
    // Walk every occupancy vector, accumulating its multinomial weight as a
    // product of binomial choices.
    auto walk = [&](auto&& self, unsigned bins_left, unsigned balls_left,
                    const BigInt& weight, bool hit) -> void {
        if (bins_left == 1) {
            if (hit || balls_left <= r) favorable += weight;
            return;
        }
        for (unsigned n = 0; n <= balls_left; ++n)
            self(self, bins_left - 1, balls_left - n,
                 BigInt(weight * binomial(balls_left, n)), hit || n <= r);
    };
    walk(walk, m, d, BigInt(1), false);
    return to_double(favorable, power(m, d));
}

std::vector<double> p_recall_dp_row(unsigned r, unsigned m, unsigned max_d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (m > 64 || max_d > 512)
        throw capacity_error("complement DP bounded to m <= 64, d <= 512");
    // V[k][s]: placements of s balls into k bins, every bin >= r+1.
    std::vector<std::vector<BigInt>> V(m + 1,
                                       std::vector<BigInt>(max_d + 1));
    V[0][0] = 1;
    for (unsigned k = 1; k <= m; ++k)
        for (unsigned s = 0; s <= max_d; ++s) {
            BigInt acc = 0;
            for (unsigned j = r + 1; j <= s; ++j) {
                if (V[k - 1][s - j].is_zero()) continue;
                acc += binomial(s, j) * V[k - 1][s - j];
            }
            V[k][s] = std::move(acc);
        }
    std::vector<double> row(max_d + 1);
    BigInt md = 1;
    for (unsigned d = 0; d <= max_d; ++d) {
        row[d] = to_double(md - V[m][d], md);
        md *= m;
    }
    return row;
}

double p_recall_dp(unsigned r, unsigned m, unsigned d) {
    return p_recall_dp_row(r, m, d)[d];
}

double p_recall_bruteforce(unsigned r, unsigned m, unsigned d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    constexpr std::uint64_t kLimit = 10'000'000;
    std::uint64_t total = 1;
    for (unsigned i = 0; i < d; ++i) {
        total *= m;
        if (total > kLimit)
            throw capacity_error("assignment enumeration bounded to "
                                 "m^d <= 10^7");
    }
    std::vector<unsigned> digits(d, 0);
    std::vector<unsigned> counts(m, 0);
    counts[0] = d;
    std::uint64_t favorable = 0;
    for (std::uint64_t step = 0;; ++step) {
        unsigned min_count = counts[0];
        for (unsigned b = 1; b < m; ++b)
            min_count = std::min(min_count, counts[b]);
        if (min_count <= r) ++favorable;
        if (step + 1 == total) break;
        unsigned i = 0;
        for (;; ++i) {
            --counts[digits[i]];
            if (++digits[i] == m) {
                digits[i] = 0;
                ++counts[0];
            } else {
                ++counts[digits[i]];
                break;
            }
        }
    }
    return static_cast<double>(favorable) / static_cast<double>(total);
}

double p_recall_oracle(unsigned r, unsigned m, unsigned d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (binomial(d + m - 1, m - 1) <= 2'000'000)
        return p_recall_enum(r, m, d);
    if (m <= 64 && d <= 512) return p_recall_dp(r, m, d);
    throw capacity_error("no oracle path covers this (m, d)");
}

McEstimate p_recall_mc(unsigned r, unsigned m, unsigned d,
                       std::uint64_t trials, std::uint64_t seed) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (trials == 0) throw invalid_input("trial count must be positive");
    std::mt19937_64 gen(seed);
    std::vector<std::uint32_t> counts(m);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::fill(counts.begin(), counts.end(), 0u);
        for (unsigned i = 0; i < d; ++i) ++counts[rng::bounded(gen, m)];
        std::uint32_t min_count = counts[0];
        for (unsigned b = 1; b < m; ++b)
            min_count = std::min(min_count, counts[b]);
        if (min_count <= r) ++hits;
    }
    McEstimate est;
    est.trials = trials;
    est.value = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_error =
        std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(trials));
    return est;
}

double single_ball_rest_covered(unsigned m, unsigned d) {
    if (m == 0) throw invalid_input("bin count must be positive");
    if (d == 0) return 0.0;
    if (m == 1) return d == 1 ? 1.0 : 0.0;
    const BigInt num = BigInt(d) * surjection_count(d - 1, m - 1);
    return to_double(num, power(m, d));
}

DistancePmfs distance_pmfs(const DistanceModel& model) {
    if (model.inlier_sigma <= 0.0 || model.outlier_sigma <= 0.0)
        throw invalid_input("distance-law sigma must be positive");
    if (model.support_bits < model.outlier_mean)
        throw invalid_input("support must reach the outlier mean");
    auto discretize = [&](double mean, double sigma) {
        std::vector<double> pmf(model.support_bits + 1);
        double sum = 0.0;
        for (unsigned d = 0; d <= model.support_bits; ++d) {
            const double z = (static_cast<double>(d) - mean) / sigma;
            pmf[d] = std::exp(-0.5 * z * z);
            sum += pmf[d];
        }
        for (double& p : pmf) p /= sum;
        return pmf;
    };
    return {discretize(model.inlier_mean, model.inlier_sigma),
            discretize(model.outlier_mean, model.outlier_sigma)};
}

namespace {

double expected_recall(unsigned r, unsigned m, const std::vector<double>& pmf,
                       unsigned support) {
    const std::vector<double> row = p_recall_row(r, m, support);
    double acc = 0.0;
    for (unsigned d = 0; d <= support; ++d) acc += row[d] * pmf[d];
    return acc;
}

} // namespace

double accuracy_R(unsigned r, unsigned m, const DistanceModel& model) {
    return expected_recall(r, m, distance_pmfs(model).inlier,
                           model.support_bits);
}

double complexity_E(unsigned r, unsigned m, const DistanceModel& model) {
    return expected_recall(r, m, distance_pmfs(model).outlier,
                           model.support_bits);
}

BigInt fixed_overhead(unsigned m, unsigned L) {
    if (m == 0) throw invalid_input("table count must be positive");
    if (L < m) throw invalid_input("more tables than bits");
    const unsigned base = L / m;
    const unsigned rem = L % m;
    return BigInt(rem) * (BigInt(1) << (base + 1)) +
           BigInt(m - rem) * (BigInt(1) << base);
}

BigInt fixed_overhead(const SubstringLayout& layout) {
    BigInt total = 0;
    for (const std::uint32_t len : layout.lengths) total += BigInt(1) << len;
    return total;
}

std::vector<GridCell> analyze_grid(const DistanceModel& model,
                                   const SelectOptions& opts) {
    if (opts.m_min == 0 || opts.m_min > opts.m_max || opts.r_min > opts.r_max)
        throw invalid_input("empty parameter grid");
    const DistancePmfs pmfs = distance_pmfs(model);
    std::vector<GridCell> cells;
    for (unsigned r = opts.r_min; r <= opts.r_max; ++r)
        for (unsigned m = opts.m_min; m <= opts.m_max; ++m) {
            GridCell cell;
            cell.r = r;
            cell.m = m;
            const std::vector<double> row =
                p_recall_row(r, m, model.support_bits);
            for (unsigned d = 0; d <= model.support_bits; ++d) {
                cell.accuracy += row[d] * pmfs.inlier[d];
                cell.complexity += row[d] * pmfs.outlier[d];
            }
            cell.fixed_entries = fixed_overhead(m, opts.descriptor_bits);
            cells.push_back(std::move(cell));
        }
    return cells;
}

ParamRecommendation select_params(double min_accuracy, SelectMode mode,
                                  const DistanceModel& model,
                                  const SelectOptions& opts) {
    if (min_accuracy <= 0.0 || min_accuracy >= 1.0)
        throw invalid_input("minimum accuracy must lie in (0, 1)");
    const ParamRecommendation* best = nullptr;
    std::vector<ParamRecommendation> pool;
    for (const GridCell& cell : analyze_grid(model, opts)) {
        if (cell.accuracy < min_accuracy) continue;
        if (mode == SelectMode::online &&
            cell.fixed_entries > opts.memory_budget)
            continue;
        pool.push_back({cell.m, cell.r, cell.accuracy, cell.complexity,
                        cell.fixed_entries});
    }
    for (const ParamRecommendation& cand : pool) {
        if (!best || cand.complexity < best->complexity ||
            (cand.complexity == best->complexity &&
             (cand.m < best->m ||
              (cand.m == best->m && cand.r < best->r))))
            best = &cand;
    }
    if (!best)
        throw not_found(mode == SelectMode::online
                            ? "no configuration reaches the accuracy floor "
                              "within the memory budget"
                            : "no configuration reaches the accuracy floor");
    return *best;
}

std::vector<ParamRecommendation> param_frontier(double min_accuracy,
                                                const DistanceModel& model,
                                                const SelectOptions& opts) {
    if (min_accuracy <= 0.0 || min_accuracy >= 1.0)
        throw invalid_input("minimum accuracy must lie in (0, 1)");
    std::vector<ParamRecommendation> frontier;
    for (const GridCell& cell : analyze_grid(model, opts)) {
        if (cell.accuracy < min_accuracy) continue;
        if (!frontier.empty() && frontier.back().r == cell.r) continue;
        frontier.push_back({cell.m, cell.r, cell.accuracy, cell.complexity,
                            cell.fixed_entries});
    }
    return frontier;
}

double prefix_reject_probability(unsigned d, unsigned partial_threshold,
                                 unsigned prefix_bits, unsigned L) {
    if (prefix_bits == 0 || prefix_bits > L)
        throw invalid_input("prefix must lie within the descriptor length");
    if (d > L) throw invalid_input("distance exceeds the descriptor length");
    const unsigned suffix = L - prefix_bits;
    const unsigned x_hi = std::min(d, prefix_bits);
    const unsigned x_lo =
        std::max(partial_threshold + 1, d > suffix ? d - suffix : 0);
    if (x_lo > x_hi) return 0.0;
    BigInt num = 0;
    for (unsigned x = x_lo; x <= x_hi; ++x)
        num += binomial(prefix_bits, x) * binomial(suffix, d - x);
    return to_double(num, binomial(L, d));
}

EarlyTermRates early_term_rates(unsigned partial_threshold,
                                unsigned prefix_bits, unsigned L,
                                const DistanceModel& model, unsigned d0) {
    DistanceModel scoped = model;
    scoped.support_bits = L;
    const DistancePmfs pmfs = distance_pmfs(scoped);
    EarlyTermRates rates;
    const unsigned split = std::min(d0, L);

    double mass = 0.0, weighted = 0.0;
    for (unsigned d = 0; d <= split; ++d) {
        mass += pmfs.inlier[d];
        weighted += pmfs.inlier[d] *
                    prefix_reject_probability(d, partial_threshold,
                                              prefix_bits, L);
    }
    rates.inlier_reject = mass > 0.0 ? weighted / mass : 0.0;

    mass = 0.0;
    weighted = 0.0;
    for (unsigned d = split + 1; d <= L; ++d) {
        mass += pmfs.outlier[d];
        weighted += pmfs.outlier[d] *
                    prefix_reject_probability(d, partial_threshold,
                                              prefix_bits, L);
    }
    rates.outlier_reject = mass > 0.0 ? weighted / mass : 0.0;
    return rates;
}

double layout_recall(const SubstringLayout& layout, unsigned r, unsigned d) {
    const unsigned L = layout.total_bits;
    if (L == 0) throw invalid_input("empty layout");
    if (d > L) throw invalid_input("distance exceeds the layout length");
    // Complement polynomial: coefficient of x^d in
    // prod_k sum_{j=r+1}^{len_k} C(len_k, j) x^j counts placements of d
    // distinct error positions leaving no table with <= r errors.
    std::vector<BigInt> poly{BigInt(1)};
    for (const std::uint32_t len : layout.lengths) {
        std::vector<BigInt> next(std::min<std::size_t>(poly.size() + len,
                                                       d + 1));
        for (std::size_t a = 0; a < poly.size(); ++a) {
            if (poly[a].is_zero()) continue;
            for (unsigned j = r + 1; j <= len && a + j <= d; ++j)
                next[a + j] += poly[a] * binomial(len, j);
        }
        poly = std::move(next);
    }
    const BigInt blocked = d < poly.size() ? poly[d] : BigInt(0);
    return 1.0 - to_double(blocked, binomial(L, d));
}

} // namespace mih::prob
