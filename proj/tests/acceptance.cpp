// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include "vat/analysis.hpp"
#include "vat/error.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace vat;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int precision = 4)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(precision);
    s << x;
    return s.str();
}

// ------------------------------------------------------------------ 1

Outcome node_bound()
{
    std::mt19937_64 rng(20240601);
    const std::array<std::uint64_t, 4> Ks{2, 4, 16, 512};
    std::uint64_t worst_slack = UINT64_MAX, violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        MachineConfig cfg;
        cfg.K = Ks[rng() % Ks.size()];
        cfg.d = 1 + static_cast<std::uint32_t>(rng() % 6);
        cfg.P = 1;
        cfg.cache_units = 1;
        const std::uint64_t d = cfg.d;
        // A random run of d consecutive pages aligned to a multiple of d.
        const std::uint64_t runs = page_count(cfg) / d;
        const std::uint64_t start = (rng() % runs) * d;
        std::vector<PageIndex> pages(d);
        std::iota(pages.begin(), pages.end(), start);
        const std::uint64_t internal = internal_node_count(path_union(pages, cfg));
        const std::uint64_t bound = 2 * d + (d + cfg.K - 2) / (cfg.K - 1);
        if (internal > bound || bound > 3 * d) ++violations;
        else worst_slack = std::min(worst_slack, bound - internal);
    }
    return {violations == 0, "10000 runs, violations " + std::to_string(violations) + ", min slack "
                                 + std::to_string(worst_slack)};
}

// ------------------------------------------------------------------ 2

// Smallest power-of-two cache (units) with M >= 4 g(dB).
std::uint64_t tall_cache_units(const TallnessConstraint& g, std::uint64_t P, std::uint64_t a, std::uint32_t d)
{
    std::uint64_t units = P;
    while (!tallness_check(g, static_cast<double>(units / a), static_cast<double>(P / a), d).ok) units *= 2;
    return units;
}

Outcome four_d_factor()
{
    const std::uint64_t K = 16, P = 512, a = 4;
    bool pass = true;
    std::ostringstream detail;
    detail.imbue(std::locale::classic());
    double worst = 0;
    for (auto kind : {WorkloadKind::multiway_mergesort, WorkloadKind::funnelsort}) {
        const auto g = kind == WorkloadKind::funnelsort ? TallnessConstraint::quadratic()
                                                         : TallnessConstraint::identity_multiple(5);
        for (std::uint64_t n : {1u << 16, 1u << 18, 1u << 20}) {
            WorkloadSpec spec{kind, n, a, 1};
            std::uint64_t extent = kind == WorkloadKind::funnelsort ? workload_extent(spec) : 2 * n * a;
            const std::uint32_t d = compute_depth(extent - 1, K, P);
            const std::uint64_t cache = tall_cache_units(g, P, a, d);
            if (kind == WorkloadKind::multiway_mergesort) {
                spec.merge_M = cache / (4 * a);
                spec.merge_B = d * P / a;
            }
            const auto trace = generate(spec);
            const auto cfg = make_machine(K, P, a, trace.extent, cache);
            const auto r = simulate_theorem2(trace, cfg, Policy::lru, g);
            const bool ok = r.vat_faults <= 4 * std::uint64_t{r.d} * r.em_faults && r.per_block_max_faults <= 4 * r.d;
            pass = pass && ok;
            worst = std::max(worst, r.factor / (4.0 * r.d));
            detail << " " << to_string(kind) << " n=2^" << std::log2(n) << " factor " << fmt(r.factor, 3)
                   << "/4d=" << 4 * r.d << " block " << r.per_block_max_faults << (ok ? "" : " FAIL") << ';';
        }
    }
    return {pass, "worst factor/4d " + fmt(worst, 3) + ";" + detail.str()};
}

// ------------------------------------------------------------------ 3

Outcome mergesort_formula()
{
    const std::uint64_t M = 1 << 10, B = 1 << 6;
    bool pass = true;
    std::string detail;
    for (std::uint64_t n : {1u << 14, 1u << 16, 1u << 18}) {
        const auto trace = gen_multiway_mergesort(n, 1, M, B);
        const double em = static_cast<double>(run_em(trace, M, B, Policy::lru).total_faults);
        const double bound = mergesort_em_bound(M, B, n).to_double();
        const double ratio = em / bound;
        const bool ok = ratio <= 2.0 && ratio >= 0.5;
        pass = pass && ok;
        detail += " n=2^" + fmt(std::log2(n)) + " em " + fmt(em, 8) + " formula " + fmt(bound, 8) + " ratio "
                  + fmt(ratio, 3) + ";";
    }
    return {pass, "factor-2 window" + detail};
}

// ------------------------------------------------------------------ 4

struct Series {
    std::vector<double> x, y;
};

bool within_of_mean(const std::vector<double>& y, double tol, double& worst)
{
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    worst = 0;
    for (double v : y) worst = std::max(worst, std::abs(v / mean - 1));
    return worst <= tol;
}

bool strictly_increasing(const std::vector<double>& y)
{
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] > y[i - 1])) return false;
    return true;
}

Outcome growth_shapes()
{
    SweepConfig cfg;  // cache 2^16 units, K = 16, P = 512, a = 4
    cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::uint64_t> sizes;
    for (std::uint64_t n = 1 << 14; n <= (1u << 24); n *= 4) sizes.push_back(n);
    const auto kinds = timing_kinds();
    const auto rows = sweep(kinds, sizes, cfg);

    auto series = [&](WorkloadKind kind) {
        Series s;
        for (const auto& r : rows)
            if (r.kind == kind) {
                s.x.push_back(r.log2_n);
                s.y.push_back(r.normalized_vat);
            }
        return s;
    };

    bool pass = true;
    std::ostringstream detail;
    detail.imbue(std::locale::classic());
    auto note = [&](std::string_view name, bool ok, const std::string& what) {
        pass = pass && ok;
        detail << ' ' << name << ' ' << (ok ? "ok" : "FAIL") << " (" << what << ");";
    };

    double dev = 0;
    {
        const auto s = series(WorkloadKind::sequential_scan);
        note("sequential-scan", within_of_mean(s.y, 0.20, dev), "max dev " + fmt(100 * dev, 3) + "% <= 20%");
    }
    for (auto kind : {WorkloadKind::random_scan, WorkloadKind::permute, WorkloadKind::repeated_binary_search}) {
        const auto s = series(kind);
        const auto fit = fit_line(s.x, s.y);
        note(to_string(kind), strictly_increasing(s.y) && fit.r_squared >= 0.9,
             std::string(strictly_increasing(s.y) ? "increasing" : "not increasing") + ", R^2 "
                 + fmt(fit.r_squared, 4) + " >= 0.9");
    }
    {
        const auto s = series(WorkloadKind::heapsort);
        note("heapsort", strictly_increasing(s.y), strictly_increasing(s.y) ? "increasing" : "not increasing");
    }
    for (auto kind : {WorkloadKind::quicksort, WorkloadKind::heapify}) {
        const auto s = series(kind);
        const bool ok = within_of_mean(s.y, 0.25, dev);
        std::string ys;
        for (double v : s.y) ys += (ys.empty() ? "" : " ") + fmt(v, 3);
        note(to_string(kind), ok, "max dev " + fmt(100 * dev, 3) + "% <= 25%; " + ys);
    }
    return {pass, detail.str()};
}

// ------------------------------------------------------------------ 5

// Exhaustive walk over every trace of length <= 12 on keys {0..3}. The
// brute-force minimum is a forward DP over all cache contents reachable by
// some eviction strategy, carried down the trie of prefixes.
struct BeladyExhaustive {
    static constexpr int kKeys = 4;
    static constexpr std::size_t kCap = 2;
    static constexpr int kMaxLen = 12;
    static constexpr std::uint32_t kInf = 1000;

    std::array<Key, kMaxLen> trace{};
    std::uint64_t checked = 0, mismatches = 0;

    // dp indexed by bitmask of resident keys (|mask| <= kCap).
    using Dp = std::array<std::uint32_t, 1 << kKeys>;

    static Dp step(const Dp& dp, int key)
    {
        Dp next;
        next.fill(kInf);
        const unsigned bit = 1u << key;
        for (unsigned mask = 0; mask < dp.size(); ++mask) {
            if (dp[mask] >= kInf) continue;
            if (mask & bit) {
                next[mask] = std::min(next[mask], dp[mask]);
            } else if (static_cast<std::size_t>(__builtin_popcount(mask)) < kCap) {
                next[mask | bit] = std::min(next[mask | bit], dp[mask] + 1);
            } else {
                for (unsigned v = 0; v < static_cast<unsigned>(kKeys); ++v)
                    if (mask & (1u << v)) {
                        const unsigned m = (mask & ~(1u << v)) | bit;
                        next[m] = std::min(next[m], dp[mask] + 1);
                    }
            }
        }
        return next;
    }

    void visit(int len, const Dp& dp)
    {
        const std::uint32_t brute = *std::min_element(dp.begin(), dp.end());
        const auto opt = fault_count(std::span<const Key>(trace.data(), static_cast<std::size_t>(len)), kCap, Policy::opt);
        ++checked;
        if (opt != brute) ++mismatches;
        if (len == kMaxLen) return;
        for (int k = 0; k < kKeys; ++k) {
            trace[static_cast<std::size_t>(len)] = static_cast<Key>(k);
            visit(len + 1, step(dp, k));
        }
    }
};

Outcome belady_exhaustive()
{
    BeladyExhaustive b;
    BeladyExhaustive::Dp start;
    start.fill(BeladyExhaustive::kInf);
    start[0] = 0;
    b.visit(0, start);
    return {b.mismatches == 0 && b.checked > 0,
            std::to_string(b.checked) + " traces, mismatches " + std::to_string(b.mismatches)};
}

// ------------------------------------------------------------------ 6

Outcome lru_competitive()
{
    std::uint64_t violations = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(seed);
        const std::size_t len = 1 + rng() % 10000;
        const std::uint64_t pages = 1 + rng() % 64;
        std::vector<Key> trace(len);
        for (auto& k : trace) k = rng() % pages;
        for (std::size_t k : {4, 8, 16}) {
            const auto lru = fault_count(trace, 2 * k, Policy::lru);
            const auto opt = fault_count(trace, k, Policy::opt);
            if (lru > 2 * opt + k) ++violations;
            worst = std::max(worst, static_cast<double>(lru) / static_cast<double>(2 * opt + k));
        }
    }
    return {violations == 0, "300 cases, violations " + std::to_string(violations) + ", max LRU(2k)/(2 OPT(k)+k) "
                                 + fmt(worst, 3)};
}

// ------------------------------------------------------------------ 7

Outcome funnelsort_contract()
{
    // Sorting on 100 seeded inputs, sizes log-uniform up to 2^18.
    std::uint64_t unsorted = 0;
    std::mt19937_64 sizes(7);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::uint64_t n =
            seed == 100 ? (1u << 18) : std::max<std::uint64_t>(1, std::uint64_t{1} << (sizes() % 19)) + sizes() % 97;
        auto values = random_keys(std::min<std::uint64_t>(n, 1u << 18), seed);
        auto expect = values;
        std::sort(expect.begin(), expect.end());
        trace_funnelsort(values, 1, [](Address) {});
        if (values != expect) ++unsorted;
    }

    // EM faults over an (M~, B~) grid with M~ >= B~^2, least squares through
    // the origin against (n/B~) max(1, ceil(log(n/M~)/log(M~/B~))).
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> grid{{8, 64},    {8, 256},    {16, 256}, {16, 1024},
                                                                   {32, 1024}, {32, 4096}, {64, 4096}};
    double sfb = 0, sbb = 0, max_ratio = 0;
    for (std::uint64_t n : {1u << 16, 1u << 18, 1u << 20}) {
        std::vector<EmReplayer> ems;
        for (auto [B, M] : grid) ems.emplace_back(M, B, 1, Policy::lru);
        std::vector<std::uint64_t> values = random_keys(n, 1);
        trace_funnelsort(values, 1, [&](Address addr) {
            for (auto& em : ems) em.access(addr);
        });
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto [B, M] = grid[i];
            const double passes = std::max(
                1.0, std::ceil(std::log(static_cast<double>(n) / M) / std::log(static_cast<double>(M) / B)));
            const double b = static_cast<double>(n) / B * passes;
            const double f = static_cast<double>(ems[i].faults());
            sfb += f * b;
            sbb += b * b;
            max_ratio = std::max(max_ratio, f / b);
        }
    }
    const double c = sfb / sbb;

    // Translation overhead of the construction.
    bool factor_ok = true;
    double worst = 0;
    for (std::uint64_t n : {1u << 16, 1u << 18}) {
        const std::uint64_t K = 16, P = 512, a = 4;
        WorkloadSpec spec{WorkloadKind::funnelsort, n, a, 3};
        const auto trace = generate(spec);
        const std::uint32_t d = compute_depth(trace.extent - 1, K, P);
        const auto cache = tall_cache_units(TallnessConstraint::quadratic(), P, a, d);
        const auto r = simulate_theorem2(trace, make_machine(K, P, a, trace.extent, cache), Policy::lru);
        factor_ok = factor_ok && r.vat_faults <= 4 * std::uint64_t{r.d} * r.em_faults;
        worst = std::max(worst, r.factor / (4.0 * r.d));
    }

    const bool pass = unsorted == 0 && c <= 8.0 && factor_ok;
    return {pass, "unsorted " + std::to_string(unsorted) + "/100, fitted c " + fmt(c, 3) + " <= 8 (max point "
                      + fmt(max_ratio, 3) + "), worst VAT/EM over 4d " + fmt(worst, 3)};
}

// ------------------------------------------------------------------ 8

Outcome roundtrip()
{
    constexpr std::uint64_t kLimit = 1 << 16;
    std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>> configs;
    auto add_family = [&](const std::vector<std::uint64_t>& Ks, const std::vector<std::uint64_t>& Ps) {
        for (auto K : Ks)
            for (auto P : Ps)
                for (std::uint32_t d = 1;; ++d) {
                    std::uint64_t span = P;
                    for (std::uint32_t i = 0; i < d && span <= kLimit; ++i) span *= K;
                    if (span > kLimit) break;
                    configs.emplace(K, P, d);
                }
    };
    std::vector<std::uint64_t> small_K, small_P, pow_K, pow_P;
    for (std::uint64_t k = 2; k <= 16; ++k) small_K.push_back(k);
    for (std::uint64_t p = 1; p <= 64; ++p) small_P.push_back(p);
    for (std::uint64_t v = 2; v <= kLimit; v *= 2) pow_K.push_back(v);
    for (std::uint64_t v = 1; v <= kLimit; v *= 2) pow_P.push_back(v);
    add_family(small_K, small_P);
    add_family(pow_K, pow_P);

    std::uint64_t addresses = 0, failures = 0;
    for (const auto& [K, P, d] : configs) {
        MachineConfig cfg;
        cfg.K = K;
        cfg.P = P;
        cfg.d = d;
        cfg.cache_units = P;
        const std::uint64_t space = address_space(cfg);
        for (Address addr = 0; addr < space; ++addr) {
            const auto dec = decompose(addr, cfg);
            if (recompose(dec, cfg) != addr || dec.offset >= P) ++failures;
            ++addresses;
        }
    }
    return {failures == 0, std::to_string(configs.size()) + " configs, " + std::to_string(addresses)
                               + " addresses, failures " + std::to_string(failures)};
}

}  // namespace

int main(int argc, char** argv)
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "node bound 2d + ceil(d/(K-1)) <= 3d", node_bound},
        {2, "VAT faults <= 4d EM faults (mergesort, funnelsort)", four_d_factor},
        {3, "mergesort EM faults within 2x of the closed form", mergesort_formula},
        {4, "normalized-cost growth shapes", growth_shapes},
        {5, "OPT equals brute-force minimum (exhaustive)", belady_exhaustive},
        {6, "LRU(2k) <= 2 OPT(k) + k", lru_competitive},
        {7, "funnelsort sorted, fitted c <= 8, factor <= 4d", funnelsort_contract},
        {8, "decompose/recompose roundtrip (exhaustive)", roundtrip},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d [%s]: %s (%s) [%.1fs]\n", c.id, c.name, out.pass ? "PASS" : "FAIL",
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
