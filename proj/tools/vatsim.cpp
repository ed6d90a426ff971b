// vatsim: replay memory-access traces under the EM and VAT cost models.

#include "vat/analysis.hpp"
#include "vat/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

using namespace vat;
namespace fs = std::filesystem;

namespace {

// Accepts "12345" or "2^k".
std::uint64_t parse_count(std::string_view text, std::string_view flag)
{
    auto fail = [&]() -> std::uint64_t {
        throw Error(ErrorKind::invalid_argument,
                    std::string(flag) + ": expected an integer or 2^k, got '" + std::string(text) + "'");
    };
    auto number = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) fail();
        return v;
    };
    if (auto caret = text.find('^'); caret != std::string_view::npos) {
        const std::uint64_t base = number(text.substr(0, caret)), exp = number(text.substr(caret + 1));
        std::uint64_t v = 1;
        for (std::uint64_t i = 0; i < exp; ++i) {
            if (base != 0 && v > UINT64_MAX / base) fail();
            v *= base;
        }
        return v;
    }
    return number(text);
}

// "a:b:xF" (geometric ladder from a up to b), or a comma list.
std::vector<std::uint64_t> parse_sizes(const std::string& text)
{
    std::vector<std::uint64_t> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3 || parts[2].empty() || parts[2][0] != 'x')
            throw Error(ErrorKind::invalid_argument, "--sizes: expected start:stop:xFACTOR, got '" + text + "'");
        const std::uint64_t start = parse_count(parts[0], "--sizes"), stop = parse_count(parts[1], "--sizes");
        const std::uint64_t factor = parse_count(parts[2].substr(1), "--sizes");
        if (start < 1 || factor < 2) throw Error(ErrorKind::invalid_argument, "--sizes: need start >= 1 and factor >= 2");
        for (std::uint64_t n = start; n <= stop; n *= factor) {
            out.push_back(n);
            if (n > UINT64_MAX / factor) break;
        }
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_count(p, "--sizes"));
    return out;
}

std::string fmt(double x, int precision = 4)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(precision);
    s << x;
    return s.str();
}

// Machine flags shared by the subcommands; kept as text so 2^k works.
struct MachineFlags {
    std::string K = "2^9";
    std::string P = "2^12";
    std::string a = "1";
    std::string cache = "2^22";

    void attach(CLI::App& cmd, bool cache_flag = true)
    {
        cmd.add_option("--K", K, "translation tree fan-out")->capture_default_str();
        cmd.add_option("--P", P, "page size in addressable units")->capture_default_str();
        cmd.add_option("--a", a, "item size in addressable units")->capture_default_str();
        if (cache_flag) cmd.add_option("--cache", cache, "cache size in addressable units")->capture_default_str();
    }
    std::uint64_t k() const { return parse_count(K, "--K"); }
    std::uint64_t p() const { return parse_count(P, "--P"); }
    std::uint64_t item() const { return parse_count(a, "--a"); }
    std::uint64_t units() const { return parse_count(cache, "--cache"); }
};

fs::path default_output(const std::string& name)
{
    if (const char* dir = std::getenv("VATSIM_OUTPUT_DIR"); dir && *dir) return fs::path(dir) / name;
    return fs::path(name);
}

std::ofstream open_output(const fs::path& path, bool force)
{
    if (fs::exists(path) && !force)
        throw Error(ErrorKind::io, "refusing to overwrite '" + path.string() + "' (use --force)");
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
    return out;
}

// ------------------------------------------------------------------ run

struct RunArgs {
    MachineFlags machine;
    std::string workload, trace_file, n = "0", mode = "both", policy = "lru", layout = "unified";
    std::string data_pages = "0", node_pages = "0", queries = "0";
    std::uint64_t seed = 1;
    bool a_given = false;
};

int cmd_run(const RunArgs& args)
{
    AccessTrace trace;
    const std::uint64_t a = args.machine.item();
    if (!args.trace_file.empty()) {
        trace = read_trace_file(args.trace_file);
        if (args.a_given && trace.item_size != a)
            throw Error(ErrorKind::invalid_config, "--a " + args.machine.a + " disagrees with the trace header a="
                                                       + std::to_string(trace.item_size));
    } else {
        WorkloadSpec spec;
        spec.kind = parse_workload(args.workload);
        spec.n = parse_count(args.n, "--n");
        spec.a = a;
        spec.seed = args.seed;
        spec.queries = parse_count(args.queries, "--queries");
        spec.merge_M = args.machine.units() / a;
        spec.merge_B = args.machine.p() / a;
        trace = generate(spec);
    }
    const std::uint64_t item = trace.item_size;
    if (trace.extent == 0) throw Error(ErrorKind::invalid_config, "trace has an empty extent");
    const MachineConfig cfg =
        make_machine(args.machine.k(), args.machine.p(), item, trace.extent, args.machine.units());
    const Policy policy = parse_policy(args.policy);

    VatLayout layout = VatLayout::unified();
    if (args.layout == "partitioned") {
        std::size_t data = parse_count(args.data_pages, "--data-pages");
        std::size_t nodes = parse_count(args.node_pages, "--node-pages");
        // Default split follows the simulation: a quarter of the cache for data.
        if (data == 0) data = std::max<std::size_t>(1, cfg.cache_pages() / 4);
        if (nodes == 0) nodes = cfg.cache_pages() > data ? cfg.cache_pages() - data : 0;
        layout = VatLayout::partitioned(data, nodes);
    } else if (args.layout != "unified") {
        throw Error(ErrorKind::invalid_argument, "--layout: expected unified or partitioned");
    }

    std::cout << "d=" << cfg.d << " K=" << cfg.K << " P=" << cfg.P << " a=" << cfg.a << " cache=" << cfg.cache_units
              << " accesses=" << trace.size() << '\n';
    std::cout << report_csv_header() << '\n';
    if (args.mode == "em" || args.mode == "both")
        std::cout << report_csv_row(run_em(trace, cfg.cache_items(), cfg.items_per_page(), policy)) << '\n';
    if (args.mode == "vat" || args.mode == "both")
        std::cout << report_csv_row(run_vat(trace, cfg, policy, layout)) << '\n';
    return 0;
}

// ------------------------------------------------------------------ gen

struct GenArgs {
    std::string workload, n, a = "1", output, queries = "0", merge_M = "2^16", merge_B = "2^6";
    std::uint64_t seed = 1;
    bool force = false;
};

int cmd_gen(const GenArgs& args)
{
    WorkloadSpec spec;
    spec.kind = parse_workload(args.workload);
    spec.n = parse_count(args.n, "--n");
    spec.a = parse_count(args.a, "--a");
    spec.seed = args.seed;
    spec.queries = parse_count(args.queries, "--queries");
    spec.merge_M = parse_count(args.merge_M, "--merge-M");
    spec.merge_B = parse_count(args.merge_B, "--merge-B");
    const auto trace = generate(spec);
    const fs::path path = args.output.empty() ? default_output(std::string(to_string(spec.kind)) + ".trace")
                                              : fs::path(args.output);
    auto out = open_output(path, args.force);
    write_trace(out, trace);
    std::cerr << "wrote " << trace.size() << " accesses to " << path.string() << '\n';
    return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
    MachineFlags machine;
    std::string kinds, sizes = "16384:16777216:x4", output;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool force = false;
};

int cmd_sweep(const SweepArgs& args)
{
    std::vector<WorkloadKind> kinds;
    if (args.kinds.empty()) {
        kinds = timing_kinds();
    } else {
        std::stringstream ss(args.kinds);
        for (std::string k; std::getline(ss, k, ',');) kinds.push_back(parse_workload(k));
    }
    const auto sizes = parse_sizes(args.sizes);
    SweepConfig cfg;
    cfg.K = args.machine.k();
    cfg.P = args.machine.p();
    cfg.a = args.machine.item();
    cfg.cache_units = args.machine.units();
    cfg.seed = args.seed;
    cfg.jobs = args.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : args.jobs;

    const fs::path path = args.output.empty() ? default_output("sweep.csv") : fs::path(args.output);
    if (fs::exists(path) && !args.force)
        throw Error(ErrorKind::io, "refusing to overwrite '" + path.string() + "' (use --force)");
    const auto rows = sweep(kinds, sizes, cfg);
    auto out = open_output(path, true);
    write_sweep_csv(out, rows);
    std::cerr << "wrote " << rows.size() << " rows to " << path.string() << '\n';
    return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
    MachineFlags machine{"16", "512", "4", ""};
    std::string n;
    std::uint64_t seed = 1;
    bool quick = false;
};

struct Verdicts {
    int failed = 0;

    void line(const std::string& what, bool ok, const std::string& measured, const std::string& bound)
    {
        std::cout << what << ": " << (ok ? "PASS" : "FAIL") << " (measured " << measured << ", bound " << bound << ")\n";
        if (!ok) ++failed;
    }
    void skip(const std::string& what, const std::string& why) { std::cout << what << ": SKIP (" << why << ")\n"; }
};

std::uint64_t tall_cache_units(const TallnessConstraint& g, std::uint64_t P, std::uint64_t a, std::uint32_t d)
{
    std::uint64_t units = P;
    while (!tallness_check(g, static_cast<double>(units / a), static_cast<double>(P / a), d).ok) units *= 2;
    return units;
}

void verify_theorems(const VerifyArgs& args, WorkloadKind kind, Verdicts& v)
{
    const std::uint64_t K = args.machine.k(), P = args.machine.p(), a = args.machine.item();
    const std::uint64_t n = args.n.empty() ? (args.quick ? 1u << 16 : 1u << 18) : parse_count(args.n, "--n");
    const auto g = kind == WorkloadKind::funnelsort ? TallnessConstraint::quadratic()
                                                    : TallnessConstraint::identity_multiple(5);
    const std::string tag = std::string(to_string(kind)) + " n=" + std::to_string(n);

    WorkloadSpec spec{kind, n, a, args.seed};
    const std::uint64_t extent = kind == WorkloadKind::funnelsort ? workload_extent(spec) : 2 * n * a;
    const std::uint32_t d = compute_depth(extent - 1, K, P);
    const std::uint64_t cache = args.machine.cache.empty() ? tall_cache_units(g, P, a, d) : args.machine.units();
    const auto tall = tallness_check(g, static_cast<double>(cache / a), static_cast<double>(P / a), d);
    if (!tall.ok || (cache / a / 4) < d * (P / a)) {
        v.skip("theorem 2/3 " + tag, tall.inequality + " violated");
        return;
    }
    if (kind == WorkloadKind::multiway_mergesort) {
        spec.merge_M = cache / (4 * a);
        spec.merge_B = d * P / a;
    }
    const auto trace = generate(spec);
    const auto cfg = make_machine(K, P, a, trace.extent, cache);
    const std::string dtag = tag + " d=" + std::to_string(cfg.d) + " cache=" + std::to_string(cache);

    const auto t3 = simulate_theorem3(trace, cfg, g);
    const auto& r = t3.construction;
    const double four_d = 4.0 * r.d;
    v.line("theorem 2 " + dtag + ": factor <= 4d", r.vat_faults <= 4 * std::uint64_t{r.d} * r.em_faults,
           fmt(r.factor, 3), fmt(four_d));
    v.line("theorem 2 " + dtag + ": per-block faults <= 4d", r.per_block_max_faults <= 4 * std::uint64_t{r.d},
           std::to_string(r.per_block_max_faults), fmt(four_d));
    v.line("theorem 2 " + dtag + ": translation store <= 3M/(4P)", r.node_occupancy_max <= r.node_store_capacity,
           std::to_string(r.node_occupancy_max), std::to_string(r.node_store_capacity));
    v.line("theorem 3 " + dtag + ": OPT faults <= construction", t3.opt_faults <= r.vat_faults,
           std::to_string(t3.opt_faults), std::to_string(r.vat_faults));
    v.line("theorem 3 " + dtag + ": LRU(2M) <= 2 OPT(M) + M/P",
           t3.lru_doubled_faults <= 2 * t3.opt_faults + t3.capacity_pages, std::to_string(t3.lru_doubled_faults),
           std::to_string(2 * t3.opt_faults + t3.capacity_pages));
}

void verify_invariants(const VerifyArgs& args, Verdicts& v)
{
    const int scale = args.quick ? 1 : 10;
    std::mt19937_64 rng(args.seed);

    // Internal nodes over d consecutive pages.
    {
        std::uint64_t worst = 0, bound_at_worst = 0, bad = 0;
        const std::uint64_t Ks[] = {2, 4, 16, 512};
        for (int i = 0; i < 1000 * scale; ++i) {
            MachineConfig cfg;
            cfg.K = Ks[rng() % 4];
            cfg.d = 1 + rng() % 6;
            cfg.P = 1;
            cfg.cache_units = 1;
            const std::uint64_t start = rng() % (page_count(cfg) - cfg.d + 1);
            std::vector<PageIndex> pages(cfg.d);
            for (std::uint32_t j = 0; j < cfg.d; ++j) pages[j] = start + j;
            const auto internal = internal_node_count(path_union(pages, cfg));
            const std::uint64_t bound = 2 * cfg.d + (cfg.d + cfg.K - 2) / (cfg.K - 1);
            if (internal > bound) ++bad;
            if (internal >= worst) worst = internal, bound_at_worst = bound;
        }
        v.line("internal nodes per block <= 2d + ceil(d/(K-1)) (" + std::to_string(1000 * scale) + " samples)",
               bad == 0, std::to_string(worst), std::to_string(bound_at_worst));
    }

    // Belady against a brute-force search over eviction choices.
    {
        std::uint64_t mismatches = 0;
        const int traces = 500 * scale;
        for (int i = 0; i < traces; ++i) {
            const std::size_t len = 1 + rng() % 10;
            const std::size_t cap = 1 + rng() % 3;
            std::vector<Key> t(len);
            for (auto& k : t) k = rng() % 4;
            // Forward DP over cache contents (bitmask of the 4 keys).
            std::vector<std::uint32_t> dp(16, 1000), next(16);
            dp[0] = 0;
            for (Key k : t) {
                std::fill(next.begin(), next.end(), 1000);
                const unsigned bit = 1u << k;
                for (unsigned m = 0; m < 16; ++m) {
                    if (dp[m] >= 1000) continue;
                    if (m & bit) next[m] = std::min(next[m], dp[m]);
                    else if (static_cast<std::size_t>(__builtin_popcount(m)) < cap)
                        next[m | bit] = std::min(next[m | bit], dp[m] + 1);
                    else
                        for (unsigned e = 0; e < 4; ++e)
                            if (m & (1u << e)) {
                                const unsigned nm = (m & ~(1u << e)) | bit;
                                next[nm] = std::min(next[nm], dp[m] + 1);
                            }
                }
                dp.swap(next);
            }
            if (fault_count(t, cap, Policy::opt) != *std::min_element(dp.begin(), dp.end())) ++mismatches;
        }
        v.line("OPT equals brute-force minimum (" + std::to_string(traces) + " traces)", mismatches == 0,
               std::to_string(mismatches) + " mismatches", "0");
    }

    // LRU inclusion: the smaller cache's contents are always a subset.
    {
        std::uint64_t breaks = 0;
        for (int i = 0; i < 10 * scale; ++i) {
            const std::size_t small = 1 + rng() % 8, large = small + 1 + rng() % 8;
            Cache x(small, Policy::lru), y(large, Policy::lru);
            for (int j = 0; j < 2000; ++j) {
                const Key k = rng() % 32;
                x.access(k);
                y.access(k);
                const auto rx = x.resident(), ry = y.resident();
                if (!std::includes(ry.begin(), ry.end(), rx.begin(), rx.end())) ++breaks;
            }
        }
        v.line("LRU inclusion (" + std::to_string(10 * scale) + " traces)", breaks == 0,
               std::to_string(breaks) + " violations", "0");
    }

    // LRU(k) <= k/(k-h+1) OPT(h) + k.
    {
        double worst = 0;
        std::uint64_t bad = 0;
        for (int i = 0; i < 30 * scale; ++i) {
            std::vector<Key> t(1 + rng() % 10000);
            const std::uint64_t pages = 1 + rng() % 64;
            for (auto& k : t) k = rng() % pages;
            const std::size_t h = 1 + rng() % 16, k = h + rng() % 16;
            const auto lru = fault_count(t, k, Policy::lru), opt = fault_count(t, h, Policy::opt);
            const double bound = static_cast<double>(k) / static_cast<double>(k - h + 1) * static_cast<double>(opt) + k;
            if (lru * (k - h + 1) > k * opt + k * (k - h + 1)) ++bad;
            worst = std::max(worst, static_cast<double>(lru) / bound);
        }
        v.line("LRU(k) <= k/(k-h+1) OPT(h) + k (" + std::to_string(30 * scale) + " traces)", bad == 0,
               "max ratio " + fmt(worst, 3), "1");
    }
}

int cmd_verify(const VerifyArgs& args)
{
    Verdicts v;
    verify_theorems(args, WorkloadKind::multiway_mergesort, v);
    verify_theorems(args, WorkloadKind::funnelsort, v);
    verify_invariants(args, v);
    std::cout << (v.failed == 0 ? "all checks passed" : std::to_string(v.failed) + " check(s) failed") << '\n';
    return v.failed == 0 ? 0 : 1;
}

// ------------------------------------------------------------------ bounds

struct BoundsArgs {
    std::string M = "2^20", B = "2^6", K = "2^9", n = "2^30", a = "1", d, tallness = "quadratic";
};

int cmd_bounds(const BoundsArgs& args)
{
    const std::uint64_t M = parse_count(args.M, "--M"), B = parse_count(args.B, "--B"), K = parse_count(args.K, "--K");
    const std::uint64_t n = parse_count(args.n, "--n"), a = parse_count(args.a, "--a");
    const std::uint64_t P = B * a;
    const std::uint32_t d = args.d.empty() ? compute_depth(2 * n * a - 1, K, P)
                                           : static_cast<std::uint32_t>(parse_count(args.d, "--d"));
    const auto g = parse_tallness(args.tallness);

    int errors = 0;
    auto row = [&](const std::string& name, const std::string& inputs, const std::function<std::string()>& eval) {
        std::string value;
        try {
            value = eval();
        } catch (const Error& e) {
            value = std::string("error: ") + e.what();
            ++errors;
        }
        std::cout << std::left << std::setw(22) << name << std::setw(44) << inputs << value << '\n';
    };
    const std::string mbn = "M=" + std::to_string(M) + " B=" + std::to_string(B) + " n=" + std::to_string(n);
    std::cout << std::left << std::setw(22) << "evaluator" << std::setw(44) << "inputs" << "value" << '\n';
    row("mergesort_em_bound", mbn, [&] { return fmt(mergesort_em_bound(M, B, n).to_double(), 12); });
    row("vat_upper_bound", mbn + " d=" + std::to_string(d), [&] {
        return fmt(vat_upper_bound(mergesort_em_bound, M, B, d, n, TallnessConstraint::identity_multiple(5)).to_double(),
                   12);
    });
    row("funnelsort_vat_bound", mbn + " K=" + std::to_string(K), [&] {
        const auto f = funnelsort_vat_bound(M * a, P, a, K, n);
        return fmt(f.value, 12) + " (log_K(2n/P)=" + fmt(f.depth) + ")";
    });
    row("tallness_check", "M=" + std::to_string(M) + " B=" + std::to_string(B) + " d=" + std::to_string(d), [&] {
        const auto t = tallness_check(g, static_cast<double>(M), static_cast<double>(B), d);
        return std::string(t.ok ? "pass" : "fail") + " margin " + fmt(t.margin, 12) + " (" + t.inequality + ")";
    });
    return errors == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    std::cout.imbue(std::locale::classic());
    CLI::App app{"Fault-count simulator for the EM and virtual-address-translation cost models"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "replay one workload or trace file");
    run.machine.attach(*run_cmd);
    auto* wl = run_cmd->add_option("--workload", run.workload, "workload kind");
    auto* tf = run_cmd->add_option("--trace", run.trace_file, "trace file");
    wl->excludes(tf);
    tf->excludes(wl);
    run_cmd->add_option("--n", run.n, "number of items");
    run_cmd->add_option("--mode", run.mode, "em, vat or both")->check(CLI::IsMember({"em", "vat", "both"}))->capture_default_str();
    run_cmd->add_option("--policy", run.policy, "lru, opt or fifo")->capture_default_str();
    run_cmd->add_option("--layout", run.layout, "unified or partitioned")->capture_default_str();
    run_cmd->add_option("--data-pages", run.data_pages, "partitioned: data cache pages");
    run_cmd->add_option("--node-pages", run.node_pages, "partitioned: translation cache pages");
    run_cmd->add_option("--queries", run.queries, "repeated binary search: number of searches (default n)");
    run_cmd->add_option("--seed", run.seed)->capture_default_str();

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "write a workload trace file");
    gen_cmd->add_option("--workload", gen.workload, "workload kind")->required();
    gen_cmd->add_option("--n", gen.n, "number of items")->required();
    gen_cmd->add_option("--a", gen.a, "item size")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
    gen_cmd->add_option("--queries", gen.queries);
    gen_cmd->add_option("--merge-M", gen.merge_M, "mergesort memory in items")->capture_default_str();
    gen_cmd->add_option("--merge-B", gen.merge_B, "mergesort block in items")->capture_default_str();
    gen_cmd->add_option("-o,--output", gen.output, "trace file (default $VATSIM_OUTPUT_DIR/<kind>.trace)");
    gen_cmd->add_flag("--force", gen.force, "overwrite an existing file");

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "normalized cost over a ladder of sizes, as CSV");
    sw.machine.attach(*sweep_cmd);
    sweep_cmd->add_option("--kinds", sw.kinds, "comma-separated workload kinds (default: the seven timing-study programs)");
    sweep_cmd->add_option("--sizes", sw.sizes, "start:stop:xFACTOR or a comma list")->capture_default_str();
    sweep_cmd->add_option("-o,--output", sw.output, "CSV file (default $VATSIM_OUTPUT_DIR/sweep.csv)");
    sweep_cmd->add_option("--seed", sw.seed)->capture_default_str();
    sweep_cmd->add_option("--jobs", sw.jobs, "parallel cells (0 = all cores)")->capture_default_str();
    sweep_cmd->add_flag("--force", sw.force, "overwrite an existing file");

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify", "check the translation-cost theorems and cache invariants");
    ver.machine.attach(*verify_cmd, false);
    verify_cmd->add_option("--cache", ver.machine.cache, "cache units (default: smallest tall-enough power of two)");
    verify_cmd->add_option("--n", ver.n, "items for the sorting traces");
    verify_cmd->add_option("--seed", ver.seed)->capture_default_str();
    verify_cmd->add_flag("--quick", ver.quick, "small sizes and fewer samples");

    BoundsArgs bnd;
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the closed-form bounds");
    bounds_cmd->add_option("--M", bnd.M, "memory in items")->capture_default_str();
    bounds_cmd->add_option("--B", bnd.B, "block (page) in items")->capture_default_str();
    bounds_cmd->add_option("--K", bnd.K)->capture_default_str();
    bounds_cmd->add_option("--n", bnd.n)->capture_default_str();
    bounds_cmd->add_option("--a", bnd.a)->capture_default_str();
    bounds_cmd->add_option("--d", bnd.d, "tree depth (default from 2n items)");
    bounds_cmd->add_option("--tallness", bnd.tallness, "quadratic, linear[:c] or power[:eps]")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (run.workload.empty() && run.trace_file.empty())
                throw CLI::RequiredError("--workload or --trace");
            if (!run.workload.empty() && run.n == "0") throw CLI::RequiredError("--n");
            run.a_given = run_cmd->count("--a") > 0;
            return cmd_run(run);
        }
        if (*gen_cmd) return cmd_gen(gen);
        if (*sweep_cmd) return cmd_sweep(sw);
        if (*verify_cmd) return cmd_verify(ver);
        if (*bounds_cmd) return cmd_bounds(bnd);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
