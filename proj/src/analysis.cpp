#include "vat/analysis.hpp"

#include "vat/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace vat {

// ---------------------------------------------------------------- Ratio

namespace {

[[noreturn]] void overflow() { throw Error(ErrorKind::domain_error, "rational arithmetic overflows 64 bits"); }

std::uint64_t mul(std::uint64_t x, std::uint64_t y)
{
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(x, y, &r)) overflow();
    return r;
}

}  // namespace

Ratio::Ratio(std::uint64_t n, std::uint64_t d)
{
    if (d == 0) throw Error(ErrorKind::domain_error, "zero denominator");
    const std::uint64_t g = std::gcd(n, d);
    num = n / g;
    den = d / g;
}

Ratio operator*(Ratio x, Ratio y)
{
    // Cross-reduce first to keep intermediates small.
    const std::uint64_t g1 = std::gcd(x.num, y.den), g2 = std::gcd(y.num, x.den);
    return Ratio(mul(x.num / (g1 ? g1 : 1), y.num / (g2 ? g2 : 1)), mul(x.den / (g2 ? g2 : 1), y.den / (g1 ? g1 : 1)));
}

Ratio operator/(Ratio x, Ratio y)
{
    if (y.num == 0) throw Error(ErrorKind::domain_error, "division by zero");
    return x * Ratio(y.den, y.num);
}

bool operator<(Ratio x, Ratio y)
{
    return static_cast<unsigned __int128>(x.num) * y.den < static_cast<unsigned __int128>(y.num) * x.den;
}

bool operator<=(Ratio x, Ratio y) { return !(y < x); }

std::uint64_t ceil_log_ratio(Ratio x, Ratio base)
{
    if (!(Ratio(1) < base)) throw Error(ErrorKind::domain_error, "logarithm base must exceed 1");
    if (x <= Ratio(1)) return 0;
    // base^p >= x  <=>  bn^p * xd >= xn * bd^p
    using u128 = unsigned __int128;
    u128 lhs = x.den, rhs = x.num;
    constexpr u128 limit = static_cast<u128>(1) << 120;
    for (std::uint64_t p = 1;; ++p) {
        if (lhs > limit / base.num || rhs > limit / base.den) {
            const long double ratio = std::log(static_cast<long double>(x.num) / x.den)
                                      / std::log(static_cast<long double>(base.num) / base.den);
            return static_cast<std::uint64_t>(std::ceil(ratio - 1e-12L));
        }
        lhs *= base.num;
        rhs *= base.den;
        if (lhs >= rhs) return p;
    }
}

// ---------------------------------------------------------------- tallness

double TallnessConstraint::g(double x) const
{
    switch (kind) {
    case Kind::identity_multiple: return parameter * x;
    case Kind::quadratic: return x * x;
    case Kind::power: return std::pow(x, 1.0 + parameter);
    }
    return x;
}

std::string TallnessConstraint::name() const
{
    std::ostringstream out;
    switch (kind) {
    case Kind::identity_multiple: out << "g(x)=" << parameter << "x"; break;
    case Kind::quadratic: out << "g(x)=x^2"; break;
    case Kind::power: out << "g(x)=x^(1+" << parameter << ")"; break;
    }
    return out.str();
}

TallnessConstraint parse_tallness(std::string_view name)
{
    if (name == "quadratic") return TallnessConstraint::quadratic();
    if (name.rfind("linear", 0) == 0 || name.rfind("multiple", 0) == 0) {
        const auto colon = name.find(':');
        const double c = colon == std::string_view::npos ? 5.0 : std::stod(std::string(name.substr(colon + 1)));
        return TallnessConstraint::identity_multiple(c);
    }
    if (name.rfind("power", 0) == 0) {
        const auto colon = name.find(':');
        const double eps = colon == std::string_view::npos ? 0.5 : std::stod(std::string(name.substr(colon + 1)));
        return TallnessConstraint::power(eps);
    }
    throw Error(ErrorKind::invalid_argument, "unknown tallness function '" + std::string(name) + "'");
}

TallnessResult tallness_check(const TallnessConstraint& g, double M, double B, double d)
{
    TallnessResult r;
    const double required = 4.0 * g.g(d * B);
    r.ok = M >= required;
    r.margin = M - required;
    std::ostringstream text;
    text.imbue(std::locale::classic());
    text.precision(15);
    text << "M/4 >= g(dB): M=" << M << ", 4*g(" << d * B << ")=" << required << " [" << g.name() << "]";
    r.inequality = text.str();
    return r;
}

// ---------------------------------------------------------------- closed forms

Ratio mergesort_em_bound(Ratio M_tilde, Ratio B_tilde, std::uint64_t n)
{
    if (n < 1) throw Error(ErrorKind::domain_error, "mergesort bound needs n >= 1");
    if (B_tilde.num == 0) throw Error(ErrorKind::domain_error, "block size must be positive");
    if (M_tilde < B_tilde * Ratio(5))
        throw Error(ErrorKind::domain_error, "mergesort bound needs M~ >= 5 B~");
    const std::uint64_t passes = ceil_log_ratio(Ratio(n) / M_tilde, M_tilde / B_tilde);
    return Ratio(n) / B_tilde * Ratio(1 + passes);
}

Ratio vat_upper_bound(const EmBound& em_bound, Ratio M, Ratio B, std::uint64_t d, std::uint64_t n,
                      const TallnessConstraint& g)
{
    if (d < 1) throw Error(ErrorKind::domain_error, "depth must be >= 1");
    const auto tall = tallness_check(g, M.to_double(), B.to_double(), static_cast<double>(d));
    if (!tall.ok) throw Error(ErrorKind::tallness_violation, "violated: " + tall.inequality);
    return Ratio(4 * d) * em_bound(M / Ratio(4), Ratio(d) * B, n);
}

FunnelsortBound funnelsort_vat_bound(std::uint64_t cache_units, std::uint64_t P, std::uint64_t a, std::uint64_t K,
                                     std::uint64_t n)
{
    if (a < 1 || P < a || K < 2 || n < 1 || cache_units < 1)
        throw Error(ErrorKind::domain_error, "funnelsort bound needs a >= 1, P >= a, K >= 2, n >= 1");
    const long double M = static_cast<long double>(cache_units) / a;
    const long double B = static_cast<long double>(P) / a;
    const long double depth =
        std::max(1.0L, std::log(2.0L * n / static_cast<long double>(P)) / std::log(static_cast<long double>(K)));
    if ((B * depth) * (B * depth) > M / 4) {
        std::ostringstream text;
        text.imbue(std::locale::classic());
        text.precision(15);
        text << "violated: (B log_K(2n/P))^2 <= M/4 with B=" << static_cast<double>(B) << ", log_K(2n/P)="
             << static_cast<double>(depth) << ", M/4=" << static_cast<double>(M / 4);
        throw Error(ErrorKind::tallness_violation, text.str());
    }
    const long double inner = M / (4 * depth * B);
    if (inner <= 1) throw Error(ErrorKind::domain_error, "M/(4dB) must exceed 1");
    const long double passes = std::ceil(std::log(4.0L * n / M) / std::log(inner));
    FunnelsortBound bound;
    bound.depth = static_cast<double>(depth);
    bound.value = static_cast<double>(4.0L * n / B * std::max(1.0L, passes));
    return bound;
}

// ---------------------------------------------------------------- theorem harness

namespace {

std::size_t em_block_slots(const MachineConfig& cfg, const TallnessConstraint& g)
{
    validate(cfg);
    const double M = static_cast<double>(cfg.cache_items());
    const double B = static_cast<double>(cfg.items_per_page());
    const auto tall = tallness_check(g, M, B, cfg.d);
    if (!tall.ok) throw Error(ErrorKind::tallness_violation, "violated: " + tall.inequality);
    const std::uint64_t slots = (cfg.cache_items() / 4) / (cfg.d * cfg.items_per_page());
    if (slots < 1) throw Error(ErrorKind::tallness_violation, "EM cache M~ = M/4 holds no block of dB items");
    return slots;
}

}  // namespace

Theorem2Harness::Theorem2Harness(const MachineConfig& cfg, Policy policy, const TallnessConstraint& g)
    : cfg_(cfg), keys_((validate(cfg), cfg)), pages_(page_count(cfg)), em_cache_(em_block_slots(cfg, g), policy)
{
    k_pow_.resize(cfg.d + 1);
    k_pow_[0] = 1;
    for (std::uint32_t l = 1; l <= cfg.d; ++l) k_pow_[l] = k_pow_[l - 1] * cfg.K;
    check_.d = cfg.d;
    check_.block_items = cfg.d * cfg.items_per_page();
    check_.cache_items = cfg.cache_items() / 4;
    check_.node_store_capacity = 3 * cfg.cache_pages() / 4;
}

// Internal (non-root, layer >= 1) nodes on the paths to the block's pages.
// The pages are consecutive, so each layer contributes a contiguous range.
template <class F>
void Theorem2Harness::for_each_block_node(std::uint64_t block, F&& f) const
{
    const std::uint64_t first = block * cfg_.d;
    const std::uint64_t last = std::min(pages_, first + cfg_.d) - 1;
    for (std::uint32_t layer = 1; layer < cfg_.d; ++layer)
        for (std::uint64_t i = first / k_pow_[layer]; i <= last / k_pow_[layer]; ++i) f(keys_.key({layer, i}));
}

void Theorem2Harness::on_outcome(std::uint64_t block, const AccessOutcome& outcome)
{
    if (outcome.hit) return;
    if (outcome.evicted) {
        for_each_block_node(*outcome.evicted, [&](Key key) {
            auto it = node_refs_.find(key);
            if (--it->second == 0) node_refs_.erase(it);
        });
    }
    const std::uint64_t first = block * cfg_.d;
    if (first >= pages_)
        throw Error(ErrorKind::address_overflow, "block " + std::to_string(block) + " outside the translation tree");
    std::uint64_t faults = std::min(pages_, first + cfg_.d) - first;
    for_each_block_node(block, [&](Key key) {
        if (node_refs_[key]++ == 0) ++faults;
    });
    check_.vat_faults += faults;
    check_.per_block_max_faults = std::max(check_.per_block_max_faults, faults);
    const std::uint64_t occupancy = node_refs_.size();
    check_.node_occupancy_max = std::max<std::uint64_t>(check_.node_occupancy_max, occupancy);
    if (occupancy > 3 * std::uint64_t{cfg_.d} * em_cache_.size()) ++check_.occupancy_violations;
}

void Theorem2Harness::access(Address addr)
{
    ++check_.n_accesses;
    const std::uint64_t block = block_of(addr);
    if (block == last_block_) return;
    last_block_ = block;
    on_outcome(block, em_cache_.access(block));
}

void Theorem2Harness::access_block(std::uint64_t block, std::uint64_t next_use)
{
    ++check_.n_accesses;
    on_outcome(block, em_cache_.access(block, next_use));
}

TheoremCheck Theorem2Harness::result() const
{
    TheoremCheck r = check_;
    r.em_faults = em_cache_.faults();
    r.factor = r.em_faults == 0 ? 0.0 : static_cast<double>(r.vat_faults) / static_cast<double>(r.em_faults);
    const std::uint64_t four_d = 4 * std::uint64_t{r.d};
    r.passed = r.vat_faults <= four_d * r.em_faults && r.per_block_max_faults <= four_d
               && r.node_occupancy_max <= r.node_store_capacity && r.occupancy_violations == 0;
    return r;
}

TheoremCheck simulate_theorem2(const AccessTrace& trace, const MachineConfig& cfg, Policy policy,
                               const TallnessConstraint& g)
{
    if (trace.extent > address_space(cfg))
        throw Error(ErrorKind::address_overflow, "trace extent exceeds the address space K^d*P");
    Theorem2Harness harness(cfg, policy, g);
    if (policy != Policy::opt) {
        for (Address addr : trace.addresses) harness.access(addr);
        return harness.result();
    }
    std::vector<Key> blocks;
    blocks.reserve(trace.size());
    for (Address addr : trace.addresses) blocks.push_back(harness.block_of(addr));
    const auto next = opt_annotate(blocks);
    for (std::size_t i = 0; i < blocks.size(); ++i) harness.access_block(blocks[i], next[i]);
    return harness.result();
}

Theorem3Check simulate_theorem3(const AccessTrace& trace, const MachineConfig& cfg, const TallnessConstraint& g)
{
    Theorem3Check r;
    r.construction = simulate_theorem2(trace, cfg, Policy::lru, g);
    r.capacity_pages = cfg.cache_pages();
    r.opt_faults = run_vat(trace, cfg, Policy::opt).total_faults;
    MachineConfig doubled = cfg;
    doubled.cache_units *= 2;
    r.lru_doubled_faults = run_vat(trace, doubled, Policy::lru).total_faults;
    const std::uint64_t four_d = 4 * std::uint64_t{cfg.d};
    r.passed = r.construction.passed && r.opt_faults <= r.construction.vat_faults
               && r.opt_faults <= four_d * r.construction.em_faults
               && r.lru_doubled_faults <= 2 * r.opt_faults + r.capacity_pages;
    return r;
}

// ---------------------------------------------------------------- sweeps

SweepRow sweep_cell(WorkloadKind kind, std::uint64_t n, const SweepConfig& cfg)
{
    WorkloadSpec spec;
    spec.kind = kind;
    spec.n = n;
    spec.a = cfg.a;
    spec.seed = cfg.seed;
    spec.merge_M = cfg.cache_units / cfg.a;
    spec.merge_B = cfg.P / cfg.a;
    const std::uint64_t extent = workload_extent(spec);
    const MachineConfig machine = make_machine(cfg.K, cfg.P, cfg.a, extent, cfg.cache_units);

    VatReplayer vat(machine, Policy::lru);
    EmReplayer em(machine.cache_items(), machine.items_per_page(), cfg.a, Policy::lru, extent);
    stream_workload(spec, [&](Address addr) {
        vat.access(addr);
        em.access(addr);
    });

    const FaultReport vr = vat.report(), er = em.report();
    SweepRow row;
    row.kind = kind;
    row.n = n;
    row.log2_n = std::log2(static_cast<double>(n));
    row.d = machine.d;
    row.n_accesses = vr.n_accesses;
    row.em_faults = er.total_faults;
    row.vat_faults = vr.total_faults;
    row.normalized_vat = vr.n_accesses ? normalized_cost(vr) : 0.0;
    row.normalized_em = er.n_accesses ? normalized_cost(er) : 0.0;
    return row;
}

std::vector<SweepRow> sweep(std::span<const WorkloadKind> kinds, std::span<const std::uint64_t> sizes,
                            const SweepConfig& cfg)
{
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw Error(ErrorKind::invalid_argument, "sweep sizes must be ascending");
    struct Cell {
        WorkloadKind kind;
        std::uint64_t n;
    };
    std::vector<Cell> cells;
    for (auto kind : kinds)
        for (auto n : sizes) cells.push_back({kind, n});

    std::vector<SweepRow> rows(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
            try {
                rows[i] = sweep_cell(cells[i].kind, cells[i].n, cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(cells.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            throw Error(e.kind(), "sweep cell (" + std::string(to_string(cells[i].kind)) + ", n="
                                      + std::to_string(cells[i].n) + "): " + e.what());
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows)
{
    out << "kind,n,log2_n,d,em_faults,vat_faults,normalized_vat,normalized_em\n";
    std::ostringstream line;
    line.imbue(std::locale::classic());
    line.precision(10);
    for (const auto& r : rows) {
        line.str("");
        line << to_string(r.kind) << ',' << r.n << ',' << r.log2_n << ',' << r.d << ',' << r.em_faults << ','
             << r.vat_faults << ',' << r.normalized_vat << ',' << r.normalized_em << '\n';
        out << line.str();
    }
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorKind::invalid_argument, "linear fit needs at least two paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw Error(ErrorKind::invalid_argument, "linear fit needs distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace vat
