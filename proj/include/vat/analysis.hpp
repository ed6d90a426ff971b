#pragma once

// Bound calculators and the simulation harness for the EM-to-VAT theorems.

#include "vat/cost_engine.hpp"
#include "vat/workloads.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace vat {

/// Exact non-negative rational, always reduced. Arithmetic throws
/// Error(domain_error) on 64-bit overflow.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Ratio() = default;
    Ratio(std::uint64_t n) : num(n), den(1) {}  // NOLINT(google-explicit-constructor)
    Ratio(std::uint64_t n, std::uint64_t d);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Ratio&) const = default;
};

Ratio operator*(Ratio x, Ratio y);
Ratio operator/(Ratio x, Ratio y);
bool operator<(Ratio x, Ratio y);
bool operator<=(Ratio x, Ratio y);

/// Smallest integer p >= 0 with base^p >= x, i.e. ceil(log x / log base)
/// clamped at zero. Requires base > 1.
std::uint64_t ceil_log_ratio(Ratio x, Ratio base);

// ---------------------------------------------------------------- tallness

/// Tall-cache requirement M~ >= g(B~).
struct TallnessConstraint {
    enum class Kind { identity_multiple, quadratic, power };

    Kind kind = Kind::quadratic;
    double parameter = 0;  // c for g(x) = c x, epsilon for g(x) = x^(1 + epsilon)

    static TallnessConstraint quadratic() { return {Kind::quadratic, 0}; }
    static TallnessConstraint identity_multiple(double c) { return {Kind::identity_multiple, c}; }
    static TallnessConstraint power(double epsilon) { return {Kind::power, epsilon}; }

    double g(double x) const;
    bool satisfied(double M_tilde, double B_tilde) const { return M_tilde >= g(B_tilde); }
    std::string name() const;
};

TallnessConstraint parse_tallness(std::string_view name);

struct TallnessResult {
    bool ok = false;
    double margin = 0;       // M - 4 g(dB)
    std::string inequality;  // human-readable form of the evaluated predicate
};

/// Evaluates M >= 4 g(d B) (items).
TallnessResult tallness_check(const TallnessConstraint& g, double M, double B, double d);

// ---------------------------------------------------------------- closed forms

using EmBound = std::function<Ratio(Ratio M_tilde, Ratio B_tilde, std::uint64_t n)>;

/// n/B~ (1 + ceil(log(n/M~) / log(M~/B~))), the ceiling clamped at zero.
Ratio mergesort_em_bound(Ratio M_tilde, Ratio B_tilde, std::uint64_t n);

/// 4 d C(M/4, d B, n). Throws Error(tallness_violation) unless M >= 4 g(dB).
Ratio vat_upper_bound(const EmBound& em_bound, Ratio M, Ratio B, std::uint64_t d, std::uint64_t n,
                      const TallnessConstraint& g);

struct FunnelsortBound {
    double depth = 0;  // log_K(2n/P), floored at 1
    double value = 0;  // 4n/B * max(1, ceil(log(4n/M) / log(M/(4 d B))))
};

/// Funnel sort on a VAT machine, O-constant taken as 1. Throws
/// Error(tallness_violation) unless (B log_K(2n/P))^2 <= M/4.
FunnelsortBound funnelsort_vat_bound(std::uint64_t cache_units, std::uint64_t P, std::uint64_t a, std::uint64_t K,
                                     std::uint64_t n);

// ---------------------------------------------------------------- theorem harness

struct TheoremCheck {
    std::uint64_t em_faults = 0;
    std::uint64_t vat_faults = 0;
    double factor = 0;  // vat / em
    std::uint64_t per_block_max_faults = 0;
    std::uint64_t node_occupancy_max = 0;
    std::uint64_t node_store_capacity = 0;  // 3 M-bar / (4 P) pages
    std::uint64_t occupancy_violations = 0;  // loads where occupancy > 3 d * resident blocks
    std::uint64_t n_accesses = 0;
    std::uint32_t d = 0;
    std::uint64_t block_items = 0;  // B~ = d P / a
    std::uint64_t cache_items = 0;  // M~ = M-bar / (4 a)
    bool passed = false;
};

/// Replays a trace on the EM machine (M~ = M-bar/(4a), B~ = dP/a) and, on
/// every block fault, loads the block's d pages plus the internal nodes of
/// their translation paths into the VAT data and translation stores.
class Theorem2Harness {
public:
    Theorem2Harness(const MachineConfig& cfg, Policy policy = Policy::lru,
                    const TallnessConstraint& g = TallnessConstraint::quadratic());

    void access(Address addr);
    /// Block-granularity access with an OPT next-use annotation.
    void access_block(std::uint64_t block, std::uint64_t next_use);
    std::uint64_t block_of(Address addr) const { return addr / cfg_.P / cfg_.d; }

    TheoremCheck result() const;

private:
    void on_outcome(std::uint64_t block, const AccessOutcome& outcome);
    template <class F>
    void for_each_block_node(std::uint64_t block, F&& f) const;

    MachineConfig cfg_;
    NodeKeys keys_;
    std::uint64_t pages_;
    std::vector<std::uint64_t> k_pow_;
    Cache em_cache_;
    std::unordered_map<Key, std::uint32_t> node_refs_;
    TheoremCheck check_;
    std::uint64_t last_block_ = kNever;
};

TheoremCheck simulate_theorem2(const AccessTrace& trace, const MachineConfig& cfg, Policy policy = Policy::lru,
                               const TallnessConstraint& g = TallnessConstraint::quadratic());

/// Optimal replacement on the whole cache never does worse than the
/// constructed execution; LRU with twice the cache stays within
/// 2 OPT + capacity.
struct Theorem3Check {
    TheoremCheck construction;
    std::uint64_t opt_faults = 0;          // unified OPT, M-bar
    std::uint64_t lru_doubled_faults = 0;  // unified LRU, 2 M-bar
    std::uint64_t capacity_pages = 0;
    bool passed = false;
};

Theorem3Check simulate_theorem3(const AccessTrace& trace, const MachineConfig& cfg,
                                const TallnessConstraint& g = TallnessConstraint::quadratic());

// ---------------------------------------------------------------- sweeps

struct SweepConfig {
    std::uint64_t K = 16;
    std::uint64_t P = 512;
    std::uint64_t a = 4;
    std::uint64_t cache_units = 1u << 16;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct SweepRow {
    WorkloadKind kind{};
    std::uint64_t n = 0;
    double log2_n = 0;
    std::uint32_t d = 0;
    std::uint64_t n_accesses = 0;
    std::uint64_t em_faults = 0;
    std::uint64_t vat_faults = 0;
    double normalized_vat = 0;
    double normalized_em = 0;
};

/// One cell: the workload streamed through unified-LRU VAT replay and an EM
/// replay with M = cache_units/a, B = P/a.
SweepRow sweep_cell(WorkloadKind kind, std::uint64_t n, const SweepConfig& cfg);

/// Rows in (kind, n) order. Sizes must be ascending.
std::vector<SweepRow> sweep(std::span<const WorkloadKind> kinds, std::span<const std::uint64_t> sizes,
                            const SweepConfig& cfg);

/// Header kind,n,log2_n,d,em_faults,vat_faults,normalized_vat,normalized_em
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

/// Ordinary least squares of y on x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace vat
