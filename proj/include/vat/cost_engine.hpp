#pragma once

// Trace replay under the two cost models. EM charges one fault per block
// brought into a block cache. VAT walks the translation path of every access
// and charges faults for internal tree nodes as well as data pages.

#include "vat/address_model.hpp"
#include "vat/cache_sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vat {

struct AccessTrace {
    std::vector<Address> addresses;
    std::uint64_t extent = 0;     // every address is < extent (addressable units)
    std::uint64_t item_size = 1;  // a

    std::size_t size() const { return addresses.size(); }
};

enum class Mode { em, vat };
enum class Layout { unified, partitioned };

std::string_view to_string(Mode mode);
std::string_view to_string(Layout layout);

/// Cache organisation for VAT replay. Partitioned keeps internal nodes and
/// data pages in separate caches of the given page capacities.
struct VatLayout {
    Layout kind = Layout::unified;
    std::size_t data_pages = 0;
    std::size_t node_pages = 0;

    static VatLayout unified() { return {}; }
    static VatLayout partitioned(std::size_t data_pages, std::size_t node_pages)
    {
        return {Layout::partitioned, data_pages, node_pages};
    }
};

struct FaultReport {
    Mode mode = Mode::vat;
    Policy policy = Policy::lru;
    Layout layout = Layout::unified;
    std::uint64_t n_accesses = 0;
    std::uint64_t data_faults = 0;
    std::uint64_t translation_faults = 0;
    std::uint64_t total_faults = 0;
    std::uint64_t max_translation_occupancy = 0;
    std::uint32_t d = 0;
    MachineConfig params;  // EM runs echo M and B as cache_units and P (in units)
};

/// Streaming EM replay: addresses map to blocks floor((addr / a) / B).
class EmReplayer {
public:
    EmReplayer(std::uint64_t M_items, std::uint64_t B_items, std::uint64_t a, Policy policy,
               std::uint64_t extent = 0);

    void access(Address addr);
    /// Block-level access carrying an OPT next-use annotation.
    void access_block(std::uint64_t block, std::uint64_t next_use);
    FaultReport report() const;

    std::uint64_t block_of(Address addr) const { return addr / a_ / B_; }
    std::uint64_t faults() const { return cache_.faults(); }

private:
    std::uint64_t M_;
    std::uint64_t B_;
    std::uint64_t a_;
    Cache cache_;
    std::uint64_t n_accesses_ = 0;
    std::uint64_t last_block_ = kNever;
};

/// Streaming VAT replay over one MachineConfig. The root is pinned.
class VatReplayer {
public:
    VatReplayer(const MachineConfig& cfg, Policy policy, VatLayout layout = VatLayout::unified());

    void access(Address addr);
    FaultReport report() const;

    const NodeKeys& keys() const { return keys_; }

    /// Non-root node keys of the walk for `addr`, root side first.
    void walk_keys(Address addr, std::vector<Key>& out) const;

    /// Feeds one pre-expanded node key; used by the offline OPT replay.
    void visit(Key key, std::uint64_t next_use);
    void count_access() { ++n_accesses_; }

private:
    void visit_in(Cache& cache, Key key, std::uint32_t layer, std::uint64_t next_use, bool online);

    MachineConfig cfg_;
    Policy policy_;
    VatLayout layout_;
    NodeKeys keys_;
    std::vector<std::uint64_t> k_pow_;
    std::uint64_t pages_;
    Cache data_cache_;
    std::optional<Cache> node_cache_;
    std::uint64_t n_accesses_ = 0;
    std::uint64_t data_faults_ = 0;
    std::uint64_t translation_faults_ = 0;
    std::uint64_t internal_resident_ = 0;
    std::uint64_t max_internal_resident_ = 0;
    std::uint64_t last_page_ = kNever;
};

FaultReport run_em(const AccessTrace& trace, std::uint64_t M_items, std::uint64_t B_items, Policy policy);

FaultReport run_vat(const AccessTrace& trace, const MachineConfig& cfg, Policy policy,
                    VatLayout layout = VatLayout::unified());

/// Faults per access. Throws on an empty run.
double normalized_cost(const FaultReport& report);
double normalized_cost(const FaultReport& report, std::uint64_t n_accesses);

// Trace files: a header line "extent=<units> a=<units>" followed by one
// decimal address per line.
void write_trace(std::ostream& out, const AccessTrace& trace);
AccessTrace read_trace(std::istream& in);
AccessTrace read_trace_file(const std::string& path);

// FaultReport CSV, column order:
// mode,policy,layout,K,P,a,d,cache_units,n_accesses,data_faults,
// translation_faults,total_faults,max_translation_occupancy
std::string report_csv_header();
std::string report_csv_row(const FaultReport& report);

}  // namespace vat
