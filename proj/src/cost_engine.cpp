#include "vat/cost_engine.hpp"

#include "vat/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vat {

std::string_view to_string(Mode mode) { return mode == Mode::em ? "em" : "vat"; }
std::string_view to_string(Layout layout) { return layout == Layout::unified ? "unified" : "partitioned"; }

// ---------------------------------------------------------------- EM

EmReplayer::EmReplayer(std::uint64_t M_items, std::uint64_t B_items, std::uint64_t a, Policy policy,
                       std::uint64_t extent)
    : M_(M_items),
      B_(B_items),
      a_(a),
      cache_((B_items == 0 || M_items < B_items) ? 1 : M_items / B_items, policy,
             (extent > 0 && a > 0 && B_items > 0) ? extent / a / B_items + 1 : 0)
{
    if (B_items < 1) throw Error(ErrorKind::invalid_argument, "EM block size must be >= 1 item");
    if (M_items < B_items) throw Error(ErrorKind::invalid_argument, "EM cache must hold at least one block (M < B)");
    if (a < 1) throw Error(ErrorKind::invalid_argument, "item size must be >= 1");
}

void EmReplayer::access(Address addr)
{
    ++n_accesses_;
    const std::uint64_t block = block_of(addr);
    // A repeat of the previous block is a hit that leaves LRU/FIFO order unchanged.
    if (block == last_block_) return;
    last_block_ = block;
    cache_.access(block);
}

void EmReplayer::access_block(std::uint64_t block, std::uint64_t next_use)
{
    ++n_accesses_;
    cache_.access(block, next_use);
}

FaultReport EmReplayer::report() const
{
    FaultReport r;
    r.mode = Mode::em;
    r.policy = cache_.policy();
    r.n_accesses = n_accesses_;
    r.data_faults = cache_.faults();
    r.total_faults = r.data_faults;
    r.params.K = 0;
    r.params.d = 0;
    r.params.a = a_;
    r.params.P = B_ * a_;
    r.params.cache_units = M_ * a_;
    return r;
}

FaultReport run_em(const AccessTrace& trace, std::uint64_t M_items, std::uint64_t B_items, Policy policy)
{
    EmReplayer em(M_items, B_items, trace.item_size, policy, trace.extent);
    if (policy != Policy::opt) {
        for (Address addr : trace.addresses) em.access(addr);
        return em.report();
    }
    std::vector<Key> blocks;
    blocks.reserve(trace.size());
    for (Address addr : trace.addresses) blocks.push_back(em.block_of(addr));
    const auto next = opt_annotate(blocks);
    for (std::size_t i = 0; i < blocks.size(); ++i) em.access_block(blocks[i], next[i]);
    return em.report();
}

// ---------------------------------------------------------------- VAT

namespace {

std::size_t data_capacity(const MachineConfig& cfg, const VatLayout& layout)
{
    validate(cfg);
    const std::size_t pages = cfg.cache_pages();
    if (layout.kind == Layout::unified) {
        if (pages < cfg.d + 1)
            throw Error(ErrorKind::cache_too_small,
                        "cache of " + std::to_string(pages) + " pages cannot hold a translation path of depth "
                            + std::to_string(cfg.d) + " (need d + 1 pages)");
        return pages;
    }
    if (layout.data_pages < 1 || layout.node_pages < 1)
        throw Error(ErrorKind::cache_too_small, "partitioned layout needs at least one page per partition");
    if (layout.data_pages + layout.node_pages > pages)
        throw Error(ErrorKind::cache_too_small, "partition sizes exceed the cache (" + std::to_string(pages) + " pages)");
    return layout.data_pages;
}

}  // namespace

VatReplayer::VatReplayer(const MachineConfig& cfg, Policy policy, VatLayout layout)
    : cfg_(cfg),
      policy_(policy),
      layout_(layout),
      keys_((validate(cfg), cfg)),
      pages_(page_count(cfg)),
      data_cache_(data_capacity(cfg, layout), policy, keys_.size())
{
    k_pow_.resize(cfg.d + 1);
    k_pow_[0] = 1;
    for (std::uint32_t l = 1; l <= cfg.d; ++l) k_pow_[l] = k_pow_[l - 1] * cfg.K;
    if (layout.kind == Layout::partitioned) {
        node_cache_.emplace(layout.node_pages, policy, keys_.size());
        node_cache_->pin(keys_.root_key());
    } else {
        data_cache_.pin(keys_.root_key());
    }
}

void VatReplayer::walk_keys(Address addr, std::vector<Key>& out) const
{
    const std::uint64_t page = addr / cfg_.P;
    if (page >= pages_)
        throw Error(ErrorKind::address_overflow,
                    "address " + std::to_string(addr) + " outside the address space of depth " + std::to_string(cfg_.d));
    for (std::uint32_t layer = cfg_.d; layer-- > 0;)
        out.push_back(keys_.key({layer, page / k_pow_[layer]}));
}

void VatReplayer::visit_in(Cache& cache, Key key, std::uint32_t layer, std::uint64_t next_use, bool online)
{
    const AccessOutcome outcome = online ? cache.access(key) : cache.access(key, next_use);
    if (outcome.hit) return;
    if (layer == 0)
        ++data_faults_;
    else
        ++translation_faults_;
    if (layout_.kind == Layout::unified) {
        if (layer > 0) ++internal_resident_;
        if (outcome.evicted && keys_.layer_of(*outcome.evicted) > 0) --internal_resident_;
    } else {
        internal_resident_ = node_cache_->size();
    }
    if (internal_resident_ > max_internal_resident_) max_internal_resident_ = internal_resident_;
}

void VatReplayer::visit(Key key, std::uint64_t next_use)
{
    const std::uint32_t layer = keys_.layer_of(key);
    Cache& cache = (node_cache_ && layer > 0) ? *node_cache_ : data_cache_;
    visit_in(cache, key, layer, next_use, false);
}

void VatReplayer::access(Address addr)
{
    ++n_accesses_;
    const std::uint64_t page = addr / cfg_.P;
    if (page >= pages_)
        throw Error(ErrorKind::address_overflow,
                    "address " + std::to_string(addr) + " outside the address space of depth " + std::to_string(cfg_.d));
    // Repeating the previous page re-touches the same path in the same order:
    // all hits, and LRU/FIFO state is unchanged.
    if (page == last_page_) return;
    last_page_ = page;
    for (std::uint32_t layer = cfg_.d; layer-- > 0;) {
        const Key key = keys_.key({layer, page / k_pow_[layer]});
        Cache& cache = (node_cache_ && layer > 0) ? *node_cache_ : data_cache_;
        visit_in(cache, key, layer, kNever, true);
    }
}

FaultReport VatReplayer::report() const
{
    FaultReport r;
    r.mode = Mode::vat;
    r.policy = policy_;
    r.layout = layout_.kind;
    r.n_accesses = n_accesses_;
    r.data_faults = data_faults_;
    r.translation_faults = translation_faults_;
    r.total_faults = data_faults_ + translation_faults_;
    r.max_translation_occupancy = max_internal_resident_;
    r.d = cfg_.d;
    r.params = cfg_;
    return r;
}

FaultReport run_vat(const AccessTrace& trace, const MachineConfig& cfg, Policy policy, VatLayout layout)
{
    if (trace.extent > address_space(cfg))
        throw Error(ErrorKind::address_overflow,
                    "trace extent " + std::to_string(trace.extent) + " exceeds the address space K^d*P = "
                        + std::to_string(address_space(cfg)));
    VatReplayer vat(cfg, policy, layout);
    if (policy != Policy::opt) {
        for (Address addr : trace.addresses) vat.access(addr);
        return vat.report();
    }

    std::vector<Key> keys;
    keys.reserve(trace.size() * cfg.d);
    for (Address addr : trace.addresses) vat.walk_keys(addr, keys);

    std::vector<std::uint64_t> next;
    if (layout.kind == Layout::unified) {
        next = opt_annotate(keys);
    } else {
        // Each partition sees only its own keys; annotate the two streams separately.
        std::vector<Key> nodes, pages;
        std::vector<std::size_t> node_pos, page_pos;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (vat.keys().layer_of(keys[i]) > 0) {
                nodes.push_back(keys[i]);
                node_pos.push_back(i);
            } else {
                pages.push_back(keys[i]);
                page_pos.push_back(i);
            }
        }
        next.assign(keys.size(), kNever);
        const auto node_next = opt_annotate(nodes);
        const auto page_next = opt_annotate(pages);
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (node_next[j] != kNever) next[node_pos[j]] = node_next[j];
        for (std::size_t j = 0; j < pages.size(); ++j)
            if (page_next[j] != kNever) next[page_pos[j]] = page_next[j];
    }
    for (std::size_t i = 0; i < keys.size(); ++i) vat.visit(keys[i], next[i]);
    for (std::size_t i = 0; i < trace.size(); ++i) vat.count_access();
    return vat.report();
}

double normalized_cost(const FaultReport& report) { return normalized_cost(report, report.n_accesses); }

double normalized_cost(const FaultReport& report, std::uint64_t n_accesses)
{
    if (n_accesses == 0) throw Error(ErrorKind::invalid_argument, "normalized cost of an empty trace");
    return static_cast<double>(report.total_faults) / static_cast<double>(n_accesses);
}

// ---------------------------------------------------------------- I/O

void write_trace(std::ostream& out, const AccessTrace& trace)
{
    out << "extent=" << trace.extent << " a=" << trace.item_size << '\n';
    for (Address addr : trace.addresses) out << addr << '\n';
}

namespace {

bool parse_u64(std::string_view text, std::uint64_t& value)
{
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

AccessTrace read_trace(std::istream& in)
{
    AccessTrace trace;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::trace_format, "line 1: missing header 'extent=<units> a=<units>'");
    {
        std::istringstream header{std::string(trim(line))};
        std::string extent_field, a_field;
        header >> extent_field >> a_field;
        auto value_of = [](const std::string& field, std::string_view name, std::uint64_t& out) {
            return field.rfind(std::string(name) + "=", 0) == 0 && parse_u64(std::string_view(field).substr(name.size() + 1), out);
        };
        if (!value_of(extent_field, "extent", trace.extent) || !value_of(a_field, "a", trace.item_size)
            || trace.item_size == 0)
            throw Error(ErrorKind::trace_format, "line 1: malformed header '" + line + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        std::uint64_t addr = 0;
        if (!parse_u64(text, addr))
            throw Error(ErrorKind::trace_format, "line " + std::to_string(line_no) + ": not a decimal address '" + line + "'");
        if (addr >= trace.extent)
            throw Error(ErrorKind::address_overflow,
                        "line " + std::to_string(line_no) + ": address " + std::to_string(addr) + " >= extent "
                            + std::to_string(trace.extent));
        trace.addresses.push_back(addr);
    }
    return trace;
}

AccessTrace read_trace_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open trace file '" + path + "'");
    return read_trace(in);
}

std::string report_csv_header()
{
    return "mode,policy,layout,K,P,a,d,cache_units,n_accesses,data_faults,translation_faults,total_faults,"
           "max_translation_occupancy";
}

std::string report_csv_row(const FaultReport& r)
{
    std::ostringstream out;
    out << to_string(r.mode) << ',' << to_string(r.policy) << ','
        << (r.mode == Mode::em ? std::string_view("-") : to_string(r.layout)) << ',' << r.params.K << ','
        << r.params.P << ',' << r.params.a << ',' << r.d << ',' << r.params.cache_units << ',' << r.n_accesses << ','
        << r.data_faults << ',' << r.translation_faults << ',' << r.total_faults << ','
        << r.max_translation_occupancy;
    return out.str();
}

}  // namespace vat
