#include "vat/address_model.hpp"

#include "vat/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace vat {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::address_overflow: return "address-space-overflow";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::policy_misuse: return "policy-misuse";
    case ErrorKind::cache_too_small: return "cache-too-small";
    case ErrorKind::tallness_violation: return "tallness-violation";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::trace_format: return "trace-format";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

std::uint64_t checked_pow(std::uint64_t base, std::uint32_t exponent)
{
    std::uint64_t result = 1;
    for (std::uint32_t i = 0; i < exponent; ++i) {
        if (__builtin_mul_overflow(result, base, &result))
            throw Error(ErrorKind::address_overflow,
                        std::to_string(base) + "^" + std::to_string(exponent) + " overflows 64 bits");
    }
    return result;
}

void validate(const MachineConfig& cfg)
{
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_config, msg); };
    if (cfg.K < 2) fail("K must be >= 2");
    if (cfg.P < 2) fail("P must be >= 2");
    if (cfg.a < 1 || cfg.a > cfg.P) fail("item size a must satisfy 1 <= a <= P");
    if (cfg.P % cfg.a != 0) fail("item size a must divide P");
    if (cfg.d < 1) fail("depth d must be >= 1");
    if (cfg.cache_units == 0 || cfg.cache_units % cfg.P != 0)
        fail("cache size must be a positive multiple of P");
    std::uint64_t space = 0;
    try {
        space = checked_pow(cfg.K, cfg.d);
    } catch (const Error&) {
        fail("K^d overflows 64 bits");
    }
    if (__builtin_mul_overflow(space, cfg.P, &space)) fail("K^d * P overflows 64 bits");
}

std::uint32_t compute_depth(Address last_used_address, std::uint64_t K, std::uint64_t P)
{
    if (K < 2) throw Error(ErrorKind::invalid_argument, "K must be >= 2");
    if (P < 1) throw Error(ErrorKind::invalid_argument, "P must be >= 1");
    const std::uint64_t pages = last_used_address / P + 1;
    std::uint32_t d = 1;
    std::uint64_t reach = K;
    while (reach < pages) {
        if (__builtin_mul_overflow(reach, K, &reach)) reach = std::numeric_limits<std::uint64_t>::max();
        ++d;
    }
    return d;
}

MachineConfig make_machine(std::uint64_t K, std::uint64_t P, std::uint64_t a,
                           std::uint64_t extent_units, std::uint64_t cache_units)
{
    MachineConfig cfg;
    cfg.K = K;
    cfg.P = P;
    cfg.a = a;
    cfg.cache_units = cache_units;
    cfg.d = compute_depth(extent_units == 0 ? 0 : extent_units - 1, K, P < 1 ? 1 : P);
    validate(cfg);
    return cfg;
}

std::uint64_t page_count(const MachineConfig& cfg) { return checked_pow(cfg.K, cfg.d); }

std::uint64_t address_space(const MachineConfig& cfg)
{
    std::uint64_t space = page_count(cfg);
    if (__builtin_mul_overflow(space, cfg.P, &space))
        throw Error(ErrorKind::address_overflow, "K^d * P overflows 64 bits");
    return space;
}

DecomposedAddress decompose(Address addr, const MachineConfig& cfg)
{
    if (addr >= address_space(cfg))
        throw Error(ErrorKind::address_overflow,
                    "address " + std::to_string(addr) + " outside the address space of "
                        + std::to_string(address_space(cfg)) + " units");
    DecomposedAddress dec;
    dec.offset = addr % cfg.P;
    dec.digits.assign(cfg.d, 0);
    std::uint64_t index = addr / cfg.P;
    for (std::uint32_t i = cfg.d; i-- > 0;) {
        dec.digits[i] = index % cfg.K;
        index /= cfg.K;
    }
    return dec;
}

Address recompose(const DecomposedAddress& dec, const MachineConfig& cfg)
{
    if (dec.digits.size() != cfg.d)
        throw Error(ErrorKind::invalid_argument, "expected " + std::to_string(cfg.d) + " digits");
    if (dec.offset >= cfg.P) throw Error(ErrorKind::invalid_argument, "offset must be < P");
    std::uint64_t index = 0;
    for (std::uint64_t digit : dec.digits) {
        if (digit >= cfg.K) throw Error(ErrorKind::invalid_argument, "digit must be < K");
        index = index * cfg.K + digit;
    }
    return index * cfg.P + dec.offset;
}

std::vector<TranslationNode> translation_path(PageIndex page, const MachineConfig& cfg)
{
    if (page >= page_count(cfg))
        throw Error(ErrorKind::address_overflow,
                    "page index " + std::to_string(page) + " outside the translation tree");
    std::vector<TranslationNode> path(cfg.d + 1);
    path[0] = {cfg.d, 0};
    // Node on layer l is page / K^l; walk upward and fill from the leaf end.
    std::uint64_t number = page;
    for (std::uint32_t layer = 0; layer < cfg.d; ++layer) {
        path[cfg.d - layer] = {layer, number};
        number /= cfg.K;
    }
    return path;
}

std::set<TranslationNode> path_union(std::span<const PageIndex> pages, const MachineConfig& cfg)
{
    std::set<TranslationNode> nodes;
    for (PageIndex page : pages) {
        auto path = translation_path(page, cfg);
        nodes.insert(path.begin() + 1, path.end());
    }
    return nodes;
}

std::size_t internal_node_count(const std::set<TranslationNode>& nodes)
{
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TranslationNode& n) { return n.layer > 0; }));
}

NodeKeys::NodeKeys(const MachineConfig& cfg)
{
    offsets_.resize(cfg.d + 1);
    std::uint64_t next = 0;
    for (std::uint32_t layer = 0; layer <= cfg.d; ++layer) {
        offsets_[layer] = next;
        next += checked_pow(cfg.K, cfg.d - layer);
    }
}

std::uint32_t NodeKeys::layer_of(std::uint64_t key) const
{
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), key);
    return static_cast<std::uint32_t>(it - offsets_.begin() - 1);
}

TranslationNode NodeKeys::node(std::uint64_t key) const
{
    const std::uint32_t layer = layer_of(key);
    return {layer, key - offsets_[layer]};
}

}  // namespace vat
