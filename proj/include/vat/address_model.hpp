#pragma once

// Virtual-address geometry of the VAT machine: an address is a string of d
// base-K digits (the index) followed by an offset into a page of P units.
// Translating it walks a K-ary tree from the root (d, 0) down to the data
// page (0, index).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <vector>

namespace vat {

using Address = std::uint64_t;
using PageIndex = std::uint64_t;

struct MachineConfig {
    std::uint64_t K = 512;            // translation arity
    std::uint64_t P = 4096;           // page size in addressable units
    std::uint64_t a = 1;              // item size in addressable units
    std::uint32_t d = 1;              // translation depth
    std::uint64_t cache_units = 1u << 22;  // M-bar, in addressable units

    std::uint64_t items_per_page() const { return P / a; }    // B
    std::uint64_t cache_items() const { return cache_units / a; }  // M
    std::uint64_t cache_pages() const { return cache_units / P; }

    bool operator==(const MachineConfig&) const = default;
};

/// Throws Error(invalid_config) unless K >= 2, P >= 2, 1 <= a <= P with a | P,
/// d >= 1, cache_units a positive multiple of P, and K^d * P fits in 64 bits.
void validate(const MachineConfig& cfg);

/// Builds a config whose depth covers addresses [0, extent_units).
MachineConfig make_machine(std::uint64_t K, std::uint64_t P, std::uint64_t a,
                           std::uint64_t extent_units, std::uint64_t cache_units);

/// K^e, throwing Error(address_overflow) if it does not fit in 64 bits.
std::uint64_t checked_pow(std::uint64_t base, std::uint32_t exponent);

/// Number of leaves of the translation tree, K^d.
std::uint64_t page_count(const MachineConfig& cfg);

/// Size of the virtual address space, K^d * P.
std::uint64_t address_space(const MachineConfig& cfg);

/// Smallest d >= 1 with K^d * P > last_used_address.
std::uint32_t compute_depth(Address last_used_address, std::uint64_t K, std::uint64_t P);

struct TranslationNode {
    std::uint32_t layer = 0;
    std::uint64_t number = 0;

    bool is_data_page() const { return layer == 0; }

    auto operator<=>(const TranslationNode&) const = default;
};

struct DecomposedAddress {
    std::vector<std::uint64_t> digits;  // most significant first
    std::uint64_t offset = 0;

    bool operator==(const DecomposedAddress&) const = default;
};

DecomposedAddress decompose(Address addr, const MachineConfig& cfg);
Address recompose(const DecomposedAddress& dec, const MachineConfig& cfg);

inline PageIndex page_of(Address addr, const MachineConfig& cfg) { return addr / cfg.P; }

/// The d+1 nodes from the root (d, 0) down to the data page (0, page).
std::vector<TranslationNode> translation_path(PageIndex page, const MachineConfig& cfg);

/// Union of the non-root nodes on the translation paths of `pages`,
/// including the data pages themselves.
std::set<TranslationNode> path_union(std::span<const PageIndex> pages, const MachineConfig& cfg);

/// Number of internal (layer >= 1, non-root) nodes in a node set.
std::size_t internal_node_count(const std::set<TranslationNode>& nodes);

/// Dense numbering of every tree node, layer 0 first and the root last, so
/// caches can index residency by array instead of hashing.
class NodeKeys {
public:
    explicit NodeKeys(const MachineConfig& cfg);

    std::uint64_t key(TranslationNode node) const { return offsets_[node.layer] + node.number; }
    TranslationNode node(std::uint64_t key) const;
    std::uint32_t layer_of(std::uint64_t key) const;
    std::uint64_t root_key() const { return offsets_.back(); }
    std::uint64_t size() const { return offsets_.back() + 1; }

private:
    std::vector<std::uint64_t> offsets_;  // offsets_[l] = first key on layer l
};

}  // namespace vat

template <>
struct std::hash<vat::TranslationNode> {
    std::size_t operator()(const vat::TranslationNode& n) const noexcept
    {
        return std::hash<std::uint64_t>{}(n.number * 64 + n.layer);
    }
};
