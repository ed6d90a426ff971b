#pragma once

// Page-granularity cache with LRU, FIFO or offline-optimal (Belady)
// replacement. Keys are opaque 64-bit page identities; the VAT replay uses
// NodeKeys so translation nodes and data pages share one key space.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vat {

using Key = std::uint64_t;

enum class Policy { lru, opt, fifo };

std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view name);

/// Next-use annotation meaning "never referenced again".
inline constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

struct AccessOutcome {
    bool hit = false;
    std::optional<Key> evicted;
};

class Cache {
public:
    /// `key_space` > 0 promises every key is below it; small key spaces get
    /// an array index instead of a hash map.
    Cache(std::size_t capacity_pages, Policy policy, std::uint64_t key_space = 0);

    /// Online access. Throws Error(policy_misuse) under OPT.
    AccessOutcome access(Key key);

    /// Access carrying the position of the key's next reference (kNever if
    /// none). Required under OPT, ignored by LRU and FIFO.
    AccessOutcome access(Key key, std::uint64_t next_use);

    /// Makes `key` resident for good. Pinned keys do not count against the
    /// capacity and are never chosen as victims.
    void pin(Key key);

    /// Drops a resident, unpinned key without counting a fault.
    bool erase(Key key);

    bool contains(Key key) const { return find(key) >= 0; }
    bool is_pinned(Key key) const;

    std::size_t size() const { return unpinned_; }
    std::size_t capacity() const { return capacity_; }
    Policy policy() const { return policy_; }

    std::uint64_t accesses() const { return accesses_; }
    std::uint64_t faults() const { return faults_; }
    std::uint64_t hits() const { return accesses_ - faults_; }

    /// Every resident key (pinned included), ascending.
    std::vector<Key> resident() const;

private:
    struct Slot {
        Key key = 0;
        std::int32_t prev = -1;
        std::int32_t next = -1;
        std::uint64_t next_use = kNever;
        bool pinned = false;
    };

    struct OptOrder {
        // Furthest next use first; among never-used-again keys, smallest key first.
        bool operator()(const std::pair<std::uint64_t, Key>& x,
                        const std::pair<std::uint64_t, Key>& y) const
        {
            return x.first != y.first ? x.first > y.first : x.second < y.second;
        }
    };

    AccessOutcome touch(Key key, std::uint64_t next_use);
    std::int32_t find(Key key) const;
    void set_index(Key key, std::int32_t slot);
    void clear_index(Key key);
    std::int32_t allocate_slot();
    void link_back(std::int32_t s);
    void unlink(std::int32_t s);
    void detach(std::int32_t s);

    std::size_t capacity_;
    Policy policy_;
    std::vector<Slot> slots_;
    std::vector<std::int32_t> free_;
    std::vector<std::int32_t> dense_index_;
    std::unordered_map<Key, std::int32_t> sparse_index_;
    bool dense_ = false;
    std::int32_t head_ = -1;  // least recent (LRU) / oldest (FIFO)
    std::int32_t tail_ = -1;
    std::set<std::pair<std::uint64_t, Key>, OptOrder> opt_order_;
    std::size_t unpinned_ = 0;
    std::uint64_t accesses_ = 0;
    std::uint64_t faults_ = 0;
};

/// For each position, the index of the next occurrence of the same key, or
/// kNever. One backward pass.
std::vector<std::uint64_t> opt_annotate(std::span<const Key> trace);

/// Replays `trace` on a cold cache and returns the number of faults.
std::uint64_t fault_count(std::span<const Key> trace, std::size_t capacity, Policy policy);

}  // namespace vat
