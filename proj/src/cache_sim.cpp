#include "vat/cache_sim.hpp"

#include "vat/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace vat {

namespace {

constexpr std::uint64_t kDenseIndexLimit = std::uint64_t{1} << 26;

}  // namespace

std::string_view to_string(Policy policy)
{
    switch (policy) {
    case Policy::lru: return "lru";
    case Policy::opt: return "opt";
    case Policy::fifo: return "fifo";
    }
    return "?";
}

Policy parse_policy(std::string_view name)
{
    if (name == "lru" || name == "LRU") return Policy::lru;
    if (name == "opt" || name == "OPT") return Policy::opt;
    if (name == "fifo" || name == "FIFO") return Policy::fifo;
    throw Error(ErrorKind::invalid_argument, "unknown policy '" + std::string(name) + "'");
}

Cache::Cache(std::size_t capacity_pages, Policy policy, std::uint64_t key_space)
    : capacity_(capacity_pages), policy_(policy)
{
    if (capacity_pages == 0) throw Error(ErrorKind::invalid_argument, "cache capacity must be >= 1");
    if (key_space > 0 && key_space <= kDenseIndexLimit) {
        dense_ = true;
        dense_index_.assign(key_space, -1);
    }
    slots_.reserve(std::min<std::size_t>(capacity_pages + 1, std::size_t{1} << 20));
}

std::int32_t Cache::find(Key key) const
{
    if (dense_) return key < dense_index_.size() ? dense_index_[key] : -1;
    auto it = sparse_index_.find(key);
    return it == sparse_index_.end() ? -1 : it->second;
}

void Cache::set_index(Key key, std::int32_t slot)
{
    if (dense_) {
        if (key >= dense_index_.size())
            throw Error(ErrorKind::invalid_argument, "key " + std::to_string(key) + " outside the declared key space");
        dense_index_[key] = slot;
    } else {
        sparse_index_[key] = slot;
    }
}

void Cache::clear_index(Key key)
{
    if (dense_)
        dense_index_[key] = -1;
    else
        sparse_index_.erase(key);
}

std::int32_t Cache::allocate_slot()
{
    if (!free_.empty()) {
        auto s = free_.back();
        free_.pop_back();
        return s;
    }
    slots_.emplace_back();
    return static_cast<std::int32_t>(slots_.size() - 1);
}

void Cache::link_back(std::int32_t s)
{
    slots_[s].prev = tail_;
    slots_[s].next = -1;
    if (tail_ >= 0)
        slots_[tail_].next = s;
    else
        head_ = s;
    tail_ = s;
}

void Cache::unlink(std::int32_t s)
{
    auto& slot = slots_[s];
    if (slot.prev >= 0)
        slots_[slot.prev].next = slot.next;
    else
        head_ = slot.next;
    if (slot.next >= 0)
        slots_[slot.next].prev = slot.prev;
    else
        tail_ = slot.prev;
    slot.prev = slot.next = -1;
}

// Removes an unpinned slot from the replacement order.
void Cache::detach(std::int32_t s)
{
    if (policy_ == Policy::opt)
        opt_order_.erase({slots_[s].next_use, slots_[s].key});
    else
        unlink(s);
}

AccessOutcome Cache::access(Key key)
{
    if (policy_ == Policy::opt)
        throw Error(ErrorKind::policy_misuse, "OPT replacement needs next-use annotations (see opt_annotate)");
    return touch(key, kNever);
}

AccessOutcome Cache::access(Key key, std::uint64_t next_use) { return touch(key, next_use); }

AccessOutcome Cache::touch(Key key, std::uint64_t next_use)
{
    ++accesses_;
    const std::int32_t s = find(key);
    if (s >= 0) {
        Slot& slot = slots_[s];
        if (slot.pinned) return {true, std::nullopt};
        switch (policy_) {
        case Policy::lru:
            if (s != tail_) {
                unlink(s);
                link_back(s);
            }
            break;
        case Policy::fifo: break;
        case Policy::opt:
            opt_order_.erase({slot.next_use, key});
            slot.next_use = next_use;
            opt_order_.insert({next_use, key});
            break;
        }
        return {true, std::nullopt};
    }

    ++faults_;
    AccessOutcome outcome;
    std::int32_t target = -1;
    if (unpinned_ >= capacity_) {
        if (policy_ == Policy::opt) {
            target = find(opt_order_.begin()->second);
        } else {
            target = head_;
        }
        Slot& victim = slots_[target];
        if (victim.pinned) throw std::logic_error("pinned key selected as eviction victim");
        detach(target);
        clear_index(victim.key);
        outcome.evicted = victim.key;
        --unpinned_;
    } else {
        target = allocate_slot();
    }

    Slot& slot = slots_[target];
    slot.key = key;
    slot.pinned = false;
    slot.next_use = next_use;
    set_index(key, target);
    if (policy_ == Policy::opt)
        opt_order_.insert({next_use, key});
    else
        link_back(target);
    ++unpinned_;
    return outcome;
}

void Cache::pin(Key key)
{
    std::int32_t s = find(key);
    if (s >= 0) {
        if (slots_[s].pinned) return;
        detach(s);
        --unpinned_;
    } else {
        s = allocate_slot();
        slots_[s].key = key;
        set_index(key, s);
    }
    slots_[s].pinned = true;
    slots_[s].prev = slots_[s].next = -1;
}

bool Cache::erase(Key key)
{
    const std::int32_t s = find(key);
    if (s < 0 || slots_[s].pinned) return false;
    detach(s);
    clear_index(key);
    free_.push_back(s);
    --unpinned_;
    return true;
}

bool Cache::is_pinned(Key key) const
{
    const std::int32_t s = find(key);
    return s >= 0 && slots_[s].pinned;
}

std::vector<Key> Cache::resident() const
{
    std::vector<Key> keys;
    if (dense_) {
        for (std::size_t k = 0; k < dense_index_.size(); ++k)
            if (dense_index_[k] >= 0) keys.push_back(k);
    } else {
        for (const auto& [k, s] : sparse_index_) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
    }
    return keys;
}

std::vector<std::uint64_t> opt_annotate(std::span<const Key> trace)
{
    std::vector<std::uint64_t> next(trace.size(), kNever);
    std::unordered_map<Key, std::uint64_t> seen;
    for (std::size_t i = trace.size(); i-- > 0;) {
        auto [it, inserted] = seen.try_emplace(trace[i], i);
        if (!inserted) {
            next[i] = it->second;
            it->second = i;
        }
    }
    return next;
}

std::uint64_t fault_count(std::span<const Key> trace, std::size_t capacity, Policy policy)
{
    Cache cache(capacity, policy);
    if (policy == Policy::opt) {
        const auto next = opt_annotate(trace);
        for (std::size_t i = 0; i < trace.size(); ++i) cache.access(trace[i], next[i]);
    } else {
        for (Key key : trace) cache.access(key);
    }
    return cache.faults();
}

}  // namespace vat
