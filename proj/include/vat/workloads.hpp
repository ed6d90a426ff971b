#pragma once

// Seeded trace generators. Every generator works on an array of n items of
// a units each (item j lives at address j * a); auxiliary storage such as
// merge targets or funnel buffers is allocated above the input array and is
// covered by workload_extent().

#include "vat/cost_engine.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace vat {

enum class WorkloadKind {
    sequential_scan,
    random_scan,
    permute,
    repeated_binary_search,
    heapify,
    heapsort,
    quicksort,
    multiway_mergesort,
    funnelsort,
};

std::string_view to_string(WorkloadKind kind);
WorkloadKind parse_workload(std::string_view name);

/// The seven programs of the translation-cost timing study.
std::vector<WorkloadKind> timing_kinds();

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::sequential_scan;
    std::uint64_t n = 1;
    std::uint64_t a = 1;
    std::uint64_t seed = 1;
    std::uint64_t queries = 0;  // repeated binary search; 0 means n
    std::uint64_t merge_M = 0;  // multiway mergesort memory, in items
    std::uint64_t merge_B = 0;  // multiway mergesort block, in items
};

using AccessSink = std::function<void(Address)>;

/// Addressable units spanned by everything the workload touches.
std::uint64_t workload_extent(const WorkloadSpec& spec);

/// Streams the workload's accesses into `sink`. Sorting workloads return the
/// final contents of the sorted array; other workloads return an empty vector.
std::vector<std::uint64_t> stream_workload(const WorkloadSpec& spec, const AccessSink& sink);

/// Materialises the full trace.
AccessTrace generate(const WorkloadSpec& spec);

AccessTrace gen_sequential_scan(std::uint64_t n, std::uint64_t a);
AccessTrace gen_random_scan(std::uint64_t n, std::uint64_t a, std::uint64_t seed);
AccessTrace gen_permute(std::uint64_t n, std::uint64_t a, std::uint64_t seed);
AccessTrace gen_repeated_binary_search(std::uint64_t n, std::uint64_t a, std::uint64_t seed, std::uint64_t queries);
AccessTrace gen_heapify(std::uint64_t n, std::uint64_t a, std::uint64_t seed = 0);
AccessTrace gen_heapsort(std::uint64_t n, std::uint64_t a, std::uint64_t seed);
AccessTrace gen_quicksort(std::uint64_t n, std::uint64_t a, std::uint64_t seed);
AccessTrace gen_multiway_mergesort(std::uint64_t n, std::uint64_t a, std::uint64_t M_items, std::uint64_t B_items,
                                   std::uint64_t seed = 1);

struct SortTrace {
    AccessTrace trace;
    std::vector<std::uint64_t> input;
    std::vector<std::uint64_t> output;
};

SortTrace gen_funnelsort(std::uint64_t n, std::uint64_t a, std::uint64_t seed = 1);

/// Pseudo-random sort keys for a seed.
std::vector<std::uint64_t> random_keys(std::uint64_t n, std::uint64_t seed);

// Traced reference algorithms. Each sorts (or heapifies) `values` in place
// and reports every array, buffer and output access in execution order.
void trace_heapify(std::span<std::uint64_t> values, std::uint64_t a, const AccessSink& sink);
void trace_heapsort(std::span<std::uint64_t> values, std::uint64_t a, const AccessSink& sink);
void trace_quicksort(std::span<std::uint64_t> values, std::uint64_t a, const AccessSink& sink);
void trace_multiway_mergesort(std::vector<std::uint64_t>& values, std::uint64_t a, std::uint64_t M_items,
                              std::uint64_t B_items, const AccessSink& sink);
void trace_funnelsort(std::vector<std::uint64_t>& values, std::uint64_t a, const AccessSink& sink);

/// Merge passes after run formation: ceil(log_{M/B}(n/M)), 0 when n <= M.
std::uint64_t mergesort_pass_count(std::uint64_t n, std::uint64_t M_items, std::uint64_t B_items);

/// Subproblems of at most this many items are sorted directly.
inline constexpr std::uint64_t kFunnelBaseCase = 32;

/// Items of funnel buffer space funnelsort needs for n inputs.
std::uint64_t funnelsort_buffer_items(std::uint64_t n);

}  // namespace vat
