#include "vat/workloads.hpp"
#include "vat/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace vat;

namespace {

std::vector<Address> collect(const std::function<void(const AccessSink&)>& run)
{
    std::vector<Address> out;
    run([&out](Address addr) { out.push_back(addr); });
    return out;
}

// Textbook heapsort written against an explicit access log. Reads of both
// children precede the parent write, and the displaced value is written last.
struct LoggedHeap {
    std::vector<std::uint64_t> v;
    std::uint64_t a;
    std::vector<Address> log;

    std::uint64_t get(std::uint64_t i)
    {
        log.push_back(i * a);
        return v[i];
    }
    void put(std::uint64_t i, std::uint64_t x)
    {
        log.push_back(i * a);
        v[i] = x;
    }
    void sink(std::uint64_t hole, std::uint64_t size, std::uint64_t x)
    {
        const std::uint64_t l = 2 * hole + 1, r = l + 1;
        if (l >= size) return put(hole, x);
        std::uint64_t best = l, bv = get(l);
        if (r < size) {
            const std::uint64_t rv = get(r);
            if (rv > bv) best = r, bv = rv;
        }
        if (bv <= x) return put(hole, x);
        put(hole, bv);
        sink(best, size, x);
    }
    void heapify()
    {
        const auto n = v.size();
        for (std::uint64_t i = n / 2; i > 0; --i) sink(i - 1, n, get(i - 1));
    }
    void sort()
    {
        heapify();
        for (std::uint64_t end = v.size() - 1; end >= 1; --end) {
            const std::uint64_t last = get(end);
            put(end, get(0));
            sink(0, end, last);
        }
    }
};

bool all_below(const AccessTrace& t)
{
    return std::all_of(t.addresses.begin(), t.addresses.end(), [&](Address x) { return x < t.extent; });
}

}  // namespace

TEST_CASE("workload names")
{
    CHECK(to_string(WorkloadKind::sequential_scan) == "sequential-scan");
    CHECK(parse_workload("sequential_scan") == WorkloadKind::sequential_scan);
    CHECK(parse_workload("repeated-binary-search") == WorkloadKind::repeated_binary_search);
    CHECK(parse_workload("mergesort") == WorkloadKind::multiway_mergesort);
    CHECK_THROWS_AS(parse_workload("bubblesort"), Error);
    CHECK(timing_kinds().size() == 7);
    for (auto k : timing_kinds()) CHECK(parse_workload(to_string(k)) == k);
}

TEST_CASE("sequential scan")
{
    const auto t = gen_sequential_scan(5, 4);
    CHECK(t.addresses == std::vector<Address>{0, 4, 8, 12, 16});
    CHECK(t.extent == 20);
    CHECK(gen_sequential_scan(1, 1).addresses == std::vector<Address>{0});
    CHECK_THROWS_AS(gen_sequential_scan(0, 1), Error);
    CHECK_THROWS_AS(gen_sequential_scan(4, 0), Error);
}

TEST_CASE("random scan")
{
    const auto t = gen_random_scan(1000, 3, 9);
    CHECK(t.size() == 1000);
    CHECK(all_below(t));
    CHECK(std::all_of(t.addresses.begin(), t.addresses.end(), [](Address x) { return x % 3 == 0; }));
    CHECK(t.addresses == gen_random_scan(1000, 3, 9).addresses);
    CHECK(t.addresses != gen_random_scan(1000, 3, 10).addresses);

    // Distinct pages touched against the coupon-collector expectation
    // pages (1 - (1 - 1/pages)^n), averaged over seeds.
    const std::uint64_t n = 1 << 14, P_items = 64, pages = n / P_items;
    const std::uint64_t draws = 2000;
    double mean = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto r = gen_random_scan(n, 1, 100 + s);
        std::set<std::uint64_t> seen;
        for (std::uint64_t i = 0; i < draws; ++i) seen.insert(r.addresses[i] / P_items);
        mean += static_cast<double>(seen.size()) / seeds;
    }
    const double expected = pages * (1 - std::pow(1 - 1.0 / pages, static_cast<double>(draws)));
    CHECK(mean == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("permute")
{
    const auto two = gen_permute(2, 5, 1);
    REQUIRE(two.size() == 2);
    CHECK(two.addresses[0] == 5);
    CHECK((two.addresses[1] == 0 || two.addresses[1] == 5));
    CHECK_THROWS_AS(gen_permute(1, 1, 1), Error);

    const auto t = gen_permute(500, 2, 4);
    CHECK(t.size() == 2 * 500 - 2);
    CHECK(all_below(t));
    for (std::size_t s = 0; s < t.size() / 2; ++s) {
        const std::uint64_t i = 499 - s;
        CHECK(t.addresses[2 * s] == i * 2);
        CHECK(t.addresses[2 * s + 1] <= i * 2);
    }
    CHECK(t.addresses == gen_permute(500, 2, 4).addresses);
}

TEST_CASE("repeated binary search")
{
    const auto one = gen_repeated_binary_search(1, 1, 1, 3);
    CHECK(one.addresses == std::vector<Address>{0, 0, 0});

    // Each search starts at the middle and makes at most ceil(log2(n+1)) probes.
    for (std::uint64_t n : {2, 3, 10, 1000, 4096}) {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            const auto t = gen_repeated_binary_search(n, 2, seed, 1);
            REQUIRE(!t.addresses.empty());
            CHECK(t.addresses.front() == n / 2 * 2);
            CHECK(t.size() <= static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n + 1)))));
        }
    }
    CHECK(generate({WorkloadKind::repeated_binary_search, 100, 1, 1, 0}).addresses
          == gen_repeated_binary_search(100, 1, 1, 100).addresses);
    CHECK_THROWS_AS(gen_repeated_binary_search(100, 1, 1, 0), Error);
}

TEST_CASE("heapify")
{
    CHECK(gen_heapify(1, 1).size() == 0);
    for (std::uint64_t n : {2, 3, 17, 1000}) {
        auto values = random_keys(n, 3);
        LoggedHeap ref{values, 4, {}};
        ref.heapify();
        const auto log = collect([&](const AccessSink& s) { trace_heapify(values, 4, s); });
        CHECK(log == ref.log);
        CHECK(std::is_heap(values.begin(), values.end()));
    }
}

TEST_CASE("heapsort matches an instrumented reference")
{
    for (std::uint64_t n : {1, 2, 3, 8, 64, 1024, 5000}) {
        auto values = random_keys(n, 7);
        LoggedHeap ref{values, 3, {}};
        if (n > 1) ref.sort();
        const auto log = collect([&](const AccessSink& s) { trace_heapsort(values, 3, s); });
        CHECK(log == ref.log);
        CHECK(std::is_sorted(values.begin(), values.end()));
    }
    const auto t = gen_heapsort(1 << 10, 2, 5);
    CHECK(all_below(t));
}

TEST_CASE("quicksort")
{
    for (std::uint64_t n : {1, 2, 15, 16, 17, 1000, 1 << 14}) {
        auto values = random_keys(n, 11);
        std::size_t len = 0;
        trace_quicksort(values, 1, [&](Address x) {
            CHECK(x < n);
            ++len;
        });
        CHECK(std::is_sorted(values.begin(), values.end()));
    }

    // Sorted, reversed and constant inputs stay n log n.
    const std::uint64_t n = 1 << 14;
    const double nlogn = n * std::log2(static_cast<double>(n));
    std::vector<std::vector<std::uint64_t>> inputs(3, std::vector<std::uint64_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        inputs[0][i] = i;
        inputs[1][i] = n - i;
        inputs[2][i] = 42;
    }
    for (auto& in : inputs) {
        std::size_t len = 0;
        trace_quicksort(in, 1, [&](Address) { ++len; });
        CHECK(std::is_sorted(in.begin(), in.end()));
        CHECK(static_cast<double>(len) <= 4 * nlogn);
    }
}

TEST_CASE("multiway mergesort")
{
    // ceil(log_{M/B}(n/M)) by repeated multiplication.
    auto passes = [](std::uint64_t n, std::uint64_t M, std::uint64_t B) {
        std::uint64_t p = 0, reach = M;
        while (reach < n) reach *= M / B, ++p;
        return p;
    };
    CHECK(passes(256, 16, 4) == 2);
    // M = 4B is below the M >= 5B requirement, so the library refuses it.
    CHECK_THROWS_AS(mergesort_pass_count(256, 16, 4), Error);
    CHECK_THROWS_AS(gen_multiway_mergesort(256, 1, 16, 4), Error);

    CHECK(mergesort_pass_count(20, 20, 4) == 0);
    CHECK(mergesort_pass_count(21, 20, 4) == 1);
    CHECK(mergesort_pass_count(100, 20, 4) == 1);
    CHECK(mergesort_pass_count(101, 20, 4) == 2);
    for (std::uint64_t n = 1; n < 5000; n += 37)
        for (std::uint64_t B : {1, 2, 4})
            for (std::uint64_t M : {5 * B, 8 * B, 16 * B}) CHECK(mergesort_pass_count(n, M, B) == passes(n, M, B));

    // n <= M: one read and one write of every item, in order.
    const auto small = gen_multiway_mergesort(16, 2, 16, 2);
    std::vector<Address> expected;
    for (std::uint64_t i = 0; i < 16; ++i) expected.push_back(i * 2);
    for (std::uint64_t i = 0; i < 16; ++i) expected.push_back(i * 2);
    CHECK(small.addresses == expected);
    CHECK(small.extent == 32);

    for (std::uint64_t n : {17, 256, 1000, 4096}) {
        auto values = random_keys(n, 2);
        auto copy = values;
        std::size_t len = 0;
        trace_multiway_mergesort(values, 1, 16, 2, [&](Address x) {
            CHECK(x < 2 * n);
            ++len;
        });
        std::sort(copy.begin(), copy.end());
        CHECK(values == copy);
        // One read and one write per item per pass, plus run formation.
        CHECK(len == 2 * n * (1 + mergesort_pass_count(n, 16, 2)));
    }
}

TEST_CASE("funnelsort")
{
    for (std::uint64_t n : {1, 5, 32, 33, 100, 1000, 1 << 14}) {
        const auto st = gen_funnelsort(n, 2, 3);
        auto expect = st.input;
        std::sort(expect.begin(), expect.end());
        CHECK(st.output == expect);
        CHECK(all_below(st.trace));
        CHECK(st.trace.extent == workload_extent({WorkloadKind::funnelsort, n, 2}));
    }

    // Below the base case: read everything, then write everything.
    const auto tiny = gen_funnelsort(5, 1, 1);
    CHECK(tiny.trace.addresses == std::vector<Address>{0, 1, 2, 3, 4, 0, 1, 2, 3, 4});

    CHECK(funnelsort_buffer_items(32) == 0);
    CHECK(funnelsort_buffer_items(1 << 14) > 0);
}

TEST_CASE("generators are deterministic and stay inside their extent")
{
    for (auto kind : {WorkloadKind::sequential_scan, WorkloadKind::random_scan, WorkloadKind::permute,
                      WorkloadKind::repeated_binary_search, WorkloadKind::heapify, WorkloadKind::heapsort,
                      WorkloadKind::quicksort, WorkloadKind::multiway_mergesort, WorkloadKind::funnelsort}) {
        WorkloadSpec spec{kind, 3000, 4, 17, 0, 256, 16};
        const auto x = generate(spec), y = generate(spec);
        CHECK(x.addresses == y.addresses);
        CHECK(x.extent == workload_extent(spec));
        CHECK(all_below(x));
        CHECK(x.item_size == 4);
        CHECK(!x.addresses.empty());
    }
}
