#include "vat/workloads.hpp"

#include "vat/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <string>

namespace vat {

std::string_view to_string(WorkloadKind kind)
{
    switch (kind) {
    case WorkloadKind::sequential_scan: return "sequential-scan";
    case WorkloadKind::random_scan: return "random-scan";
    case WorkloadKind::permute: return "permute";
    case WorkloadKind::repeated_binary_search: return "repeated-binary-search";
    case WorkloadKind::heapify: return "heapify";
    case WorkloadKind::heapsort: return "heapsort";
    case WorkloadKind::quicksort: return "quicksort";
    case WorkloadKind::multiway_mergesort: return "multiway-mergesort";
    case WorkloadKind::funnelsort: return "funnelsort";
    }
    return "?";
}

WorkloadKind parse_workload(std::string_view name)
{
    std::string norm(name);
    std::replace(norm.begin(), norm.end(), '_', '-');
    for (auto kind : {WorkloadKind::sequential_scan, WorkloadKind::random_scan, WorkloadKind::permute,
                      WorkloadKind::repeated_binary_search, WorkloadKind::heapify, WorkloadKind::heapsort,
                      WorkloadKind::quicksort, WorkloadKind::multiway_mergesort, WorkloadKind::funnelsort})
        if (norm == to_string(kind)) return kind;
    if (norm == "mergesort") return WorkloadKind::multiway_mergesort;
    throw Error(ErrorKind::invalid_argument, "unknown workload '" + std::string(name) + "'");
}

std::vector<WorkloadKind> timing_kinds()
{
    return {WorkloadKind::sequential_scan, WorkloadKind::random_scan, WorkloadKind::permute,
            WorkloadKind::repeated_binary_search, WorkloadKind::heapify, WorkloadKind::heapsort,
            WorkloadKind::quicksort};
}

std::vector<std::uint64_t> random_keys(std::uint64_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> keys(n);
    for (auto& k : keys) k = rng();
    return keys;
}

namespace {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound)
{
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

void require_items(std::uint64_t n, std::uint64_t a, std::uint64_t min_n = 1)
{
    if (n < min_n) throw Error(ErrorKind::invalid_argument, "workload needs n >= " + std::to_string(min_n));
    if (a < 1) throw Error(ErrorKind::invalid_argument, "item size must be >= 1");
}

// Array of items starting at `base` (in items) whose reads and writes are reported.
class TracedArray {
public:
    TracedArray(std::span<std::uint64_t> data, std::uint64_t base, std::uint64_t a, const AccessSink& sink)
        : data_(data), base_(base), a_(a), sink_(sink)
    {
    }

    std::uint64_t read(std::uint64_t i) const
    {
        sink_((base_ + i) * a_);
        return data_[i];
    }

    void write(std::uint64_t i, std::uint64_t v)
    {
        sink_((base_ + i) * a_);
        data_[i] = v;
    }

    std::size_t size() const { return data_.size(); }

private:
    std::span<std::uint64_t> data_;
    std::uint64_t base_;
    std::uint64_t a_;
    const AccessSink& sink_;
};

// Floyd sift-down with a hole at i; v is the value being placed.
void sift_down(TracedArray& h, std::uint64_t i, std::uint64_t size, std::uint64_t v)
{
    for (;;) {
        std::uint64_t child = 2 * i + 1;
        if (child >= size) break;
        std::uint64_t cv = h.read(child);
        if (child + 1 < size) {
            const std::uint64_t rv = h.read(child + 1);
            if (rv > cv) {
                ++child;
                cv = rv;
            }
        }
        if (cv <= v) break;
        h.write(i, cv);
        i = child;
    }
    h.write(i, v);
}

void build_heap(TracedArray& h)
{
    const std::uint64_t n = h.size();
    for (std::uint64_t i = n / 2; i-- > 0;) sift_down(h, i, n, h.read(i));
}

AccessTrace collect(const WorkloadSpec& spec)
{
    AccessTrace trace;
    trace.extent = workload_extent(spec);
    trace.item_size = spec.a;
    stream_workload(spec, [&trace](Address addr) { trace.addresses.push_back(addr); });
    return trace;
}

}  // namespace

// ---------------------------------------------------------------- heaps and quicksort

void trace_heapify(std::span<std::uint64_t> values, std::uint64_t a, const AccessSink& sink)
{
    TracedArray h(values, 0, a, sink);
    build_heap(h);
}

void trace_heapsort(std::span<std::uint64_t> values, std::uint64_t a, const AccessSink& sink)
{
    TracedArray h(values, 0, a, sink);
    build_heap(h);
    for (std::uint64_t end = h.size(); end-- > 1;) {
        const std::uint64_t v = h.read(end);
        h.write(end, h.read(0));
        sift_down(h, 0, end, v);
    }
}

namespace {

constexpr std::uint64_t kInsertionCutoff = 16;

void insertion_sort(TracedArray& s, std::uint64_t lo, std::uint64_t hi)
{
    for (std::uint64_t i = lo + 1; i <= hi; ++i) {
        const std::uint64_t v = s.read(i);
        std::uint64_t j = i;
        while (j > lo) {
            const std::uint64_t prev = s.read(j - 1);
            if (prev <= v) break;
            s.write(j, prev);
            --j;
        }
        s.write(j, v);
    }
}

}  // namespace

void trace_quicksort(std::span<std::uint64_t> values, std::uint64_t a, const AccessSink& sink)
{
    if (values.size() < 2) return;
    TracedArray s(values, 0, a, sink);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pending{{0, values.size() - 1}};
    while (!pending.empty()) {
        auto [lo, hi] = pending.back();
        pending.pop_back();
        if (hi - lo + 1 <= kInsertionCutoff) {
            insertion_sort(s, lo, hi);
            continue;
        }
        // Median of three leaves a[lo] <= a[mid] <= a[hi].
        const std::uint64_t mid = lo + (hi - lo) / 2;
        std::uint64_t vl = s.read(lo), vm = s.read(mid), vh = s.read(hi);
        if (vm < vl) {
            std::swap(vl, vm);
            s.write(lo, vl);
            s.write(mid, vm);
        }
        if (vh < vl) {
            std::swap(vl, vh);
            s.write(lo, vl);
            s.write(hi, vh);
        }
        if (vh < vm) {
            std::swap(vm, vh);
            s.write(mid, vm);
            s.write(hi, vh);
        }
        const std::uint64_t pivot = vm;

        std::uint64_t i = lo, j = hi;
        while (i <= j) {
            std::uint64_t vi, vj;
            while ((vi = s.read(i)) < pivot) ++i;
            while ((vj = s.read(j)) > pivot) --j;
            if (i <= j) {
                s.write(i, vj);
                s.write(j, vi);
                ++i;
                if (j == 0) break;
                --j;
            }
        }
        // Smaller side on top of the stack keeps the stack logarithmic.
        std::pair<std::uint64_t, std::uint64_t> left{lo, j}, right{i, hi};
        const bool has_left = j > lo, has_right = i < hi;
        const std::uint64_t left_len = has_left ? j - lo : 0, right_len = has_right ? hi - i : 0;
        if (left_len >= right_len) {
            if (has_left) pending.push_back(left);
            if (has_right) pending.push_back(right);
        } else {
            if (has_right) pending.push_back(right);
            if (has_left) pending.push_back(left);
        }
    }
}

// ---------------------------------------------------------------- multiway mergesort

std::uint64_t mergesort_pass_count(std::uint64_t n, std::uint64_t M_items, std::uint64_t B_items)
{
    if (B_items < 1 || M_items < 5 * B_items)
        throw Error(ErrorKind::invalid_argument, "multiway mergesort needs M >= 5B");
    const std::uint64_t fan_in = M_items / B_items;
    std::uint64_t runs = (n + M_items - 1) / M_items;
    std::uint64_t passes = 0;
    while (runs > 1) {
        runs = (runs + fan_in - 1) / fan_in;
        ++passes;
    }
    return passes;
}

void trace_multiway_mergesort(std::vector<std::uint64_t>& values, std::uint64_t a, std::uint64_t M_items,
                              std::uint64_t B_items, const AccessSink& sink)
{
    const std::uint64_t n = values.size();
    const std::uint64_t passes = mergesort_pass_count(n, M_items, B_items);
    const std::uint64_t fan_in = M_items / B_items;

    std::vector<std::uint64_t> scratch(passes > 0 ? n : 0);
    TracedArray primary(values, 0, a, sink);
    TracedArray secondary(scratch, n, a, sink);

    // Run formation: read each M-chunk, sort it in fast memory, write it back.
    std::vector<std::uint64_t> chunk;
    for (std::uint64_t lo = 0; lo < n; lo += M_items) {
        const std::uint64_t hi = std::min(n, lo + M_items);
        chunk.clear();
        for (std::uint64_t i = lo; i < hi; ++i) chunk.push_back(primary.read(i));
        std::sort(chunk.begin(), chunk.end());
        for (std::uint64_t i = lo; i < hi; ++i) primary.write(i, chunk[i - lo]);
    }

    // Merge passes. Each input run and the output run are staged through one
    // block-sized buffer; the buffers and the head heap live in fast memory.
    TracedArray* src = &primary;
    TracedArray* dst = &secondary;
    std::uint64_t run_len = M_items;
    for (std::uint64_t pass = 0; pass < passes; ++pass) {
        for (std::uint64_t group = 0; group < n; group += run_len * fan_in) {
            struct Run {
                std::uint64_t next, end;
                std::vector<std::uint64_t> buffer;
                std::size_t pos = 0;
            };
            std::vector<Run> runs;
            for (std::uint64_t r = 0; r < fan_in; ++r) {
                const std::uint64_t lo = group + r * run_len;
                if (lo >= n) break;
                runs.push_back({lo, std::min(n, lo + run_len), {}, 0});
            }
            auto refill = [&](Run& run) {
                run.buffer.clear();
                run.pos = 0;
                const std::uint64_t block_end = std::min(run.end, (run.next / B_items + 1) * B_items);
                for (; run.next < block_end; ++run.next) run.buffer.push_back(src->read(run.next));
            };
            using Head = std::pair<std::uint64_t, std::size_t>;
            std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
            for (std::size_t r = 0; r < runs.size(); ++r) {
                refill(runs[r]);
                heap.push({runs[r].buffer[0], r});
            }
            std::vector<std::uint64_t> out;
            std::uint64_t out_pos = group;
            auto flush = [&] {
                for (std::uint64_t v : out) dst->write(out_pos++, v);
                out.clear();
            };
            while (!heap.empty()) {
                auto [v, r] = heap.top();
                heap.pop();
                out.push_back(v);
                if ((out_pos + out.size()) % B_items == 0) flush();
                Run& run = runs[r];
                if (++run.pos == run.buffer.size()) {
                    if (run.next == run.end) continue;
                    refill(run);
                }
                heap.push({run.buffer[run.pos], r});
            }
            flush();
        }
        std::swap(src, dst);
        run_len *= fan_in;
    }
    if (src != &primary) values.swap(scratch);
}

// ---------------------------------------------------------------- funnelsort

namespace {

std::uint64_t ceil_cbrt(std::uint64_t n)
{
    auto k = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
    while (k * k * k < n) ++k;
    while (k > 1 && (k - 1) * (k - 1) * (k - 1) >= n) --k;
    return k;
}

std::uint32_t ceil_log2(std::uint64_t k)
{
    std::uint32_t h = 0;
    while ((std::uint64_t{1} << h) < k) ++h;
    return h;
}

// Binary merger tree over k input streams with buffers laid out in van Emde
// Boas order. The buffers cut by the middle level of a height-h subtree hold
// ceil(2^(1.5 h)) items.
class Funnel {
public:
    struct Merger {
        int left = 0, right = 0;  // >= 0 merger index, < 0 stream -(s + 1)
        std::uint64_t offset = 0;
        std::uint64_t capacity = 0;
        std::vector<std::uint64_t> buf;
        std::uint64_t head = 0, count = 0;
        bool exhausted = false;
    };

    explicit Funnel(std::uint64_t k)
    {
        mergers_.reserve(k);
        root_ = build(0, k);
        std::uint64_t offset = 0;
        layout(root_, ceil_log2(k), offset);
        space_ = offset;
    }

    std::uint64_t space() const { return space_; }
    std::vector<Merger>& mergers() { return mergers_; }
    int root() const { return root_; }

private:
    int build(std::uint64_t s0, std::uint64_t s1)
    {
        if (s1 - s0 == 1) return -static_cast<int>(s0) - 1;
        const int index = static_cast<int>(mergers_.size());
        mergers_.emplace_back();
        const std::uint64_t mid = s0 + (s1 - s0 + 1) / 2;
        const int left = build(s0, mid);
        const int right = build(mid, s1);
        mergers_[index].left = left;
        mergers_[index].right = right;
        return index;
    }

    void collect(int v, std::uint32_t depth, std::vector<int>& out) const
    {
        if (v < 0) return;
        if (depth == 0) {
            out.push_back(v);
            return;
        }
        collect(mergers_[v].left, depth - 1, out);
        collect(mergers_[v].right, depth - 1, out);
    }

    void layout(int v, std::uint32_t h, std::uint64_t& offset)
    {
        if (v < 0 || h <= 1) return;
        const std::uint32_t top = (h + 1) / 2;
        layout(v, top, offset);
        std::vector<int> bottoms;
        collect(v, top, bottoms);
        const auto size = static_cast<std::uint64_t>(std::ceil(std::pow(2.0, 1.5 * h)));
        for (int b : bottoms) {
            mergers_[b].offset = offset;
            mergers_[b].capacity = size;
            offset += size;
            layout(b, h - top, offset);
        }
    }

    std::vector<Merger> mergers_;
    int root_ = 0;
    std::uint64_t space_ = 0;
};

std::uint64_t funnel_fan_in(std::uint64_t len) { return std::max<std::uint64_t>(2, ceil_cbrt(len)); }

std::uint64_t buffer_items(std::uint64_t len, std::map<std::uint64_t, std::uint64_t>& memo)
{
    if (len <= kFunnelBaseCase) return 0;
    if (auto it = memo.find(len); it != memo.end()) return it->second;
    const std::uint64_t k = funnel_fan_in(len);
    std::uint64_t space = Funnel(k).space();
    for (std::uint64_t i = 0; i < k; ++i) {
        const std::uint64_t child = (i + 1) * len / k - i * len / k;
        space = std::max(space, buffer_items(child, memo));
    }
    memo[len] = space;
    return space;
}

class FunnelSorter {
public:
    FunnelSorter(std::vector<std::uint64_t>& values, std::uint64_t a, const AccessSink& sink)
        : x_(values), y_(values.size()), n_(values.size()), a_(a), sink_(sink)
    {
    }

    void run()
    {
        if (n_ > 0) sort(0, n_, 0, 0);
    }

private:
    // Array 0 is the input at [0, n), array 1 the scratch copy at [n, 2n);
    // funnel buffers start at 2n.
    std::vector<std::uint64_t>& array(int which) { return which == 0 ? x_ : y_; }

    std::uint64_t read(int which, std::uint64_t i)
    {
        sink_((which * n_ + i) * a_);
        return array(which)[i];
    }

    void write(int which, std::uint64_t i, std::uint64_t v)
    {
        sink_((which * n_ + i) * a_);
        array(which)[i] = v;
    }

    // Sorts the segment [lo, lo + len), currently held in array `from`, into array `to`.
    void sort(std::uint64_t lo, std::uint64_t len, int from, int to)
    {
        if (len <= kFunnelBaseCase) {
            std::vector<std::uint64_t> tmp(len);
            for (std::uint64_t i = 0; i < len; ++i) tmp[i] = read(from, lo + i);
            std::sort(tmp.begin(), tmp.end());
            for (std::uint64_t i = 0; i < len; ++i) write(to, lo + i, tmp[i]);
            return;
        }
        const std::uint64_t k = funnel_fan_in(len);
        const int other = 1 - to;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> streams(k);
        for (std::uint64_t i = 0; i < k; ++i) {
            streams[i] = {lo + i * len / k, lo + (i + 1) * len / k};
            sort(streams[i].first, streams[i].second - streams[i].first, from, other);
        }
        merge(streams, other, to, lo);
    }

    void merge(std::vector<std::pair<std::uint64_t, std::uint64_t>>& streams, int source, int to, std::uint64_t lo)
    {
        Funnel funnel(streams.size());
        auto& mergers = funnel.mergers();
        for (auto& m : mergers) m.buf.resize(m.capacity);
        const std::uint64_t buffer_base = 2 * n_;

        auto has = [&](int c) {
            if (c < 0) {
                const auto& s = streams[-c - 1];
                return s.first < s.second;
            }
            return mergers[c].head < mergers[c].count;
        };
        auto peek = [&](int c) {
            return c < 0 ? array(source)[streams[-c - 1].first] : mergers[c].buf[mergers[c].head];
        };
        auto take = [&](int c) {
            if (c < 0) return read(source, streams[-c - 1].first++);
            auto& m = mergers[c];
            sink_((buffer_base + m.offset + m.head) * a_);
            return m.buf[m.head++];
        };

        // One merge step at merger v: refill empty child buffers, then move
        // the smaller head out. Returns false once both inputs are dry.
        std::function<bool(int, std::uint64_t&)> step;
        std::function<void(int)> fill = [&](int v) {
            auto& m = mergers[v];
            m.head = m.count = 0;
            std::uint64_t value = 0;
            while (m.count < m.capacity) {
                if (!step(v, value)) {
                    m.exhausted = true;
                    break;
                }
                sink_((buffer_base + m.offset + m.count) * a_);
                m.buf[m.count++] = value;
            }
        };
        step = [&](int v, std::uint64_t& value) {
            for (int c : {mergers[v].left, mergers[v].right})
                if (c >= 0 && mergers[c].head == mergers[c].count && !mergers[c].exhausted) fill(c);
            const int l = mergers[v].left, r = mergers[v].right;
            const bool hl = has(l), hr = has(r);
            if (!hl && !hr) return false;
            value = (hl && (!hr || peek(l) <= peek(r))) ? take(l) : take(r);
            return true;
        };

        std::uint64_t out = lo, value = 0;
        while (step(funnel.root(), value)) write(to, out++, value);
    }

    std::vector<std::uint64_t>& x_;
    std::vector<std::uint64_t> y_;
    std::uint64_t n_;
    std::uint64_t a_;
    const AccessSink& sink_;
};

}  // namespace

std::uint64_t funnelsort_buffer_items(std::uint64_t n)
{
    std::map<std::uint64_t, std::uint64_t> memo;
    return buffer_items(n, memo);
}

void trace_funnelsort(std::vector<std::uint64_t>& values, std::uint64_t a, const AccessSink& sink)
{
    FunnelSorter(values, a, sink).run();
}

// ---------------------------------------------------------------- dispatch

std::uint64_t workload_extent(const WorkloadSpec& spec)
{
    const std::uint64_t n = spec.n, a = spec.a;
    switch (spec.kind) {
    case WorkloadKind::multiway_mergesort:
        return (mergesort_pass_count(n, spec.merge_M, spec.merge_B) > 0 ? 2 * n : n) * a;
    case WorkloadKind::funnelsort:
        return n <= kFunnelBaseCase ? n * a : (2 * n + funnelsort_buffer_items(n)) * a;
    default: return n * a;
    }
}

std::vector<std::uint64_t> stream_workload(const WorkloadSpec& spec, const AccessSink& sink)
{
    const std::uint64_t n = spec.n, a = spec.a;
    std::mt19937_64 rng(spec.seed);
    switch (spec.kind) {
    case WorkloadKind::sequential_scan:
        require_items(n, a);
        for (std::uint64_t i = 0; i < n; ++i) sink(i * a);
        return {};
    case WorkloadKind::random_scan:
        require_items(n, a);
        for (std::uint64_t i = 0; i < n; ++i) sink(uniform_below(rng, n) * a);
        return {};
    case WorkloadKind::permute:
        // Fisher-Yates: step i swaps item i with a uniform item j <= i.
        require_items(n, a, 2);
        for (std::uint64_t i = n - 1; i >= 1; --i) {
            const std::uint64_t j = uniform_below(rng, i + 1);
            sink(i * a);
            sink(j * a);
        }
        return {};
    case WorkloadKind::repeated_binary_search: {
        require_items(n, a);
        const std::uint64_t queries = spec.queries == 0 ? n : spec.queries;
        for (std::uint64_t q = 0; q < queries; ++q) {
            const std::uint64_t target = uniform_below(rng, n);
            std::uint64_t lo = 0, hi = n;
            while (lo < hi) {
                const std::uint64_t mid = (lo + hi) / 2;
                sink(mid * a);
                if (mid == target) break;
                if (mid < target)
                    lo = mid + 1;
                else
                    hi = mid;
            }
        }
        return {};
    }
    case WorkloadKind::heapify: {
        require_items(n, a);
        auto values = random_keys(n, spec.seed);
        trace_heapify(values, a, sink);
        return values;
    }
    case WorkloadKind::heapsort: {
        require_items(n, a);
        auto values = random_keys(n, spec.seed);
        trace_heapsort(values, a, sink);
        return values;
    }
    case WorkloadKind::quicksort: {
        require_items(n, a);
        auto values = random_keys(n, spec.seed);
        trace_quicksort(values, a, sink);
        return values;
    }
    case WorkloadKind::multiway_mergesort: {
        require_items(n, a);
        auto values = random_keys(n, spec.seed);
        trace_multiway_mergesort(values, a, spec.merge_M, spec.merge_B, sink);
        return values;
    }
    case WorkloadKind::funnelsort: {
        require_items(n, a);
        auto values = random_keys(n, spec.seed);
        trace_funnelsort(values, a, sink);
        return values;
    }
    }
    return {};
}

AccessTrace generate(const WorkloadSpec& spec) { return collect(spec); }

AccessTrace gen_sequential_scan(std::uint64_t n, std::uint64_t a)
{
    return collect({WorkloadKind::sequential_scan, n, a});
}

AccessTrace gen_random_scan(std::uint64_t n, std::uint64_t a, std::uint64_t seed)
{
    return collect({WorkloadKind::random_scan, n, a, seed});
}

AccessTrace gen_permute(std::uint64_t n, std::uint64_t a, std::uint64_t seed)
{
    return collect({WorkloadKind::permute, n, a, seed});
}

AccessTrace gen_repeated_binary_search(std::uint64_t n, std::uint64_t a, std::uint64_t seed, std::uint64_t queries)
{
    if (queries < 1) throw Error(ErrorKind::invalid_argument, "repeated binary search needs at least one query");
    return collect({WorkloadKind::repeated_binary_search, n, a, seed, queries});
}

AccessTrace gen_heapify(std::uint64_t n, std::uint64_t a, std::uint64_t seed)
{
    return collect({WorkloadKind::heapify, n, a, seed});
}

AccessTrace gen_heapsort(std::uint64_t n, std::uint64_t a, std::uint64_t seed)
{
    return collect({WorkloadKind::heapsort, n, a, seed});
}

AccessTrace gen_quicksort(std::uint64_t n, std::uint64_t a, std::uint64_t seed)
{
    return collect({WorkloadKind::quicksort, n, a, seed});
}

AccessTrace gen_multiway_mergesort(std::uint64_t n, std::uint64_t a, std::uint64_t M_items, std::uint64_t B_items,
                                   std::uint64_t seed)
{
    WorkloadSpec spec{WorkloadKind::multiway_mergesort, n, a, seed};
    spec.merge_M = M_items;
    spec.merge_B = B_items;
    return collect(spec);
}

SortTrace gen_funnelsort(std::uint64_t n, std::uint64_t a, std::uint64_t seed)
{
    SortTrace result;
    result.input = random_keys(n, seed);
    result.output = result.input;
    result.trace.extent = workload_extent({WorkloadKind::funnelsort, n, a, seed});
    result.trace.item_size = a;
    require_items(n, a);
    trace_funnelsort(result.output, a, [&](Address addr) { result.trace.addresses.push_back(addr); });
    return result;
}

}  // namespace vat
