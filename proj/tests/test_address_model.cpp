#include "vat/address_model.hpp"
#include "vat/error.hpp"

#include <doctest.h>

#include <random>

using namespace vat;

namespace {

MachineConfig machine(std::uint64_t K, std::uint64_t P, std::uint32_t d, std::uint64_t a = 1)
{
    MachineConfig cfg;
    cfg.K = K;
    cfg.P = P;
    cfg.a = a;
    cfg.d = d;
    cfg.cache_units = P * 16;
    return cfg;
}

}  // namespace

TEST_CASE("compute_depth")
{
    // 2^30 units over 2^12-unit pages is 2^18 pages = 512^2.
    CHECK(compute_depth((std::uint64_t{1} << 30) - 1, 512, 4096) == 2);
    CHECK(compute_depth(4095, 512, 4096) == 1);
    CHECK(compute_depth(3, 7, 4) == 1);
    CHECK(compute_depth(2 * 4 - 1, 2, 4) == 1);
    CHECK(compute_depth(2 * 4, 2, 4) == 2);
    CHECK(compute_depth(0, 2, 2) == 1);

    CHECK_THROWS_AS(compute_depth(10, 1, 4), Error);
    CHECK_THROWS_AS(compute_depth(10, 2, 0), Error);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t K = 2 + rng() % 30, P = 1 + rng() % 5000, last = rng() % (std::uint64_t{1} << 40);
        const auto d = compute_depth(last, K, P);
        CHECK(checked_pow(K, d) * P > last);
        if (d > 1) CHECK(checked_pow(K, d - 1) * P <= last);
    }
}

TEST_CASE("machine config validation")
{
    CHECK_NOTHROW(validate(machine(2, 4, 3)));
    CHECK_THROWS_AS(validate(machine(1, 4, 3)), Error);
    CHECK_THROWS_AS(validate(machine(2, 4, 0)), Error);
    CHECK_THROWS_AS(validate(machine(2, 6, 3, 4)), Error);  // a does not divide P
    CHECK_THROWS_AS(validate(machine(2, 4, 3, 8)), Error);  // a > P
    auto cfg = machine(2, 4, 3);
    cfg.cache_units = 6;
    CHECK_THROWS_AS(validate(cfg), Error);
    CHECK_THROWS_AS(validate(machine(512, 4096, 6)), Error);  // 2^66 units

    const auto m = make_machine(16, 512, 4, std::uint64_t{1} << 26, 1 << 16);
    CHECK(m.d == 5);
    CHECK(m.items_per_page() == 128);
    CHECK(m.cache_items() == 1 << 14);
    CHECK(m.cache_pages() == 128);
}

TEST_CASE("decompose")
{
    const auto cfg = machine(2, 4, 3);
    const auto dec = decompose(18, cfg);
    CHECK(dec.digits == std::vector<std::uint64_t>{1, 0, 0});
    CHECK(dec.offset == 2);

    const auto zero = decompose(0, cfg);
    CHECK(zero.digits == std::vector<std::uint64_t>{0, 0, 0});
    CHECK(zero.offset == 0);

    const auto top = decompose(address_space(cfg) - 1, cfg);
    CHECK(top.digits == std::vector<std::uint64_t>{1, 1, 1});
    CHECK(top.offset == 3);

    CHECK_THROWS_AS(decompose(address_space(cfg), cfg), Error);
    try {
        decompose(32, cfg);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::address_overflow);
    }
}

TEST_CASE("recompose")
{
    const auto cfg = machine(2, 4, 3);
    CHECK(recompose({{1, 0, 0}, 2}, cfg) == 18);
    CHECK(recompose({{0, 0, 0}, 0}, cfg) == 0);
    CHECK_THROWS_AS(recompose({{2, 0, 0}, 0}, cfg), Error);
    CHECK_THROWS_AS(recompose({{1, 0, 0}, 4}, cfg), Error);
    CHECK_THROWS_AS(recompose({{1, 0}, 0}, cfg), Error);

    // Page index equals sum x_i K^i with x_0 the last digit.
    const auto wide = machine(7, 5, 4);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const Address addr = rng() % address_space(wide);
        const auto dec = decompose(addr, wide);
        std::uint64_t page = 0, weight = 1;
        for (std::size_t j = dec.digits.size(); j-- > 0;) {
            page += dec.digits[j] * weight;
            weight *= wide.K;
        }
        CHECK(page == addr / wide.P);
        CHECK(recompose(dec, wide) == addr);
    }
}

TEST_CASE("translation_path")
{
    const auto cfg = machine(2, 4, 3);
    const std::vector<TranslationNode> fig{{3, 0}, {2, 1}, {1, 2}, {0, 4}};
    CHECK(translation_path(4, cfg) == fig);

    const auto zero = translation_path(0, cfg);
    for (std::uint32_t i = 0; i <= cfg.d; ++i) CHECK(zero[i] == TranslationNode{cfg.d - i, 0});

    const auto k = machine(5, 4, 4);
    const auto last = translation_path(page_count(k) - 1, k);
    for (std::uint32_t j = 0; j <= k.d; ++j) CHECK(last[j] == TranslationNode{k.d - j, checked_pow(5, j) - 1});

    CHECK_THROWS_AS(translation_path(8, cfg), Error);
}

TEST_CASE("translation paths follow the child rule")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto cfg = machine(2 + rng() % 20, 8, 1 + rng() % 6);
        const PageIndex page = rng() % page_count(cfg);
        const auto path = translation_path(page, cfg);
        const auto dec = decompose(page * cfg.P, cfg);
        REQUIRE(path.size() == cfg.d + 1);
        CHECK(path.front() == TranslationNode{cfg.d, 0});
        CHECK(path.back() == TranslationNode{0, page});
        for (std::uint32_t i = 1; i <= cfg.d; ++i) {
            CHECK(path[i].layer + 1 == path[i - 1].layer);
            CHECK(path[i].number == cfg.K * path[i - 1].number + dec.digits[i - 1]);
        }

        // Neighbouring pages share a root-side prefix and differ on every layer below it.
        if (page + 1 < page_count(cfg)) {
            const auto next = translation_path(page + 1, cfg);
            std::size_t split = 0;
            while (split < path.size() && path[split] == next[split]) ++split;
            CHECK(split >= 1);
            for (std::size_t i = split; i < path.size(); ++i) CHECK(path[i] != next[i]);
        }
    }
}

TEST_CASE("path_union")
{
    const auto cfg = machine(2, 4, 3);
    const std::vector<PageIndex> pages{4, 5, 6};
    const std::set<TranslationNode> expected{{2, 1}, {1, 2}, {1, 3}, {0, 4}, {0, 5}, {0, 6}};
    const auto nodes = path_union(pages, cfg);
    CHECK(nodes == expected);
    CHECK(nodes.size() <= 3 * cfg.d);
    CHECK(internal_node_count(nodes) == 3);

    const std::vector<PageIndex> single{5};
    const auto one = path_union(single, cfg);
    CHECK(one.size() == cfg.d);
    const auto path = translation_path(5, cfg);
    CHECK(one == std::set<TranslationNode>(path.begin() + 1, path.end()));
}

TEST_CASE("internal nodes over d consecutive pages stay within 2d + ceil(d/(K-1))")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint64_t K = std::vector<std::uint64_t>{2, 3, 4, 16, 512}[rng() % 5];
        const std::uint32_t d = 1 + rng() % 6;
        const auto cfg = machine(K, 8, d);
        const std::uint64_t pages = page_count(cfg);
        const std::uint64_t start = rng() % (pages - d + 1);
        std::vector<PageIndex> run(d);
        for (std::uint32_t i = 0; i < d; ++i) run[i] = start + i;
        const auto internal = internal_node_count(path_union(run, cfg));
        CHECK(internal <= 2 * d + (d + K - 2) / (K - 1));
        CHECK(internal <= 3 * d);
    }
}

TEST_CASE("NodeKeys numbers every node densely")
{
    const auto cfg = machine(3, 4, 3);
    const NodeKeys keys(cfg);
    CHECK(keys.size() == 27 + 9 + 3 + 1);
    CHECK(keys.root_key() == keys.size() - 1);
    for (std::uint64_t k = 0; k < keys.size(); ++k) {
        const auto node = keys.node(k);
        CHECK(keys.key(node) == k);
        CHECK(node.number < checked_pow(3, cfg.d - node.layer));
        CHECK(keys.layer_of(k) == node.layer);
    }
}
