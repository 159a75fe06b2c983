#include <gtest/gtest.h>

#include <set>

#include "carmex/largeprime.hpp"
#include "carmex/search.hpp"

using namespace carmex;

namespace {

std::vector<natural> numbers(const std::vector<CarmichaelRecord>& rs) {
    std::vector<natural> out;
    for (const auto& r : rs) out.push_back(r.n);
    return out;
}

PrefixState prefix(std::vector<natural> primes) {
    PrefixState s;
    for (natural p : primes) {
        s.primes.push_back(p);
        s.product *= p;
        s.lambda = *lcm(s.lambda, p - 1);
    }
    return s;
}

SearchConfig config(natural limit, natural split = 0) {
    SearchConfig cfg;
    cfg.limit = limit;
    cfg.split = split;
    return cfg;
}

std::vector<CarmichaelRecord> full_enumeration(const SearchConfig& cfg) {
    auto out = enumerate_all(cfg);
    const natural root = isqrt(cfg.limit);
    if (cfg.effective_split() < root) {
        auto big = scan({cfg.effective_split(), root, cfg.limit}, cfg.d_min, cfg.d_max);
        out.insert(out.end(), big.begin(), big.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Extend, Examples) {
    const SearchConfig cfg = config(100'000);
    const auto s3 = extend(PrefixState{}, 3, cfg);
    ASSERT_TRUE(s3.has_value());
    EXPECT_EQ(s3->product, 3u);
    EXPECT_EQ(s3->lambda, 2u);
    const auto s311 = extend(*s3, 11, cfg);
    ASSERT_TRUE(s311.has_value());
    EXPECT_EQ(s311->product, 33u);
    EXPECT_EQ(s311->lambda, 10u);
}

TEST(Extend, MinimalCompletionBound) {
    const auto s3 = *extend(PrefixState{}, 3, config(1000));
    EXPECT_FALSE(extend(s3, 5, config(1000)).has_value());
    EXPECT_FALSE(extend(s3, 5, config(1154)).has_value());
    EXPECT_TRUE(extend(s3, 5, config(1155)).has_value());
}

TEST(Extend, GcdConditionAndOrdering) {
    const SearchConfig cfg = config(1'000'000);
    const auto s3 = *extend(PrefixState{}, 3, cfg);
    EXPECT_FALSE(extend(s3, 7, cfg).has_value());  // 3 | 6
    EXPECT_THROW(extend(s3, 3, cfg), std::invalid_argument);
    EXPECT_THROW(extend(PrefixState{}, 2, cfg), std::invalid_argument);
}

TEST(CompleteLastPrime, Examples) {
    EXPECT_EQ(numbers(complete_last_prime(prefix({3, 11}), 100'000)), (std::vector<natural>{561}));
    EXPECT_TRUE(complete_last_prime(prefix({3, 5}), 100'000).empty());
    EXPECT_EQ(numbers(complete_last_prime(prefix({7, 13}), 100'000)), (std::vector<natural>{1729, 2821}));
    EXPECT_TRUE(complete_last_prime(prefix({3, 11}), 560).empty());
    EXPECT_THROW(complete_last_prime(prefix({3}), 1000), std::invalid_argument);
}

TEST(CompletePair, PrefixThreeHasOnlyFiveSixtyOne) {
    PairLoopStats stats;
    const auto rs = complete_pair(prefix({3}), kWorkingLimit, ~natural{0}, &stats);
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(rs[0].primes, (std::vector<natural>{3, 11, 17}));
    EXPECT_LE(stats.outer_iterations, 2u);  // B < P = 3
}

TEST(CompletePair, PrefixFive) {
    const auto ns = numbers(complete_pair(prefix({5}), 100'000));
    for (natural n : {1105ULL, 2465ULL, 10585ULL}) EXPECT_NE(std::find(ns.begin(), ns.end(), n), ns.end()) << n;
    EXPECT_TRUE(complete_pair(prefix({3}), 500).empty());
}

TEST(CompletePair, LoopBoundsAreFinite) {
    for (natural p1 : primes_in(2, 200)) {
        if (p1 < 3) continue;
        PairLoopStats stats;
        complete_pair(prefix({p1}), kWorkingLimit, ~natural{0}, &stats);
        EXPECT_LT(stats.outer_iterations, p1);
        const double P = static_cast<double>(p1);
        EXPECT_LE(static_cast<double>(stats.inner_iterations), 2 * P * P * (std::log(P) + 1)) << p1;
    }
}

TEST(CompletePair, AgreesWithBruteForceThreeFactorList) {
    std::set<natural> expected;
    for (const auto& r : brute_scan(300'000))
        if (r.factor_count() == 3) expected.insert(r.n);
    std::set<natural> got;
    for (const auto& r : enumerate_d3(300'000)) got.insert(r.n);
    EXPECT_EQ(got, expected);
}

TEST(EarlyTerminate, Examples) {
    const auto s35 = prefix({3, 5});
    EXPECT_EQ(numbers(early_terminate(s35, 100'000)), (std::vector<natural>{62745}));
    EXPECT_EQ(numbers(early_terminate(prefix({3, 11}), 1000)), (std::vector<natural>{561}));
    EXPECT_TRUE(early_terminate(prefix({5, 7}), 10'000).empty());
    EXPECT_EQ(progression_size(prefix({3, 11}), 1000), 2u);  // Q in {17, 27}
}

TEST(EnumerateAll, Examples) {
    EXPECT_EQ(numbers(enumerate_all(config(10'000, 100))),
              (std::vector<natural>{561, 1105, 1729, 2465, 2821, 6601, 8911}));
    EXPECT_EQ(full_enumeration(config(100'000)).size(), 16u);
    SearchConfig c = config(561);
    c.d_max = 3;
    EXPECT_EQ(numbers(enumerate_all(c)), (std::vector<natural>{561}));
}

TEST(EnumerateAll, ConfigValidation) {
    EXPECT_THROW(enumerate_all(config(560)), std::invalid_argument);
    EXPECT_THROW(enumerate_all(config(10'000, 101)), std::invalid_argument);
    SearchConfig c = config(10'000);
    c.early_term_threshold = 0;
    EXPECT_THROW(enumerate_all(c), std::invalid_argument);
    c = config(10'000);
    c.d_min = 5;
    c.d_max = 4;
    EXPECT_THROW(enumerate_all(c), std::invalid_argument);
}

TEST(EnumerateD3, Examples) {
    EXPECT_EQ(numbers(enumerate_d3(10'000)), (std::vector<natural>{561, 1105, 1729, 2465, 2821, 6601, 8911}));
    EXPECT_EQ(enumerate_d3(100'000).size(), 12u);
    EXPECT_EQ(enumerate_d3(1'000'000).size(), 23u);
}

TEST(SmallestWithD, Examples) {
    EXPECT_EQ(smallest_with_d(3, 1'000'000), 561u);
    EXPECT_EQ(smallest_with_d(4, 1'000'000), 41041u);
    EXPECT_EQ(smallest_with_d(5, 10'000'000), 825265u);
    EXPECT_EQ(smallest_with_d(6, 1'000'000'000), 321197185u);
    EXPECT_FALSE(smallest_with_d(4, 41040).has_value());
    EXPECT_THROW(smallest_with_d(2, 1000), std::invalid_argument);
}

TEST(Properties, CompleteAgainstOracle) {
    const auto expected = brute_scan(200'000);
    for (natural split : {0ULL, 50ULL, 200ULL, 447ULL}) {
        const auto got = full_enumeration(config(200'000, split));
        EXPECT_EQ(got, expected) << "split " << split;
    }
}

TEST(Properties, EarlyTerminationThresholdDoesNotChangeOutput) {
    SearchConfig base = config(100'000'000);
    base.early_term_threshold = 64;
    const auto reference = enumerate_all(base);
    for (natural t : {1ULL, 4ULL, 1000ULL, 1'000'000'000ULL}) {
        SearchConfig c = base;
        c.early_term_threshold = t;
        EXPECT_EQ(enumerate_all(c), reference) << "T=" << t;
    }
}

TEST(Properties, PairBudgetDoesNotChangeOutput) {
    SearchConfig base = config(100'000'000);
    base.d_min = base.d_max = 4;
    const auto reference = enumerate_all(base);
    for (double budget : {0.0, 1e9}) {
        SearchConfig c = base;
        c.pair_budget = budget;
        EXPECT_EQ(enumerate_all(c), reference) << budget;
    }
}

TEST(Properties, FactorCountWindowsPartitionTheOutput) {
    const auto all = full_enumeration(config(100'000'000));
    std::vector<CarmichaelRecord> joined;
    for (unsigned d = 3; d <= 6; ++d) {
        SearchConfig c = config(100'000'000);
        c.d_min = c.d_max = d;
        auto part = full_enumeration(c);
        for (const auto& r : part) ASSERT_EQ(r.factor_count(), d);
        joined.insert(joined.end(), part.begin(), part.end());
    }
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(joined, all);
    EXPECT_EQ(all.size(), 255u);
}

TEST(Properties, RecordsAreSoundAndSatisfyLastPrimeBound) {
    for (const auto& r : full_enumeration(config(1'000'000'000))) {
        ASSERT_TRUE(korselt(r.n, r.primes)) << r.n;
        ASSERT_EQ(r.n % 2, 1u);
        const natural pd = r.largest_prime();
        ASSERT_LT(static_cast<u128>(pd) * pd, r.n);
        ASSERT_EQ((r.n / pd - 1) % (pd - 1), 0u);
    }
}

TEST(Properties, UnitPartitionsAreDisjointAndExhaustive) {
    const SearchConfig cfg = config(100'000'000);
    const auto reference = enumerate_all(cfg);
    for (natural slices : {2ULL, 3ULL, 7ULL}) {
        std::vector<CarmichaelRecord> joined;
        for (natural k = 0; k < slices; ++k) {
            SearchConfig c = cfg;
            c.partition = UnitSelector::parse(std::to_string(k) + "/" + std::to_string(slices));
            auto part = enumerate_all(c);
            joined.insert(joined.end(), part.begin(), part.end());
        }
        std::sort(joined.begin(), joined.end());
        EXPECT_EQ(joined, reference) << slices;
    }
    SearchConfig lo = cfg, hi = cfg;
    lo.partition = UnitSelector::parse("3-97");
    hi.partition = UnitSelector::parse("98-100000");
    auto joined = enumerate_all(lo);
    auto rest = enumerate_all(hi);
    joined.insert(joined.end(), rest.begin(), rest.end());
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(joined, reference);
}

TEST(UnitSelector, Parsing) {
    const auto sel = UnitSelector::parse("3-97,101");
    EXPECT_TRUE(sel.selects(0, 3));
    EXPECT_TRUE(sel.selects(5, 101));
    EXPECT_FALSE(sel.selects(0, 99));
    const auto mod = UnitSelector::parse("1/4");
    EXPECT_TRUE(mod.selects(5, 3));
    EXPECT_FALSE(mod.selects(4, 3));
    EXPECT_THROW(UnitSelector::parse("4/4"), std::invalid_argument);
    EXPECT_THROW(UnitSelector::parse("9-3"), std::invalid_argument);
    EXPECT_THROW(UnitSelector::parse("x"), std::invalid_argument);
    EXPECT_THROW(UnitSelector::parse(""), std::invalid_argument);
}
