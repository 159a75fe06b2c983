#include <gtest/gtest.h>

#include "carmex/largeprime.hpp"

using namespace carmex;

namespace {

std::vector<natural> numbers(const std::vector<CarmichaelRecord>& rs) {
    std::vector<natural> out;
    for (const auto& r : rs) out.push_back(r.n);
    return out;
}

}  // namespace

TEST(ScanPrime, Examples) {
    std::vector<CarmichaelRecord> out;
    scan_prime(17, 10'000, out);
    EXPECT_EQ(numbers(out), (std::vector<natural>{561, 1105}));
    out.clear();
    scan_prime(704988733, 994018226608901845ULL, out);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].n, 994018226608901845ULL);
    EXPECT_EQ(out[0].primes, (std::vector<natural>{5, 13, 1733, 12517, 704988733}));
}

TEST(ScanPrime, FactorCountWindow) {
    std::vector<CarmichaelRecord> out;
    scan_prime(704988733, 994018226608901845ULL, out, 3, 4);
    EXPECT_TRUE(out.empty());
}

TEST(Scan, RangeExamples) {
    EXPECT_EQ(numbers(scan({10, 100, 10'000})), (std::vector<natural>{561, 1105, 1729, 2465, 2821, 6601, 8911}));
    EXPECT_EQ(numbers(scan({17, 100, 10'000})), (std::vector<natural>{1729, 2465, 2821, 6601, 8911}));
    EXPECT_THROW(scan({50, 50, 10'000}), std::invalid_argument);
    EXPECT_THROW(scan({10, 101, 10'000}), std::invalid_argument);
    EXPECT_EQ(ScanRange({10, 100, 10'000}).id(), "lp:10-100");
}

TEST(Scan, ProgressionCongruence) {
    for (const auto& r : scan({100, 3162, 10'000'000})) {
        const natural p = r.largest_prime();
        ASSERT_EQ(r.n % (p * (p - 1)), p) << r.n;
        ASSERT_GT(p, 100u);
    }
}

TEST(Scan, SplitCoversRangeWithoutOverlap) {
    const ScanRange whole{1000, 31622, 1'000'000'000};
    const auto pieces = split_scan_range(whole, 16);
    ASSERT_FALSE(pieces.empty());
    EXPECT_EQ(pieces.front().p_lo, whole.p_lo);
    EXPECT_EQ(pieces.back().p_hi, whole.p_hi);
    for (std::size_t i = 1; i < pieces.size(); ++i) EXPECT_EQ(pieces[i].p_lo, pieces[i - 1].p_hi);
    std::vector<CarmichaelRecord> joined;
    for (const auto& piece : pieces) {
        auto part = scan(piece);
        joined.insert(joined.end(), part.begin(), part.end());
    }
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(joined, scan(whole));
    EXPECT_EQ(split_scan_range({5, 7, 100}, 64).size(), 2u);
}

TEST(Properties, SplitBoundaryPartitionsTheSpace) {
    const natural X = 10'000'000;
    const natural root = isqrt(X);
    SearchConfig reference_cfg;
    reference_cfg.limit = X;
    reference_cfg.split = root;
    const auto reference = enumerate_all(reference_cfg);
    for (natural b : {10ULL, 100ULL, 1000ULL, 3000ULL}) {
        SearchConfig cfg = reference_cfg;
        cfg.split = b;
        auto tree = enumerate_all(cfg);
        for (const auto& r : tree) ASSERT_LE(r.largest_prime(), b);
        auto big = scan({b, root, X});
        for (const auto& r : big) ASSERT_GT(r.largest_prime(), b);
        tree.insert(tree.end(), big.begin(), big.end());
        std::sort(tree.begin(), tree.end());
        EXPECT_EQ(tree, reference) << "B=" << b;
    }
}
