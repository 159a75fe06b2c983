#include <gtest/gtest.h>

#include <cstdlib>

#include "carmex/sieve.hpp"
#include "oracles.hpp"

using namespace carmex;

TEST(PrimeSieve, CountsAndMembership) {
    const PrimeSieve s(1'000'000);
    EXPECT_EQ(s.primes().size(), 78498u);
    EXPECT_EQ(s.primes().front(), 2u);
    EXPECT_EQ(s.primes().back(), 999983u);
    for (natural n = 0; n <= 20'000; ++n) ASSERT_EQ(s.contains_prime(n), oracle::prime_by_trial(n)) << n;
    EXPECT_THROW(s.contains_prime(1'000'001), std::out_of_range);
}

TEST(PrimeSieve, TinyLimits) {
    EXPECT_EQ(PrimeSieve(0).primes(), (std::vector<natural>{2}));
    EXPECT_EQ(PrimeSieve(10).primes(), (std::vector<natural>{2, 3, 5, 7}));
    EXPECT_EQ(PrimeSieve(11).primes().back(), 11u);
}

TEST(PrimeSieve, SharedSieveUsesDefaultBound) {
    EXPECT_EQ(shared_sieve().limit(), kDefaultSieveLimit);
}

TEST(PrimeSieve, EnvironmentOverride) {
    ::setenv("CARMEX_SIEVE_LIMIT", "20000", 1);
    EXPECT_EQ(sieve_limit_from_env(), 20000u);
    ::setenv("CARMEX_SIEVE_LIMIT", "12x", 1);
    EXPECT_THROW(sieve_limit_from_env(), std::invalid_argument);
    ::setenv("CARMEX_SIEVE_LIMIT", "5", 1);
    EXPECT_THROW(sieve_limit_from_env(), std::invalid_argument);
    ::unsetenv("CARMEX_SIEVE_LIMIT");
    EXPECT_EQ(sieve_limit_from_env(), kDefaultSieveLimit);
}

TEST(SegmentedSieve, HalfOpenInterval) {
    EXPECT_EQ(primes_in(10, 30), (std::vector<natural>{11, 13, 17, 19, 23, 29}));
    EXPECT_EQ(primes_in(11, 13), (std::vector<natural>{13}));
    EXPECT_TRUE(primes_in(24, 28).empty());
    EXPECT_TRUE(primes_in(30, 10).empty());
    EXPECT_EQ(primes_in(0, 3), (std::vector<natural>{2, 3}));
}

TEST(SegmentedSieve, AgreesWithFullSieveAcrossSegments) {
    const PrimeSieve s(1'000'000);
    std::vector<natural> expected;
    for (natural p : s.primes())
        if (p > 123'456) expected.push_back(p);
    EXPECT_EQ(primes_in(123'456, 1'000'000), expected);
}

TEST(SegmentedSieve, HighWindowMatchesMillerRabin) {
    const natural lo = 999'999'999'000'000ULL, hi = lo + 300'000;
    std::vector<natural> expected;
    for (natural n = lo + 1; n <= hi; ++n)
        if (is_prime(n)) expected.push_back(n);
    EXPECT_EQ(primes_in(lo, hi), expected);
}
