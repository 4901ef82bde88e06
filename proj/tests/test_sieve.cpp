#include <random>

#include <gtest/gtest.h>

#include "kurepa/errors.hpp"
#include "kurepa/modmath.hpp"
#include "kurepa/sieve.hpp"
#include "oracles.hpp"

using namespace kurepa;
using kurepa::testing::trial_division_primes;

TEST(PrimesIn, Examples) {
    const auto b = primes_in(0, 100);
    EXPECT_EQ(b.primes.size(), 25u);
    EXPECT_EQ(b.primes.back(), 97u);
    EXPECT_EQ(b.primes, trial_division_primes(0, 100));
    EXPECT_TRUE(primes_in(90, 97).primes.empty());
    EXPECT_EQ(primes_in(2, 3).primes, (std::vector<std::uint64_t>{2}));
    EXPECT_TRUE(primes_in(5, 5).primes.empty());
}

TEST(PrimesIn, RejectsBadRanges) {
    EXPECT_THROW(primes_in(10, 5), ArgumentError);
    EXPECT_THROW(primes_in(0, kSieveLimit + 1), ArgumentError);
}

TEST(PrimesIn, CountBelowMillion) { EXPECT_EQ(primes_in(0, 1000000).primes.size(), 78498u); }

TEST(PrimesIn, MatchesTrialDivisionAcrossSegments) {
    // tiny segments force many segment boundaries
    for (auto [lo, hi] : {std::pair<std::uint64_t, std::uint64_t>{0, 5000}, {1, 2}, {3, 4}, {4, 4099}, {9973, 20011}}) {
        EXPECT_EQ(primes_in(lo, hi, 16).primes, trial_division_primes(lo, hi)) << lo << " " << hi;
        EXPECT_EQ(primes_in(lo, hi).primes, trial_division_primes(lo, hi)) << lo << " " << hi;
    }
}

TEST(PrimesIn, HighRangeIsPrimeAndAscending) {
    const std::uint64_t lo = (std::uint64_t(1) << 40) - 200000;
    const auto b = primes_in(lo, std::uint64_t(1) << 40);
    ASSERT_FALSE(b.primes.empty());
    std::mt19937_64 rng(31);
    for (std::size_t i = 0; i < b.primes.size(); ++i) {
        ASSERT_GE(b.primes[i], lo);
        if (i) ASSERT_LT(b.primes[i - 1], b.primes[i]);
    }
    for (int t = 0; t < 200; ++t) {
        const auto p = b.primes[std::uniform_int_distribution<std::size_t>(0, b.primes.size() - 1)(rng)];
        EXPECT_TRUE(is_prime(p)) << p;
    }
    // Miller-Rabin count over the same window
    std::size_t count = 0;
    for (std::uint64_t n = lo | 1; n < (std::uint64_t(1) << 40); n += 2) count += is_prime(n);
    EXPECT_EQ(count, b.primes.size());
}

TEST(BlocksOf, Examples) {
    const auto blocks = blocks_of(0, 30, 4);
    ASSERT_EQ(blocks.size(), 3u);
    EXPECT_EQ(blocks[0].primes, (std::vector<std::uint64_t>{2, 3, 5, 7}));
    EXPECT_EQ(blocks[1].primes, (std::vector<std::uint64_t>{11, 13, 17, 19}));
    EXPECT_EQ(blocks[2].primes, (std::vector<std::uint64_t>{23, 29}));
    EXPECT_EQ(blocks[0].lo, 0u);
    EXPECT_EQ(blocks[2].hi, 30u);
    EXPECT_EQ(blocks[1].lo, blocks[0].hi);
    EXPECT_TRUE(blocks_of(0, 2, 5).empty());
    EXPECT_THROW(blocks_of(0, 10, 0), ArgumentError);
}

TEST(BlocksOf, ConcatenationEqualsRange) {
    const std::uint64_t lo = 1000000, hi = 1010000;
    const auto all = primes_in(lo, hi).primes;
    for (std::size_t k : {1u, 7u, 100u, 5000u}) {
        std::vector<std::uint64_t> cat;
        std::uint64_t expect_lo = lo;
        for (const auto& b : blocks_of(lo, hi, k)) {
            EXPECT_LE(b.primes.size(), k);
            EXPECT_EQ(b.lo, expect_lo);
            for (auto p : b.primes) EXPECT_TRUE(p >= b.lo && p < b.hi);
            expect_lo = b.hi;
            cat.insert(cat.end(), b.primes.begin(), b.primes.end());
        }
        EXPECT_EQ(expect_lo, hi);
        EXPECT_EQ(cat, all) << k;
    }
}

TEST(PrimeBlockStream, SkipAndSmallSegments) {
    PrimeBlockStream a(0, 100000, 100, 64);
    EXPECT_EQ(a.skip(5), 5u);
    const auto sixth = a.next();
    const auto blocks = blocks_of(0, 100000, 100);
    ASSERT_TRUE(sixth.has_value());
    EXPECT_EQ(sixth->primes, blocks[5].primes);
    PrimeBlockStream b(0, 100, 10);
    EXPECT_EQ(b.skip(100), 3u);
    EXPECT_FALSE(b.next().has_value());
}
