#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kurepa/errors.hpp"
#include "kurepa/modmath.hpp"
#include "oracles.hpp"

using namespace kurepa;
using kurepa::testing::schoolbook_mulmod;

namespace {

// Exact nearest integer to u/p, u an integer-valued double below 2^104.
u128 exact_round_div(double u, u64 p) {
    int exp = 0;
    const double frac = std::frexp(u, &exp);
    u128 n = 0;
    if (u != 0) {
        const auto mant = static_cast<u64>(std::ldexp(frac, 53));
        n = exp >= 53 ? static_cast<u128>(mant) << (exp - 53) : static_cast<u128>(mant) >> (53 - exp);
    }
    return (n + p / 2) / p;
}

std::vector<u64> random_primes(std::mt19937_64& rng, std::size_t n, u64 lo, u64 hi) {
    std::uniform_int_distribution<u64> dist(lo, hi - 1);
    std::vector<u64> out;
    while (out.size() < n) {
        u64 c = dist(rng) | 1;
        if (c < hi && is_prime(c)) out.push_back(c);
    }
    return out;
}

} // namespace

TEST(Modulus, RejectsEvenSmallAndHuge) {
    EXPECT_THROW(Modulus(2), ArgumentError);
    EXPECT_THROW(Modulus(1), ArgumentError);
    EXPECT_THROW(Modulus(10), ArgumentError);
    EXPECT_THROW(Modulus(kModulusLimit + 1), ArgumentError);
    const Modulus m(7);
    EXPECT_EQ(m.plus_one(), 8.0);
    EXPECT_EQ(m.inv(), 1.0 / 7.0);
    EXPECT_TRUE(m.float51_compatible());
    EXPECT_FALSE(Modulus(17179869209ull).float51_compatible());  // first prime above 2^34
}

TEST(Float51Constants, RoundingConstantRoundsToNearest) {
    constexpr double c = Float51Constants::c;
    for (double x : {0.0, 0.4, 0.6, -0.6, 12345.49, 12345.51, 2251799813685247.0, -2251799813685247.0}) {
        volatile double t = x + c;
        EXPECT_EQ(t - c, std::nearbyint(x)) << x;
    }
}

TEST(FloatBackend, AvailableOnThisPlatform) { EXPECT_TRUE(float_backend_available()); }

TEST(MulmodRef, Examples) {
    EXPECT_EQ(mulmod_ref(10, 1, Modulus(7)), 3u);
    const u64 big = 17179869143ull;  // 2^34 - 41
    ASSERT_TRUE(kurepa::testing::trial_division_prime(big));
    const u64 a = u64(1) << 33;
    EXPECT_EQ(mulmod_ref(a, a, Modulus(big)), schoolbook_mulmod(a, a, big));
    // 2^34 = 41 (mod p), so 2^66 = 41 * 2^32 = 176093659136,
    // which reduces to 176093659136 - 10 * 17179869143 = 4294967706.
    EXPECT_EQ(mulmod_ref(a, a, Modulus(big)), 4294967706ull);
    EXPECT_EQ(mulmod_ref(0, 123456789, Modulus(big)), 0u);
}

TEST(MulmodRef, MatchesSchoolbookOracle) {
    std::mt19937_64 rng(11);
    const auto primes = random_primes(rng, 200, 3, kFloatModulusLimit);
    for (u64 p : primes) {
        std::uniform_int_distribution<u64> d(0, p - 1);
        const Modulus m(p);
        for (int t = 0; t < 200; ++t) {
            const u64 a = d(rng), b = d(rng);
            ASSERT_EQ(mulmod_ref(a, b, m), schoolbook_mulmod(a, b, p)) << a << "*" << b << " mod " << p;
        }
    }
}

TEST(RoundDiv, Examples) {
    EXPECT_EQ(round_div(0.0, Modulus(7)), 0.0);
    EXPECT_EQ(round_div(11.0 * 10.0, Modulus(7)), 16.0);
}

TEST(RoundDiv, WithinOneOfExactQuotient) {
    std::mt19937_64 rng(12);
    const auto primes = random_primes(rng, 1000, 3, kFloatModulusLimit);
    std::uniform_int_distribution<u64> md(0, (u64(1) << 47) - 1);
    for (int t = 0; t < 1000000; ++t) {
        const u64 p = primes[t % primes.size()];
        const Modulus m(p);
        const u64 s = std::uniform_int_distribution<u64>(0, 2 * p - 1)(rng);
        const double u = static_cast<double>(s) * static_cast<double>(md(rng));
        const double b = round_div(u, m);
        const double exact = static_cast<double>(exact_round_div(u, p));
        ASSERT_LE(std::fabs(b - exact), 1.0) << "u=" << u << " p=" << p;
    }
}

TEST(FmaMulmodOffset, Examples) {
    EXPECT_EQ(fma_mulmod_offset(1.0, 0.0, Modulus(7)), 8.0);
    const double r = fma_mulmod_offset(1.0, 10.0, Modulus(7));
    EXPECT_EQ(static_cast<u64>(r) % 7, 4u);
}

TEST(FmaMulmodOffset, CongruentAndBoundedOnRandomTriples) {
    std::mt19937_64 rng(13);
    auto primes = random_primes(rng, 1000, 3, kFloatModulusLimit);
    const auto small = random_primes(rng, 100, 3, 1000);
    primes.insert(primes.end(), small.begin(), small.end());
    std::uniform_int_distribution<u64> md(0, (u64(1) << 47) - 1);
    for (int t = 0; t < 1000000; ++t) {
        const u64 p = primes[t % primes.size()];
        const Modulus m(p);
        const u64 s = std::uniform_int_distribution<u64>(0, 2 * p - 1)(rng);
        const u64 mv = md(rng);
        const double r = fma_mulmod_offset(static_cast<double>(s), static_cast<double>(mv), m);
        ASSERT_EQ(r, std::floor(r));
        ASSERT_GT(r, 0.0);
        ASSERT_LT(r, 4.0 * static_cast<double>(p));
        // The kernel feeds the result back in as s, so it must also meet s < 2p.
        ASSERT_LT(r, 2.0 * static_cast<double>(p)) << "s=" << s << " m=" << mv << " p=" << p;
        const u64 expect = static_cast<u64>((static_cast<u128>(s) * mv + 1) % p);
        ASSERT_EQ(static_cast<u64>(r) % p, expect) << "s=" << s << " m=" << mv << " p=" << p;
    }
}

TEST(Powmod, Examples) {
    EXPECT_EQ(powmod(2, 0, Modulus(5)), 1u);
    EXPECT_EQ(powmod(2, 4, Modulus(5)), 1u);
    const u64 p = 9632267;
    u64 expect = 1;
    for (int i = 0; i < 5; ++i) expect = schoolbook_mulmod(expect, 6, p);
    EXPECT_EQ(powmod(6, 5, Modulus(p)), expect);
    EXPECT_EQ(expect, 7776u);
}

TEST(Powmod, FermatHoldsOnSampledPrimes) {
    std::mt19937_64 rng(14);
    for (u64 p : random_primes(rng, 300, 3, kModulusLimit)) {
        const Modulus m(p);
        std::uniform_int_distribution<u64> d(1, p - 1);
        for (int t = 0; t < 5; ++t) EXPECT_EQ(powmod(d(rng), p - 1, m), 1u) << p;
    }
}

TEST(IsPrime, AgreesWithTrialDivision) {
    for (u64 n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(n), kurepa::testing::trial_division_prime(n)) << n;
    // strong pseudoprimes to several small bases
    for (u64 n : {3215031751ull, 2152302898747ull, 3474749660383ull, 341550071728321ull})
        EXPECT_FALSE(is_prime(n)) << n;
    EXPECT_TRUE(is_prime(6855730873ull));
    EXPECT_TRUE(is_prime(18446744073709551557ull));
}
