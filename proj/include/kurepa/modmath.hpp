#pragma once

// Modular arithmetic backends shared by the residue kernels.
//
// Two routes to (a*b) mod p are provided:
//   * an exact route through a 128-bit intermediate product (mulmod_ref), used as the
//     reference everywhere and as the arithmetic of the exact128 kernel backend;
//   * a floating-point route in which integers below 2^51 live in doubles and the
//     quotient is recovered by multiplying with a precomputed reciprocal. Two fused
//     multiply-adds give the exact remainder of the 104-bit product without branching.

#include <cmath>
#include <cstdint>

#ifndef NDEBUG
#include <cassert>
#define KUREPA_EXPECTS(cond) assert(cond)
#else
#define KUREPA_EXPECTS(cond) ((void)0)
#endif

namespace kurepa {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Largest modulus accepted by the floating-point backend (exclusive).
inline constexpr u64 kFloatModulusLimit = u64(1) << 34;
// Largest modulus accepted anywhere in the library (exclusive); matches the sieve range.
inline constexpr u64 kModulusLimit = u64(1) << 40;

struct Float51Constants {
    // operand bound h
    static constexpr double h = 2251799813685248.0;                     // 2^51
    // rounding constant c; c + x - c == rint(x) for |x| < 2^51
    static constexpr double c = 2251799813685248.0 + 4503599627370496.0; // 2^51 + 2^52
    // multiplier bound used when scheduling deferred reductions
    static constexpr double multiplier_limit = 140737488355328.0;        // 2^47
};

static_assert(Float51Constants::c == 6755399441055744.0);

class Modulus {
public:
    // Throws ArgumentError unless p is odd and 3 <= p < kModulusLimit.
    // Debug builds additionally check primality.
    explicit Modulus(u64 p);

    u64 value() const noexcept { return p_; }
    double as_double() const noexcept { return static_cast<double>(p_); }
    double inv() const noexcept { return inv_p_; }           // fl(1/p)
    double plus_one() const noexcept { return p_plus_1_; }    // p + 1, exact
    bool float51_compatible() const noexcept { return p_ < kFloatModulusLimit; }

    friend bool operator==(const Modulus& a, const Modulus& b) noexcept { return a.p_ == b.p_; }

private:
    u64 p_;
    double inv_p_;
    double p_plus_1_;
};

// (a*b) mod p with an exact double-width product. Requires a, b < 2^63.
inline u64 mulmod_ref(u64 a, u64 b, const Modulus& m) noexcept {
    KUREPA_EXPECTS(a < (u64(1) << 63) && b < (u64(1) << 63));
    const u64 p = m.value();
    if ((a | b) >> 32 == 0) return (a * b) % p;
    return static_cast<u64>((static_cast<u128>(a) * b) % p);
}

// a^e mod p by left-to-right square-and-multiply. Requires a < p.
u64 powmod(u64 a, u64 e, const Modulus& m) noexcept;

// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime(u64 n) noexcept;

// Nearest-integer approximation of u/p: FMA(u, g, c) - c.
// Within 1 of round(u/p) whenever u/p < 2^51.
inline double round_div(double u, const Modulus& m) noexcept {
    constexpr double c = Float51Constants::c;
    return std::fma(u, m.inv(), c) - c;
}

// Returns a value congruent to s*m_val + 1 (mod p) in (0, 2p), branch-free.
// Requires s < 2p, m_val < 2^47, p < 2^34, all nonnegative integers.
//
// u = fl(s*m) and FMA(s, m, -u) is the exact rounding error of that product; FMA(p, b, -u)
// is exact because p*b is within a few p of u. The sum p+1 + (s*m - u) - (p*b - u) therefore
// equals s*m - p*(b-1) + 1 exactly.
inline double fma_mulmod_offset(double s, double m_val, const Modulus& m) noexcept {
    const double u = s * m_val;
    const double b = round_div(u, m);
    return m.plus_one() + std::fma(s, m_val, -u) - std::fma(m.as_double(), b, -u);
}

// Environment probe: the float backend needs round-to-nearest and a single-rounding FMA.
// Evaluated once, at first call.
bool float_backend_available() noexcept;

} // namespace kurepa
