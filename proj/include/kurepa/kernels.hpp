#pragma once

// Algorithms computing r_p = !p mod p, where !n = 0! + 1! + ... + (n-1)!.
//
// The four O(p) reference algorithms reduce after every multiplication. residue_fast pairs
// consecutive factorials, which leaves one multiplication per two terms:
//
//     s_1 = 1,   s_i = m_{i-1} s_{i-1} + 1,   m_{i-1} = (2i-2)(2i+1) = 4i^2 - 2i - 2,
//     r_p = 1 + 3 s_{(p-3)/2}  (mod p).
//
// The multiplier advances by m += k, k += 8 with k_{i-1} = 8i + 2, and between normalizations
// neither is reduced; only s is brought back below 2p at each step.

#include <cstdint>
#include <span>
#include <stop_token>
#include <string_view>
#include <vector>

#include "kurepa/modmath.hpp"

namespace kurepa {

enum class Backend { float51, exact128 };

inline constexpr u64 kDefaultChunk = 10000;

std::string_view to_string(Backend b) noexcept;
Backend parse_backend(std::string_view s);  // throws ArgumentError

struct ResidueRecord {
    u64 p = 0;
    u64 r_canonical = 0;  // [0, p)
    i64 r_signed = 0;     // [-(p-1)/2, (p-1)/2]

    static ResidueRecord from_canonical(u64 p, u64 r) noexcept {
        const i64 signed_r = r <= (p - 1) / 2 ? static_cast<i64>(r) : static_cast<i64>(r) - static_cast<i64>(p);
        return {p, r, signed_r};
    }
    static ResidueRecord from_signed(u64 p, i64 r) noexcept {
        const u64 canon = r >= 0 ? static_cast<u64>(r) : p - static_cast<u64>(-r);
        return {p, canon, r};
    }

    friend bool operator==(const ResidueRecord&, const ResidueRecord&) = default;
};

// State of the paired recurrence between chunks. Loop index i holds s = s_{i-1},
// m = m_{i-1} = 4i^2 - 2i - 2 and k = 8i + 2; one step produces s_i.
// At a chunk boundary s, m, k are all in [0, p).
struct KernelState {
    Modulus mod;
    u64 s = 0;
    u64 m = 0;
    u64 k = 0;
    u64 i = 1;

    // Index of the last s needed, (p-3)/2.
    u64 last_index() const noexcept { return (mod.value() - 3) / 2; }
    u64 remaining() const noexcept { return i > last_index() ? 0 : last_index() - i + 1; }

    friend bool operator==(const KernelState&, const KernelState&) = default;
};

// State at loop index i holding s_{i-1} = s (reduced mod p). Requires 1 <= i.
KernelState state_at(const Modulus& mod, u64 i, u64 s);

// s_1 = 1, m_1 = 10, k_1 = 18, i.e. state_at(mod, 2, 1).
KernelState initial_state(const Modulus& mod);

// Advances min(count, remaining) steps, then reduces s, m, k mod p. Long counts are split
// internally so the multiplier stays within the backend's operand bound.
// Throws ArgumentError for float51 with p >= 2^34.
KernelState step_chunk(KernelState state, Backend backend, u64 count);

// Largest chunk for which a float51 multiplier started below p stays below 2^47.
u64 max_float_chunk(u64 p) noexcept;

// r_p from a finished state (remaining() == 0): 1 + 3 s_{(p-3)/2} mod p.
ResidueRecord finish(const KernelState& state);

struct NaiveTrace {
    ResidueRecord record;
    u64 final_factorial;  // (p-1)! mod p; p-1 by Wilson's theorem
};

NaiveTrace residue_naive_traced(const Modulus& mod);
ResidueRecord residue_naive(const Modulus& mod);

// A_1 = 0, A_i = 1 - i A_{i-1}; r_p = A_{p-1}.
ResidueRecord residue_rec_a(const Modulus& mod);
// B_1 = 0, B_i = (-1)^i + i B_{i-1}; r_p = B_{p-1}.
ResidueRecord residue_rec_b(const Modulus& mod);
// C_1 = D_1 = 1, D_i = i D_{i-1}, C_i = C_{i-1} + D_{i-1}; r_p = C_p.
ResidueRecord residue_rec_cd(const Modulus& mod);

// Paired recurrence with deferred reduction. p = 3 is delegated to residue_naive.
// With float51, falls back to exact128 when float_backend_available() is false.
ResidueRecord residue_fast(const Modulus& mod, Backend backend = Backend::float51, u64 chunk = kDefaultChunk);

// residue_fast over many primes at once. The float51 route runs several primes in lockstep
// lanes; lanes are refilled as primes finish. Output order matches input order.
// Checks the stop token between chunks and throws Cancelled if a stop was requested.
std::vector<ResidueRecord> residue_fast_batch(std::span<const u64> primes, Backend backend = Backend::float51,
                                              u64 chunk = kDefaultChunk, std::stop_token stop = {});

// Recurrence steps residue_fast performs for p: (p-3)/2 for p >= 5.
inline u64 fast_iterations(u64 p) noexcept { return p >= 5 ? (p - 3) / 2 : 0; }

} // namespace kurepa
