#pragma once

// Generalized left factorial !^k n = (0!)^k + (1!)^k + ... + ((n-1)!)^k.

#include <cstdint>
#include <optional>

#include "kurepa/modmath.hpp"

namespace kurepa {

inline constexpr std::uint64_t kGenFactDefaultBound = 200000000;

struct GenFactResult {
    std::uint64_t k = 0;
    std::optional<std::uint64_t> p;  // smallest odd prime p <= bound with p | !^k p
    std::uint64_t bound = 0;
    bool minimal = false;            // every odd prime below p was excluded by computation
};

// !^k p mod p, each term (i! mod p)^k by powmod. Requires k >= 1.
u64 genfact_residue(u64 k, const Modulus& p);

// 3 for even k, 5 for k = 3 (mod 4), nothing for k = 1 (mod 4). Requires k >= 2.
std::optional<u64> shortcut_prime(u64 k);

// Smallest odd prime p <= bound dividing !^k p. Shortcut cases are confirmed by computing
// the residues at 3 and 5. Other k scan odd primes in ascending windows on `workers`
// threads; a hit is reported only once all smaller windows have been cleared.
GenFactResult smallest_divisor_prime(u64 k, u64 bound = kGenFactDefaultBound, unsigned workers = 1);

} // namespace kurepa
