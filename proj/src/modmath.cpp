#include "kurepa/modmath.hpp"

#include <cfenv>
#include <string>

#include "kurepa/errors.hpp"

namespace kurepa {

Modulus::Modulus(u64 p) : p_(p) {
    if (p < 3 || p % 2 == 0 || p >= kModulusLimit)
        throw ArgumentError("modulus must be an odd integer in [3, 2^40), got " + std::to_string(p));
    KUREPA_EXPECTS(is_prime(p));
    inv_p_ = 1.0 / static_cast<double>(p);
    p_plus_1_ = static_cast<double>(p + 1);
}

u64 powmod(u64 a, u64 e, const Modulus& m) noexcept {
    KUREPA_EXPECTS(a < m.value());
    u64 r = 1 % m.value();
    u64 base = a;
    while (e != 0) {
        if (e & 1) r = mulmod_ref(r, base, m);
        base = mulmod_ref(base, base, m);
        e >>= 1;
    }
    return r;
}

namespace {

u64 mulmod_any(u64 a, u64 b, u64 n) { return static_cast<u64>((static_cast<u128>(a) * b) % n); }

u64 powmod_any(u64 a, u64 e, u64 n) {
    u64 r = 1;
    a %= n;
    while (e != 0) {
        if (e & 1) r = mulmod_any(r, a, n);
        a = mulmod_any(a, a, n);
        e >>= 1;
    }
    return r;
}

bool probe_float_environment() noexcept {
    if (std::fegetround() != FE_TONEAREST) return false;
    // (2^27 + 1)^2 = 2^54 + 2^28 + 1 is not representable; a fused operation recovers the
    // dropped low bit, a split multiply-then-add does not.
    volatile double a = 134217729.0;
    const double prod = a * a;
    const double err = std::fma(a, a, -prod);
    if (err != 1.0) return false;
    // The rounding constant must map x to rint(x).
    volatile double x = 12345.5;
    const double r = (x + Float51Constants::c) - Float51Constants::c;
    return r == 12346.0;
}

} // namespace

bool is_prime(u64 n) noexcept {
    if (n < 2) return false;
    for (u64 q : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These bases are a deterministic witness set below 3.3 * 10^24.
    for (u64 a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        u64 x = powmod_any(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_any(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

bool float_backend_available() noexcept {
    static const bool available = probe_float_environment();
    return available;
}

} // namespace kurepa
