#include "kurepa/genfact.hpp"

#include <optional>
#include <vector>

#include "kurepa/detail/ordered_pool.hpp"
#include "kurepa/errors.hpp"
#include "kurepa/sieve.hpp"

namespace kurepa {

namespace {

constexpr std::size_t kWindowPrimes = 256;

void check_k(u64 k, u64 min) {
    if (k < min) throw ArgumentError("exponent k must be at least " + std::to_string(min));
}

} // namespace

u64 genfact_residue(u64 k, const Modulus& mod) {
    check_k(k, 1);
    const u64 p = mod.value();
    u64 fact = 1;  // 0!
    u64 sum = 1;   // (0!)^k
    for (u64 i = 1; i < p; ++i) {
        fact = mulmod_ref(fact, i, mod);
        sum += powmod(fact, k, mod);
        if (sum >= p) sum -= p;
    }
    return sum;
}

std::optional<u64> shortcut_prime(u64 k) {
    check_k(k, 2);
    if (k % 2 == 0) return 3;
    if (k % 4 == 3) return 5;
    return std::nullopt;
}

GenFactResult smallest_divisor_prime(u64 k, u64 bound, unsigned workers) {
    check_k(k, 2);
    if (bound < 3) throw ArgumentError("bound must be at least 3");
    GenFactResult result{k, std::nullopt, bound, false};

    if (const auto sp = shortcut_prime(k)) {
        for (u64 q : {u64(3), u64(5)}) {
            if (q > *sp) break;
            if (genfact_residue(k, Modulus(q)) == 0) {
                result.p = q;
                result.minimal = true;
                return result;
            }
        }
        throw std::logic_error("shortcut prime does not divide !^k p");
    }

    PrimeBlockStream stream(3, bound + 1, kWindowPrimes);
    using Window = std::vector<u64>;
    auto next_job = [&]() -> std::optional<Window> {
        auto b = stream.next();
        if (!b) return std::nullopt;
        return std::move(b->primes);
    };
    auto work = [&](const Window& w, std::stop_token stop) -> std::optional<u64> {
        for (u64 q : w) {
            if (stop.stop_requested()) throw Cancelled();
            if (genfact_residue(k, Modulus(q)) == 0) return q;
        }
        return std::nullopt;
    };
    auto commit = [&](Window&&, std::optional<u64>&& hit) {
        if (!hit) return true;
        result.p = *hit;
        result.minimal = true;
        return false;
    };
    detail::run_ordered<Window, std::optional<u64>>(workers, next_job, work, commit);
    return result;
}

} // namespace kurepa
