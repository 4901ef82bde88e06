#include "kurepa/kernels.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "kurepa/errors.hpp"

namespace kurepa {

namespace {

constexpr u64 kExactMultiplierLimit = u64(1) << 62;

// Largest n >= 1 with n*p + 4n^2 <= limit: every multiplier in an n-step chunk started from
// m, k < p is below n*p + 4n^2.
u64 max_chunk_for(u64 p, u64 limit) noexcept {
    auto fits = [&](u64 n) {
        const u128 bound = static_cast<u128>(n) * p + static_cast<u128>(4) * n * n;
        return bound <= limit;
    };
    u64 lo = 1, hi = 1;
    while (fits(hi) && hi < (u64(1) << 40)) hi <<= 1;
    while (lo < hi) {
        const u64 mid = lo + (hi - lo + 1) / 2;
        if (fits(mid)) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

void check_float_modulus(const Modulus& mod) {
    if (!mod.float51_compatible())
        throw ArgumentError("float51 backend requires p < 2^34, got " + std::to_string(mod.value()));
}

Backend effective_backend(Backend requested) noexcept {
    if (requested == Backend::float51 && !float_backend_available()) return Backend::exact128;
    return requested;
}

void run_float(KernelState& st, u64 n) noexcept {
    double s = static_cast<double>(st.s);
    double m = static_cast<double>(st.m);
    double k = static_cast<double>(st.k);
    for (u64 j = 0; j < n; ++j) {
        s = fma_mulmod_offset(s, m, st.mod);
        m += k;
        k += 8.0;
    }
    const u64 p = st.mod.value();
    st.s = static_cast<u64>(s) % p;
    st.m = static_cast<u64>(m) % p;
    st.k = static_cast<u64>(k) % p;
    st.i += n;
}

void run_exact(KernelState& st, u64 n) noexcept {
    const u64 p = st.mod.value();
    u64 s = st.s, m = st.m, k = st.k;
    for (u64 j = 0; j < n; ++j) {
        s = static_cast<u64>((static_cast<u128>(s) * m + 1) % p);
        m += k;
        k += 8;
    }
    st.s = s;
    st.m = m % p;
    st.k = k % p;
    st.i += n;
}

} // namespace

std::string_view to_string(Backend b) noexcept { return b == Backend::float51 ? "float51" : "exact128"; }

Backend parse_backend(std::string_view s) {
    if (s == "float51") return Backend::float51;
    if (s == "exact128") return Backend::exact128;
    throw ArgumentError("unknown backend: " + std::string(s));
}

u64 max_float_chunk(u64 p) noexcept {
    return max_chunk_for(p, static_cast<u64>(Float51Constants::multiplier_limit));
}

KernelState state_at(const Modulus& mod, u64 i, u64 s) {
    if (i == 0) throw ArgumentError("kernel index starts at 1");
    const u64 p = mod.value();
    // m_{i-1} = 4i^2 - 2i - 2 = 2(i-1)(2i+1)
    const u64 a = static_cast<u64>((static_cast<u128>(2) * (i - 1)) % p);
    const u64 b = static_cast<u64>((static_cast<u128>(2) * i + 1) % p);
    const u64 k = static_cast<u64>((static_cast<u128>(8) * i + 2) % p);
    return KernelState{mod, s % p, mulmod_ref(a, b, mod), k, i};
}

KernelState initial_state(const Modulus& mod) { return state_at(mod, 2, 1); }

KernelState step_chunk(KernelState state, Backend backend, u64 count) {
    const Backend b = effective_backend(backend);
    if (backend == Backend::float51) check_float_modulus(state.mod);
    u64 todo = std::min(count, state.remaining());
    const u64 piece = b == Backend::float51 ? max_float_chunk(state.mod.value())
                                            : max_chunk_for(state.mod.value(), kExactMultiplierLimit);
    do {
        const u64 n = std::min(todo, piece);
        if (b == Backend::float51) run_float(state, n);
        else run_exact(state, n);
        todo -= n;
    } while (todo != 0);
    return state;
}

ResidueRecord finish(const KernelState& state) {
    const Modulus& mod = state.mod;
    const u64 p = mod.value();
    const u64 r = (1 + mulmod_ref(3, state.s % p, mod)) % p;
    return ResidueRecord::from_canonical(p, r);
}

NaiveTrace residue_naive_traced(const Modulus& mod) {
    const u64 p = mod.value();
    u64 fact = 1;  // 0!
    u64 sum = 1;
    for (u64 i = 1; i < p; ++i) {
        fact = mulmod_ref(fact, i, mod);
        sum += fact;
        if (sum >= p) sum -= p;
    }
    return {ResidueRecord::from_canonical(p, sum), fact};
}

ResidueRecord residue_naive(const Modulus& mod) { return residue_naive_traced(mod).record; }

ResidueRecord residue_rec_a(const Modulus& mod) {
    const u64 p = mod.value();
    u64 a = 0;
    for (u64 i = 2; i <= p - 1; ++i) {
        const u64 t = mulmod_ref(i, a, mod);
        a = t <= 1 ? 1 - t : p + 1 - t;
    }
    return ResidueRecord::from_canonical(p, a);
}

ResidueRecord residue_rec_b(const Modulus& mod) {
    const u64 p = mod.value();
    u64 b = 0;
    for (u64 i = 2; i <= p - 1; ++i) {
        b = mulmod_ref(i, b, mod);
        if (i % 2 == 0) b = b + 1 == p ? 0 : b + 1;
        else b = b == 0 ? p - 1 : b - 1;
    }
    return ResidueRecord::from_canonical(p, b);
}

ResidueRecord residue_rec_cd(const Modulus& mod) {
    const u64 p = mod.value();
    u64 c = 1, d = 1;
    for (u64 i = 2; i <= p; ++i) {
        c += d;
        if (c >= p) c -= p;
        d = mulmod_ref(i % p, d, mod);
    }
    return ResidueRecord::from_canonical(p, c);
}

ResidueRecord residue_fast(const Modulus& mod, Backend backend, u64 chunk) {
    if (chunk == 0) throw ArgumentError("chunk must be at least 1");
    if (backend == Backend::float51) check_float_modulus(mod);
    if (mod.value() == 3) return residue_naive(mod);
    KernelState st = initial_state(mod);
    while (st.remaining() != 0) st = step_chunk(st, backend, chunk);
    return finish(st);
}

namespace {

// Lockstep float kernel over kLanes primes. Idle lanes carry a dummy modulus and are
// reset every round.
constexpr int kLanes = 32;

struct alignas(64) LaneBlock {
    std::array<double, kLanes> s, m, k, p, g, p1;
};

void run_lanes(LaneBlock& lb, u64 n) noexcept {
    constexpr double c = Float51Constants::c;
    for (u64 j = 0; j < n; ++j) {
#pragma GCC ivdep
        for (int l = 0; l < kLanes; ++l) {
            const double s = lb.s[l], m = lb.m[l];
            const double u = s * m;
            const double b = std::fma(u, lb.g[l], c) - c;
            lb.s[l] = lb.p1[l] + std::fma(s, m, -u) - std::fma(lb.p[l], b, -u);
            lb.m[l] = m + lb.k[l];
            lb.k[l] += 8.0;
        }
    }
}

std::vector<ResidueRecord> batch_float(std::span<const u64> primes, u64 chunk, const std::stop_token& stop) {
    std::vector<ResidueRecord> out(primes.size());
    u64 pmax = 3;
    for (u64 p : primes) pmax = std::max(pmax, p);
    const u64 step = std::min(chunk, max_float_chunk(pmax));

    struct Lane {
        bool active = false;
        size_t index = 0;
        u64 remaining = 0;
    };
    std::array<Lane, kLanes> lanes{};
    LaneBlock lb{};
    size_t next = 0;

    auto park = [&](int l) {
        lanes[l].active = false;
        lb.s[l] = 0.0;
        lb.m[l] = 0.0;
        lb.k[l] = 0.0;
        lb.p[l] = 7.0;
        lb.g[l] = 1.0 / 7.0;
        lb.p1[l] = 8.0;
    };
    auto refill = [&](int l) {
        while (next < primes.size()) {
            const size_t idx = next++;
            const Modulus mod(primes[idx]);
            check_float_modulus(mod);
            if (mod.value() == 3) {
                out[idx] = residue_naive(mod);
                continue;
            }
            const KernelState st = initial_state(mod);
            if (st.remaining() == 0) {
                out[idx] = finish(st);
                continue;
            }
            lanes[l] = {true, idx, st.remaining()};
            lb.s[l] = static_cast<double>(st.s);
            lb.m[l] = static_cast<double>(st.m);
            lb.k[l] = static_cast<double>(st.k);
            lb.p[l] = mod.as_double();
            lb.g[l] = mod.inv();
            lb.p1[l] = mod.plus_one();
            return;
        }
        park(l);
    };

    for (int l = 0; l < kLanes; ++l) refill(l);
    for (;;) {
        u64 n = step;
        bool any = false;
        for (const Lane& ln : lanes) {
            if (!ln.active) continue;
            any = true;
            n = std::min(n, ln.remaining);
        }
        if (!any) break;
        if (stop.stop_requested()) throw Cancelled();

        run_lanes(lb, n);

        for (int l = 0; l < kLanes; ++l) {
            Lane& ln = lanes[l];
            if (!ln.active) {
                park(l);
                continue;
            }
            const u64 p = primes[ln.index];
            lb.s[l] = static_cast<double>(static_cast<u64>(lb.s[l]) % p);
            lb.m[l] = static_cast<double>(static_cast<u64>(lb.m[l]) % p);
            lb.k[l] = static_cast<double>(static_cast<u64>(lb.k[l]) % p);
            ln.remaining -= n;
            if (ln.remaining == 0) {
                const Modulus mod(p);
                KernelState st{mod, static_cast<u64>(lb.s[l]), 0, 0, 0};
                out[ln.index] = finish(st);
                refill(l);
            }
        }
    }
    return out;
}

} // namespace

std::vector<ResidueRecord> residue_fast_batch(std::span<const u64> primes, Backend backend, u64 chunk,
                                              std::stop_token stop) {
    if (chunk == 0) throw ArgumentError("chunk must be at least 1");
    if (effective_backend(backend) == Backend::float51) return batch_float(primes, chunk, stop);
    std::vector<ResidueRecord> out;
    out.reserve(primes.size());
    for (u64 p : primes) {
        const Modulus mod(p);
        if (p == 3) {
            out.push_back(residue_naive(mod));
            continue;
        }
        KernelState st = initial_state(mod);
        while (st.remaining() != 0) {
            if (stop.stop_requested()) throw Cancelled();
            st = step_chunk(st, backend, chunk);
        }
        out.push_back(finish(st));
    }
    return out;
}

} // namespace kurepa
