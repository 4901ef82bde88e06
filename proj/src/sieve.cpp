#include "kurepa/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kurepa/errors.hpp"

namespace kurepa {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::vector<std::uint32_t> simple_sieve(std::uint32_t limit) {
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = std::uint64_t(i) * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

void check_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi || hi > kSieveLimit)
        throw ArgumentError("prime range must satisfy lo <= hi <= 2^40, got [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + ")");
}

// Appends the primes of [lo, hi) to out; flags cover odd numbers only.
void sieve_segment(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint32_t>& base,
                   std::vector<std::uint8_t>& flags, std::vector<std::uint64_t>& out) {
    if (lo >= hi) return;
    if (lo <= 2 && hi > 2) out.push_back(2);
    std::uint64_t first = std::max<std::uint64_t>(lo, 3) | 1;
    if (first >= hi) return;
    const std::size_t n = static_cast<std::size_t>((hi - first + 1) / 2);
    flags.assign(n, 1);
    for (std::uint32_t q : base) {
        if (q == 2) continue;
        const std::uint64_t qq = std::uint64_t(q) * q;
        if (qq >= hi) break;
        std::uint64_t start = std::max(qq, (first + q - 1) / q * q);
        if (start % 2 == 0) start += q;
        for (std::uint64_t j = (start - first) / 2; j < n; j += q) flags[j] = 0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (flags[j]) {
            out.push_back(first + 2 * j);
        }
    }
}

} // namespace

PrimeBlock primes_in(std::uint64_t lo, std::uint64_t hi, std::size_t segment) {
    check_range(lo, hi);
    if (segment < 2) throw ArgumentError("segment size must be at least 2");
    const auto base = simple_sieve(static_cast<std::uint32_t>(isqrt(hi == 0 ? 0 : hi - 1)));
    PrimeBlock block{lo, hi, {}};
    std::vector<std::uint8_t> flags;
    const std::uint64_t span = 2 * static_cast<std::uint64_t>(segment);
    for (std::uint64_t a = lo; a < hi;) {
        const std::uint64_t b = hi - a > span ? a + span : hi;
        sieve_segment(a, b, base, flags, block.primes);
        a = b;
    }
    return block;
}

PrimeBlockStream::PrimeBlockStream(std::uint64_t lo, std::uint64_t hi, std::size_t block_size, std::size_t segment)
    : lo_(lo), hi_(hi), block_size_(block_size), segment_(segment), cursor_(lo), block_start_(lo) {
    check_range(lo, hi);
    if (block_size == 0) throw ArgumentError("block size must be at least 1");
    if (segment < 2) throw ArgumentError("segment size must be at least 2");
    base_ = std::make_shared<const std::vector<std::uint32_t>>(
        simple_sieve(static_cast<std::uint32_t>(isqrt(hi == 0 ? 0 : hi - 1))));
}

bool PrimeBlockStream::fill() {
    if (pending_pos_ > 0) {
        pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(pending_pos_));
        pending_pos_ = 0;
    }
    if (cursor_ >= hi_) return false;
    std::vector<std::uint8_t> flags;
    const std::uint64_t span = 2 * static_cast<std::uint64_t>(segment_);
    const std::uint64_t b = hi_ - cursor_ > span ? cursor_ + span : hi_;
    sieve_segment(cursor_, b, *base_, flags, pending_);
    cursor_ = b;
    return true;
}

std::optional<PrimeBlock> PrimeBlockStream::next() {
    // One prime of lookahead tells whether this block is the last one.
    while (pending_.size() - pending_pos_ <= block_size_ && fill()) {}
    const std::size_t avail = pending_.size() - pending_pos_;
    if (avail == 0) return std::nullopt;
    const std::size_t take = std::min(avail, block_size_);
    PrimeBlock block;
    block.lo = block_start_;
    const auto first = pending_.begin() + static_cast<std::ptrdiff_t>(pending_pos_);
    block.primes.assign(first, first + static_cast<std::ptrdiff_t>(take));
    pending_pos_ += take;
    const bool last = pending_.size() == pending_pos_;
    block.hi = last ? hi_ : block.primes.back() + 1;
    block_start_ = block.hi;
    return block;
}

std::size_t PrimeBlockStream::skip(std::size_t n) {
    std::size_t done = 0;
    while (done < n && next()) ++done;
    return done;
}

std::vector<PrimeBlock> blocks_of(std::uint64_t lo, std::uint64_t hi, std::size_t block_size) {
    PrimeBlockStream stream(lo, hi, block_size);
    std::vector<PrimeBlock> out;
    while (auto b = stream.next()) out.push_back(std::move(*b));
    return out;
}

} // namespace kurepa
