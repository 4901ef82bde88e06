#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace kurepa {

inline constexpr std::uint64_t kSieveLimit = std::uint64_t(1) << 40;
inline constexpr std::size_t kDefaultSegment = std::size_t(1) << 22;
inline constexpr std::size_t kDefaultBlockSize = 262144;

struct PrimeBlock {
    std::uint64_t lo = 0;  // inclusive
    std::uint64_t hi = 0;  // exclusive
    std::vector<std::uint64_t> primes;
};

// All primes in [lo, hi) by a segmented sieve of Eratosthenes over odd numbers.
// Throws ArgumentError unless lo <= hi <= 2^40.
PrimeBlock primes_in(std::uint64_t lo, std::uint64_t hi, std::size_t segment = kDefaultSegment);

// Lazily yields consecutive blocks of at most block_size primes covering [lo, hi).
// Block bounds are tight: a block's [lo, hi) starts at the range start
// (or one past the previous block's last prime) and ends one past its own last prime,
// except the final block, which ends at hi.
class PrimeBlockStream {
public:
    PrimeBlockStream(std::uint64_t lo, std::uint64_t hi, std::size_t block_size,
                     std::size_t segment = kDefaultSegment);

    std::optional<PrimeBlock> next();

    // Skips n blocks; returns how many were actually skipped.
    std::size_t skip(std::size_t n);

private:
    bool fill();

    std::uint64_t lo_, hi_;
    std::size_t block_size_, segment_;
    std::shared_ptr<const std::vector<std::uint32_t>> base_;
    std::uint64_t cursor_;  // next unsieved value
    std::uint64_t block_start_;
    std::vector<std::uint64_t> pending_;
    std::size_t pending_pos_ = 0;
};

// Convenience wrapper that materializes the stream.
std::vector<PrimeBlock> blocks_of(std::uint64_t lo, std::uint64_t hi, std::size_t block_size);

} // namespace kurepa
