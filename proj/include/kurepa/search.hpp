#pragma once

// Range scanner: every odd prime in [lo, hi) gets its residue; small residues and
// counterexamples (r_p = 0) are collected, progress is checkpointed after each committed block.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stop_token>
#include <vector>

#include "kurepa/kernels.hpp"
#include "kurepa/sieve.hpp"
#include "kurepa/store.hpp"

namespace kurepa {

// Above this bound scans keep only small residues unless record_all is set explicitly.
inline constexpr std::uint64_t kRecordAllDefaultLimit = 100000000;

struct ScanConfig {
    std::uint64_t lo = 3;
    std::uint64_t hi = 0;
    std::uint64_t threshold = 100;  // report |r_signed| < threshold
    std::size_t block_size = kDefaultBlockSize;
    std::uint64_t chunk = kDefaultChunk;
    unsigned workers = 1;
    Backend backend = Backend::float51;
    std::filesystem::path checkpoint_path;  // empty: no checkpointing
    std::filesystem::path records_path;     // empty: nothing persisted
    RecordFormat records_format = RecordFormat::csv;
    std::optional<bool> record_all;         // unset: hi <= kRecordAllDefaultLimit

    bool resolved_record_all() const noexcept { return record_all.value_or(hi <= kRecordAllDefaultLimit); }
    // Throws ArgumentError.
    void validate() const;
};

// Durable scan progress. Everything except `workers` of the config is echoed so a resume can
// reject a checkpoint that belongs to another scan.
struct ScanCheckpoint {
    ScanConfig config;
    std::uint64_t next_block_index = 0;
    std::uint64_t completed = 0;
    std::uint64_t digest = 0;
    bool complete = false;
    std::uint64_t primes_tested = 0;
    std::uint64_t iterations = 0;
    std::uint64_t records_bytes = 0;
    std::uint64_t records_count = 0;
    std::vector<ResidueRecord> small_residues;
    std::vector<std::uint64_t> counterexamples;
};

inline constexpr std::string_view kCheckpointMagic = "KSCAN1";

// Writes to a sibling temporary file and renames it into place. Throws IoError.
void write_checkpoint(const std::filesystem::path& path, const ScanCheckpoint& ckpt);
// Throws IoError or FormatError (with the offending line number).
ScanCheckpoint read_checkpoint(const std::filesystem::path& path);

// True when two configs describe the same scan (workers excluded).
bool same_scan(const ScanConfig& a, const ScanConfig& b) noexcept;

// FNV-1a over the little-endian bytes of (p, r_canonical), records in ascending p.
inline constexpr std::uint64_t kDigestSeed = 0xcbf29ce484222325ull;
std::uint64_t digest_update(std::uint64_t digest, const ResidueRecord& r) noexcept;
std::uint64_t digest_of(std::span<const ResidueRecord> records) noexcept;

struct ScanSummary {
    std::uint64_t primes_tested = 0;
    std::vector<std::uint64_t> counterexamples;
    std::vector<ResidueRecord> small_residues;
    double elapsed = 0.0;                 // this session, wall seconds
    double iterations_per_second = 0.0;   // this session
    std::uint64_t digest = kDigestSeed;
    std::uint64_t blocks_completed = 0;
    std::uint64_t primes_tested_this_session = 0;
    bool complete = false;
};

struct ScanProgress {
    std::uint64_t blocks_completed = 0;
    std::uint64_t primes_tested = 0;
    std::uint64_t last_prime = 0;
};

struct ScanHooks {
    // Replaces residue_fast_batch(primes, backend, chunk, stop).
    std::function<std::vector<ResidueRecord>(std::span<const std::uint64_t>, std::stop_token)> kernel;
    // Runs after each committed block and its checkpoint; returning false interrupts the scan.
    std::function<bool(const ScanProgress&)> on_block;
    // Progress lines, each prefixed with '#'.
    std::ostream* log = nullptr;
};

// Scans config.[lo, hi). If config.checkpoint_path names an existing checkpoint of the same
// scan, continues from it; a checkpoint of a different scan raises CheckpointMismatch.
ScanSummary scan(const ScanConfig& config, const ScanHooks& hooks = {});

// Continues the scan recorded at checkpoint_path. `workers` overrides the parallelism.
ScanSummary resume(const std::filesystem::path& checkpoint_path, unsigned workers = 1, const ScanHooks& hooks = {});

struct Mismatch {
    std::uint64_t p = 0;
    std::int64_t stored = 0;
    std::optional<std::int64_t> recomputed;  // absent when p is not an odd prime
};

struct VerificationReport {
    std::uint64_t seed = 0;
    std::size_t requested = 0;
    std::size_t checked = 0;
    std::vector<Mismatch> mismatches;
};

// Recomputes a seeded uniform sample of n records (all of them when n >= size) with
// residue_rec_b over exact arithmetic, an algorithm independent of the scan kernel.
VerificationReport verify_sample(std::span<const ResidueRecord> records, std::size_t n, std::uint64_t seed,
                                 unsigned workers = 1);
VerificationReport verify_sample(const std::filesystem::path& records_path, std::size_t n, std::uint64_t seed,
                                 unsigned workers = 1);

} // namespace kurepa
