#include "kurepa/search.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include <fmt/format.h>

#include "kurepa/detail/ordered_pool.hpp"
#include "kurepa/errors.hpp"

namespace kurepa {

void ScanConfig::validate() const {
    if (lo >= hi) throw ArgumentError(fmt::format("scan range must satisfy lo < hi, got [{}, {})", lo, hi));
    if (hi > kSieveLimit) throw ArgumentError("scan upper bound must not exceed 2^40");
    if (backend == Backend::float51 && hi > kFloatModulusLimit)
        throw ArgumentError("float51 backend supports primes below 2^34 only; use exact128");
    if (workers == 0) throw ArgumentError("workers must be at least 1");
    if (block_size == 0) throw ArgumentError("block size must be at least 1");
    if (chunk == 0) throw ArgumentError("chunk must be at least 1");
}

std::uint64_t digest_update(std::uint64_t digest, const ResidueRecord& r) noexcept {
    constexpr std::uint64_t prime = 0x100000001b3ull;
    for (std::uint64_t v : {r.p, r.r_canonical}) {
        for (int i = 0; i < 8; ++i) {
            digest ^= (v >> (8 * i)) & 0xff;
            digest *= prime;
        }
    }
    return digest;
}

std::uint64_t digest_of(std::span<const ResidueRecord> records) noexcept {
    std::uint64_t d = kDigestSeed;
    for (const auto& r : records) d = digest_update(d, r);
    return d;
}

namespace {

struct Job {
    std::vector<std::uint64_t> primes;
};

ScanSummary summary_from(const ScanCheckpoint& ck) {
    ScanSummary s;
    s.primes_tested = ck.primes_tested;
    s.counterexamples = ck.counterexamples;
    s.small_residues = ck.small_residues;
    s.digest = ck.digest;
    s.blocks_completed = ck.completed;
    s.complete = ck.complete;
    return s;
}

ScanSummary run_scan(const ScanConfig& cfg, ScanCheckpoint ck, bool resuming, const ScanHooks& hooks) {
    const auto t0 = std::chrono::steady_clock::now();
    if (ck.complete) return summary_from(ck);

    const bool record_all = cfg.resolved_record_all();
    std::optional<RecordWriter> writer;
    if (!cfg.records_path.empty()) {
        writer = resuming ? RecordWriter::reopen(cfg.records_path, cfg.records_format, ck.records_bytes,
                                                 ck.records_count)
                          : RecordWriter::create(cfg.records_path, cfg.records_format);
        ck.records_bytes = writer->bytes();
        ck.records_count = writer->count();
    }

    PrimeBlockStream stream(cfg.lo, cfg.hi, cfg.block_size);
    if (stream.skip(ck.next_block_index) != ck.next_block_index)
        throw CheckpointMismatch("checkpoint claims more blocks than the range contains");

    std::uint64_t session_primes = 0, session_iterations = 0;
    bool finished = true;

    auto next_job = [&]() -> std::optional<Job> {
        auto block = stream.next();
        if (!block) return std::nullopt;
        Job job{std::move(block->primes)};
        std::erase(job.primes, std::uint64_t(2));
        return job;
    };
    auto work = [&](const Job& job, std::stop_token stop) -> std::vector<ResidueRecord> {
        if (hooks.kernel) return hooks.kernel(job.primes, stop);
        return residue_fast_batch(job.primes, cfg.backend, cfg.chunk, stop);
    };
    auto commit = [&](Job&& job, std::vector<ResidueRecord>&& records) -> bool {
        if (records.size() != job.primes.size()) throw std::logic_error("kernel returned wrong record count");
        std::vector<ResidueRecord> kept;
        for (const auto& r : records) {
            ck.digest = digest_update(ck.digest, r);
            ck.iterations += fast_iterations(r.p);
            session_iterations += fast_iterations(r.p);
            if (r.r_canonical == 0) ck.counterexamples.push_back(r.p);
            const std::uint64_t mag = r.r_signed < 0 ? static_cast<std::uint64_t>(-r.r_signed)
                                                     : static_cast<std::uint64_t>(r.r_signed);
            const bool small = mag < cfg.threshold;
            if (small) ck.small_residues.push_back(r);
            if (writer && (record_all || small)) kept.push_back(r);
        }
        ck.primes_tested += records.size();
        session_primes += records.size();
        ++ck.next_block_index;
        ++ck.completed;
        if (writer) {
            writer->append(kept);
            writer->flush();
            ck.records_bytes = writer->bytes();
            ck.records_count = writer->count();
        }
        if (!cfg.checkpoint_path.empty()) write_checkpoint(cfg.checkpoint_path, ck);
        if (hooks.log) {
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            *hooks.log << fmt::format("# block {} done, {} primes tested, last p = {}, {:.3g} it/s\n", ck.completed,
                                      ck.primes_tested, records.empty() ? 0 : records.back().p,
                                      dt > 0 ? static_cast<double>(session_iterations) / dt : 0.0);
        }
        if (hooks.on_block) {
            const ScanProgress progress{ck.completed, ck.primes_tested, records.empty() ? 0 : records.back().p};
            if (!hooks.on_block(progress)) {
                finished = false;
                return false;
            }
        }
        return true;
    };

    detail::run_ordered<Job, std::vector<ResidueRecord>>(cfg.workers, next_job, work, commit);

    if (finished) {
        ck.complete = true;
        if (!cfg.checkpoint_path.empty()) write_checkpoint(cfg.checkpoint_path, ck);
    }
    ScanSummary s = summary_from(ck);
    s.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    s.iterations_per_second = s.elapsed > 0 ? static_cast<double>(session_iterations) / s.elapsed : 0.0;
    s.primes_tested_this_session = session_primes;
    return s;
}

} // namespace

ScanSummary scan(const ScanConfig& config, const ScanHooks& hooks) {
    config.validate();
    if (!config.checkpoint_path.empty() && std::filesystem::exists(config.checkpoint_path)) {
        ScanCheckpoint ck = read_checkpoint(config.checkpoint_path);
        if (!same_scan(ck.config, config))
            throw CheckpointMismatch("checkpoint " + config.checkpoint_path.string() + " belongs to a different scan");
        return run_scan(config, std::move(ck), true, hooks);
    }
    ScanCheckpoint ck;
    ck.config = config;
    ck.config.record_all = config.resolved_record_all();
    ck.digest = kDigestSeed;
    return run_scan(config, std::move(ck), false, hooks);
}

ScanSummary resume(const std::filesystem::path& checkpoint_path, unsigned workers, const ScanHooks& hooks) {
    ScanCheckpoint ck = read_checkpoint(checkpoint_path);
    ScanConfig cfg = ck.config;
    cfg.workers = workers;
    cfg.checkpoint_path = checkpoint_path;
    cfg.validate();
    return run_scan(cfg, std::move(ck), true, hooks);
}

VerificationReport verify_sample(std::span<const ResidueRecord> records, std::size_t n, std::uint64_t seed,
                                 unsigned workers) {
    VerificationReport report;
    report.seed = seed;
    report.requested = n;
    std::vector<ResidueRecord> sample;
    if (n >= records.size()) {
        sample.assign(records.begin(), records.end());
    } else {
        std::mt19937_64 rng(seed);
        sample.reserve(n);
        std::sample(records.begin(), records.end(), std::back_inserter(sample), n, rng);
    }
    report.checked = sample.size();

    constexpr std::size_t kPerJob = 64;
    std::size_t next = 0;
    using Slice = std::pair<std::size_t, std::size_t>;
    auto next_job = [&]() -> std::optional<Slice> {
        if (next >= sample.size()) return std::nullopt;
        const Slice s{next, std::min(sample.size(), next + kPerJob)};
        next = s.second;
        return s;
    };
    auto work = [&](const Slice& s, std::stop_token) {
        std::vector<Mismatch> bad;
        for (std::size_t i = s.first; i < s.second; ++i) {
            const ResidueRecord& rec = sample[i];
            if (rec.p < 3 || rec.p % 2 == 0 || rec.p >= kModulusLimit || !is_prime(rec.p)) {
                bad.push_back({rec.p, rec.r_signed, std::nullopt});
                continue;
            }
            const ResidueRecord fresh = residue_rec_b(Modulus(rec.p));
            if (fresh.r_signed != rec.r_signed) bad.push_back({rec.p, rec.r_signed, fresh.r_signed});
        }
        return bad;
    };
    auto commit = [&](Slice&&, std::vector<Mismatch>&& bad) {
        report.mismatches.insert(report.mismatches.end(), bad.begin(), bad.end());
        return true;
    };
    detail::run_ordered<Slice, std::vector<Mismatch>>(workers, next_job, work, commit);
    return report;
}

VerificationReport verify_sample(const std::filesystem::path& records_path, std::size_t n, std::uint64_t seed,
                                 unsigned workers) {
    const auto records = read_records(records_path);
    return verify_sample(std::span<const ResidueRecord>(records), n, seed, workers);
}

} // namespace kurepa
