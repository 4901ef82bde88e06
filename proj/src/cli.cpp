#include "kurepa/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kurepa/errors.hpp"
#include "kurepa/genfact.hpp"
#include "kurepa/heuristics.hpp"

namespace kurepa::cli {

namespace {

unsigned default_workers() {
    if (const char* env = std::getenv("KUREPA_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<unsigned>(v);
        throw ArgumentError(std::string("KUREPA_WORKERS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t pow2_bound(std::uint64_t e) {
    if (e > 40) throw ArgumentError("--pow2 exponents above 40 are out of range");
    return std::uint64_t(1) << e;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_summary(std::ostream& out, const ScanConfig& cfg, const ScanSummary& s) {
    out << fmt::format("range [{}, {})\n", cfg.lo, cfg.hi);
    out << fmt::format("primes tested: {}\n", s.primes_tested);
    out << fmt::format("digest: {:016x}\n", s.digest);
    if (!s.complete) out << fmt::format("status: interrupted after {} blocks\n", s.blocks_completed);
    if (s.counterexamples.empty()) {
        out << "counterexamples: none\n";
    } else {
        out << "counterexamples:";
        for (auto p : s.counterexamples) out << ' ' << p;
        out << '\n';
    }
    out << fmt::format("small residues (|r_p| < {}): {}\n", cfg.threshold, s.small_residues.size());
    if (!s.small_residues.empty()) out << format_residue_table(s.small_residues);
    const double a = static_cast<double>(std::max<std::uint64_t>(cfg.lo, 3));
    const double b = static_cast<double>(cfg.hi);
    if (cfg.threshold >= 1 && b > a) {
        out << fmt::format("heuristic expectation: {:.6f}\n",
                           expected_small_residues(a, b, static_cast<double>(cfg.threshold)));
    }
    out << fmt::format("# elapsed {:.3f} s, {:.4g} iterations/s\n", s.elapsed, s.iterations_per_second);
}

int scan_exit(const ScanSummary& s) { return s.counterexamples.empty() ? kOk : kCounterexample; }

ResidueRecord residue_by(const std::string& algorithm, const Modulus& mod, Backend backend, std::uint64_t chunk) {
    if (algorithm == "naive") return residue_naive(mod);
    if (algorithm == "rec-a") return residue_rec_a(mod);
    if (algorithm == "rec-b") return residue_rec_b(mod);
    if (algorithm == "rec-cd") return residue_rec_cd(mod);
    if (algorithm == "fast") return residue_fast(mod, backend, chunk);
    throw ArgumentError("unknown algorithm: " + algorithm);
}

} // namespace

std::string format_residue_table(std::span<const ResidueRecord> records, int columns) {
    if (records.empty() || columns < 1) return {};
    const std::size_t cols = static_cast<std::size_t>(columns);
    const std::size_t rows = (records.size() + cols - 1) / cols;
    std::size_t pw = 1, rw = 3;
    for (const auto& r : records) {
        pw = std::max(pw, std::to_string(r.p).size());
        rw = std::max(rw, std::to_string(r.r_signed).size());
    }
    std::string out;
    for (std::size_t c = 0; c < std::min(cols, records.size()); ++c) {
        if (c) out += " |";
        out += fmt::format(" {:>{}} {:>{}}", "p", pw, "r_p", rw);
    }
    out += '\n';
    for (std::size_t row = 0; row < rows; ++row) {
        std::string line;
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t idx = c * rows + row;
            if (idx >= records.size()) break;
            if (c) line += " |";
            line += fmt::format(" {:>{}} {:>{}}", records[idx].p, pw, records[idx].r_signed, rw);
        }
        out += line + '\n';
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Overrides& overrides) {
    CLI::App app{"Left factorial residues r_p = !p mod p and Kurepa counterexample search", "kurepa"};
    app.require_subcommand(1);

    // residue
    auto* residue_cmd = app.add_subcommand("residue", "residue of a single prime");
    std::uint64_t r_p = 0;
    std::string algorithm = "fast", backend_name = "float51";
    std::uint64_t chunk = kDefaultChunk;
    residue_cmd->add_option("p", r_p, "odd prime")->required();
    residue_cmd->add_option("--algorithm", algorithm, "naive | rec-a | rec-b | rec-cd | fast")->capture_default_str();
    residue_cmd->add_option("--backend", backend_name, "float51 | exact128")->capture_default_str();
    residue_cmd->add_option("--chunk", chunk, "iterations between reductions")->capture_default_str();

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "residues of every odd prime in [lo, hi)");
    ScanConfig cfg;
    bool pow2 = false, record_all = false, small_only = false;
    std::string out_path, ckpt_path, format_name = "csv";
    unsigned workers = 0;
    scan_cmd->add_option("--lo", cfg.lo, "inclusive lower bound")->capture_default_str();
    scan_cmd->add_option("--hi", cfg.hi, "exclusive upper bound")->required();
    scan_cmd->add_flag("--pow2", pow2, "--lo and --hi are exponents of 2");
    scan_cmd->add_option("--threshold", cfg.threshold, "report |r_p| below this")->capture_default_str();
    scan_cmd->add_option("--workers", workers, "worker threads (default KUREPA_WORKERS or all cores)");
    scan_cmd->add_option("--backend", backend_name, "float51 | exact128")->capture_default_str();
    scan_cmd->add_option("--block-size", cfg.block_size, "primes per block")->capture_default_str();
    scan_cmd->add_option("--chunk", cfg.chunk, "iterations between reductions")->capture_default_str();
    scan_cmd->add_option("--out", out_path, "record file");
    scan_cmd->add_option("--format", format_name, "csv | packed")->capture_default_str();
    auto* ra = scan_cmd->add_flag("--record-all", record_all, "persist every residue");
    scan_cmd->add_flag("--small-only", small_only, "persist only small residues")->excludes(ra);
    scan_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file (resumes if present)");

    // resume
    auto* resume_cmd = app.add_subcommand("resume", "continue a checkpointed scan");
    resume_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
    resume_cmd->add_option("--workers", workers, "worker threads");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "recompute a random sample of stored residues");
    std::string records_path;
    std::size_t sample_n = 1000;
    std::uint64_t seed = 1;
    verify_cmd->add_option("--records", records_path, "record file")->required();
    verify_cmd->add_option("--n", sample_n, "sample size")->capture_default_str();
    verify_cmd->add_option("--seed", seed, "sampling seed")->capture_default_str();
    verify_cmd->add_option("--workers", workers, "worker threads");

    // genfact
    auto* genfact_cmd = app.add_subcommand("genfact", "smallest odd prime p dividing !^k p");
    std::uint64_t k = 0, k_from = 0, k_to = 0, bound = kGenFactDefaultBound;
    auto* k_opt = genfact_cmd->add_option("--k", k, "exponent");
    auto* kf_opt = genfact_cmd->add_option("--k-from", k_from, "first exponent of a range")->excludes(k_opt);
    auto* kt_opt = genfact_cmd->add_option("--k-to", k_to, "last exponent of a range")->excludes(k_opt);
    kf_opt->needs(kt_opt);
    kt_opt->needs(kf_opt);
    genfact_cmd->add_option("--bound", bound, "largest prime examined")->capture_default_str();
    genfact_cmd->add_option("--workers", workers, "worker threads");

    // estimate
    auto* estimate_cmd = app.add_subcommand("estimate", "heuristic counts for [a, b]");
    double ea = 0, eb = 0, el = 0;
    estimate_cmd->add_option("--a", ea, "interval start")->required();
    estimate_cmd->add_option("--b", eb, "interval end")->required();
    auto* l_opt = estimate_cmd->add_option("--l", el, "residue threshold");
    estimate_cmd->add_flag("--pow2", pow2, "--a and --b are exponents of 2");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kArgumentError;
    }

    try {
        if (workers == 0 && (scan_cmd->parsed() || resume_cmd->parsed() || verify_cmd->parsed() ||
                             genfact_cmd->parsed()))
            workers = default_workers();

        if (residue_cmd->parsed()) {
            const auto t0 = std::chrono::steady_clock::now();
            const Modulus mod(r_p);
            if (!is_prime(r_p)) throw ArgumentError(fmt::format("{} is not prime", r_p));
            const ResidueRecord rec = residue_by(algorithm, mod, parse_backend(backend_name), chunk);
            out << fmt::format("p = {}\nr_p = {}\ncanonical = {}\n", rec.p, rec.r_signed, rec.r_canonical);
            out << fmt::format("# elapsed {:.3f} s\n", seconds_since(t0));
            return kOk;
        }
        if (scan_cmd->parsed()) {
            if (pow2) {
                cfg.lo = pow2_bound(cfg.lo);
                cfg.hi = pow2_bound(cfg.hi);
            }
            cfg.backend = parse_backend(backend_name);
            cfg.workers = workers;
            cfg.records_path = out_path;
            cfg.records_format = parse_record_format(format_name);
            cfg.checkpoint_path = ckpt_path;
            if (record_all) cfg.record_all = true;
            if (small_only) cfg.record_all = false;
            ScanHooks hooks;
            hooks.kernel = overrides.kernel;
            hooks.log = &err;
            const ScanSummary s = scan(cfg, hooks);
            print_summary(out, cfg, s);
            return scan_exit(s);
        }
        if (resume_cmd->parsed()) {
            ScanHooks hooks;
            hooks.kernel = overrides.kernel;
            hooks.log = &err;
            const ScanConfig saved = read_checkpoint(ckpt_path).config;
            const ScanSummary s = resume(ckpt_path, workers, hooks);
            print_summary(out, saved, s);
            return scan_exit(s);
        }
        if (verify_cmd->parsed()) {
            const auto t0 = std::chrono::steady_clock::now();
            const VerificationReport rep = verify_sample(records_path, sample_n, seed, workers);
            out << fmt::format("seed: {}\nchecked: {}\nmismatches: {}\n", rep.seed, rep.checked,
                               rep.mismatches.size());
            for (const auto& m : rep.mismatches) {
                if (m.recomputed) out << fmt::format("  p={} stored={} recomputed={}\n", m.p, m.stored, *m.recomputed);
                else out << fmt::format("  p={} stored={} (not an odd prime)\n", m.p, m.stored);
            }
            out << fmt::format("# elapsed {:.3f} s\n", seconds_since(t0));
            return rep.mismatches.empty() ? kOk : kFailure;
        }
        if (genfact_cmd->parsed()) {
            if (!k_opt->count() && !kf_opt->count()) throw ArgumentError("genfact needs --k or --k-from/--k-to");
            if (k_opt->count()) k_from = k_to = k;
            if (k_from > k_to) throw ArgumentError("--k-from must not exceed --k-to");
            const auto t0 = std::chrono::steady_clock::now();
            for (std::uint64_t kk = k_from; kk <= k_to; ++kk) {
                const GenFactResult r = smallest_divisor_prime(kk, bound, workers);
                if (r.p) out << fmt::format("k={} p={}{}\n", kk, *r.p, r.minimal ? " (minimal)" : "");
                else out << fmt::format("k={} none up to {}\n", kk, r.bound);
            }
            out << fmt::format("# elapsed {:.3f} s\n", seconds_since(t0));
            return kOk;
        }
        if (estimate_cmd->parsed()) {
            if (pow2) {
                ea = std::ldexp(1.0, static_cast<int>(ea));
                eb = std::ldexp(1.0, static_cast<int>(eb));
            }
            out << fmt::format("interval [{}, {}]\n", ea, eb);
            out << fmt::format("expected counterexamples = {:.6f}\n", expected_counterexamples(ea, eb));
            out << fmt::format("prob no counterexample = {:.6f}\n", prob_no_counterexample(ea, eb));
            if (l_opt->count()) {
                const double v = expected_small_residues(ea, eb, el);
                out << fmt::format("expected small residues (l={}) = {:.6f} (~{})\n", el, v, std::llround(v));
            }
            return kOk;
        }
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kArgumentError;
    } catch (const CheckpointMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << " (at " << e.where() << ")\n";
        return kIoError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kArgumentError;
}

} // namespace kurepa::cli
