#include <sstream>

#include <gtest/gtest.h>

#include "kurepa/cli.hpp"
#include "temp_dir.hpp"

using namespace kurepa;
using kurepa::testing::TempDir;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args, const cli::Overrides& o = {}) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err, o);
    return {code, out.str(), err.str()};
}

std::string without_timing(const std::string& text) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') kept += line + '\n';
    return kept;
}

} // namespace

TEST(Cli, ResidueOfSingleTableEntry) {
    const Result r = run_cli({"residue", "6855730873"});
    EXPECT_EQ(r.code, cli::kOk);
    EXPECT_NE(r.out.find("r_p = 2\n"), std::string::npos) << r.out;
}

TEST(Cli, ResidueAlgorithmsAndErrors) {
    EXPECT_NE(run_cli({"residue", "373", "--algorithm", "rec-cd"}).out.find("r_p = 2\n"), std::string::npos);
    EXPECT_NE(run_cli({"residue", "11", "--algorithm", "naive"}).out.find("r_p = 1\n"), std::string::npos);
    EXPECT_NE(run_cli({"residue", "145946963", "--backend", "exact128"}).out.find("r_p = -49\n"), std::string::npos);
    EXPECT_EQ(run_cli({"residue", "15"}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({"residue", "16"}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({"residue", "17179869209"}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({"residue", "7", "--algorithm", "magic"}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({"bogus"}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
}

TEST(Cli, Estimate) {
    const Result r = run_cli({"estimate", "--a", "1073741824", "--b", "17179869184", "--l", "100"});
    EXPECT_EQ(r.code, cli::kOk);
    EXPECT_NE(r.out.find("expected small residues (l=100) = 24.90"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("(~25)"), std::string::npos);
    const Result p = run_cli({"estimate", "--pow2", "--a", "34", "--b", "68"});
    EXPECT_NE(p.out.find("prob no counterexample = 0.500000"), std::string::npos) << p.out;
    EXPECT_EQ(run_cli({"estimate", "--a", "1", "--b", "10"}).code, cli::kArgumentError);
}

TEST(Cli, Genfact) {
    const Result r = run_cli({"genfact", "--k", "9", "--bound", "100"});
    EXPECT_EQ(r.code, cli::kOk);
    EXPECT_NE(r.out.find("k=9 p=29 (minimal)\n"), std::string::npos) << r.out;
    const Result range = run_cli({"genfact", "--k-from", "4", "--k-to", "7", "--bound", "100", "--workers", "2"});
    EXPECT_EQ(without_timing(range.out), "k=4 p=3 (minimal)\nk=5 none up to 100\nk=6 p=3 (minimal)\nk=7 p=5 (minimal)\n");
    EXPECT_EQ(run_cli({"genfact", "--bound", "100"}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({"genfact", "--k", "1"}).code, cli::kArgumentError);
}

TEST(Cli, ScanReportIsDeterministic) {
    const Result a = run_cli({"scan", "--lo", "3", "--hi", "20000", "--threshold", "5", "--workers", "1"});
    const Result b = run_cli({"scan", "--lo", "3", "--hi", "20000", "--threshold", "5", "--workers", "4",
                              "--block-size", "100"});
    EXPECT_EQ(a.code, cli::kOk);
    EXPECT_EQ(without_timing(a.out), without_timing(b.out));
    EXPECT_NE(a.out.find("counterexamples: none"), std::string::npos);
    EXPECT_NE(a.out.find(" 373   2"), std::string::npos) << a.out;
    EXPECT_NE(a.out.find("# elapsed"), std::string::npos);
}

TEST(Cli, ScanPow2AndBackendLimits) {
    EXPECT_EQ(run_cli({"scan", "--pow2", "--lo", "2", "--hi", "10", "--workers", "1"}).code, cli::kOk);
    EXPECT_EQ(run_cli({"scan", "--lo", "3", "--hi", "17179869185", "--workers", "1"}).code, cli::kArgumentError);
    EXPECT_EQ(run_cli({"scan", "--lo", "30", "--hi", "3", "--workers", "1"}).code, cli::kArgumentError);
}

TEST(Cli, CounterexampleExitCode) {
    cli::Overrides o;
    o.kernel = [](std::span<const std::uint64_t> primes, std::stop_token) {
        std::vector<ResidueRecord> out;
        for (auto p : primes) out.push_back(p == 1009 ? ResidueRecord::from_canonical(p, 0) : residue_rec_b(Modulus(p)));
        return out;
    };
    const Result r = run_cli({"scan", "--lo", "3", "--hi", "5000", "--workers", "2"}, o);
    EXPECT_EQ(r.code, cli::kCounterexample);
    EXPECT_NE(r.out.find("counterexamples: 1009"), std::string::npos);
    // the genuine kernel on the same range finds nothing
    EXPECT_EQ(run_cli({"scan", "--lo", "3", "--hi", "5000", "--workers", "2"}).code, cli::kOk);
}

TEST(Cli, ScanResumeVerifyRoundTrip) {
    TempDir dir;
    const std::string rec = (dir / "r.bin").string(), ck = (dir / "s.ckpt").string();
    const Result s = run_cli({"scan", "--hi", "30000", "--threshold", "10", "--workers", "2", "--out", rec, "--format",
                              "packed", "--record-all", "--checkpoint", ck});
    ASSERT_EQ(s.code, cli::kOk) << s.err;
    const Result again = run_cli({"resume", "--checkpoint", ck});
    EXPECT_EQ(again.code, cli::kOk);
    EXPECT_EQ(without_timing(again.out), without_timing(s.out));
    const Result v = run_cli({"verify", "--records", rec, "--n", "50", "--seed", "3"});
    EXPECT_EQ(v.code, cli::kOk) << v.out << v.err;
    EXPECT_NE(v.out.find("checked: 50\nmismatches: 0\n"), std::string::npos) << v.out;
}

TEST(Cli, IoErrorsExitThree) {
    TempDir dir;
    EXPECT_EQ(run_cli({"verify", "--records", (dir / "none.csv").string()}).code, cli::kIoError);
    EXPECT_EQ(run_cli({"resume", "--checkpoint", (dir / "none.ckpt").string()}).code, cli::kIoError);
    {
        std::ofstream bad(dir / "bad.csv");
        bad << "p,r_signed\n7,9\n";
    }
    EXPECT_EQ(run_cli({"verify", "--records", (dir / "bad.csv").string()}).code, cli::kIoError);
}

TEST(Cli, VerifyMismatchExitsOne) {
    TempDir dir;
    {
        std::ofstream f(dir / "wrong.csv");
        f << "p,r_signed\n3,1\n5,-1\n7,1\n";
    }
    const Result r = run_cli({"verify", "--records", (dir / "wrong.csv").string(), "--workers", "1"});
    EXPECT_EQ(r.code, cli::kFailure);
    EXPECT_NE(r.out.find("p=7 stored=1 recomputed=-1"), std::string::npos) << r.out;
}

TEST(Cli, WorkersFromEnvironment) {
    ::setenv("KUREPA_WORKERS", "0", 1);
    EXPECT_EQ(run_cli({"scan", "--hi", "100"}).code, cli::kArgumentError);
    ::setenv("KUREPA_WORKERS", "3", 1);
    EXPECT_EQ(run_cli({"scan", "--hi", "100"}).code, cli::kOk);
    ::unsetenv("KUREPA_WORKERS");
}
