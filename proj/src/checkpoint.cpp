#include <charconv>
#include <fstream>
#include <map>
#include <string>

#include <fmt/format.h>

#include "kurepa/errors.hpp"
#include "kurepa/search.hpp"

namespace kurepa {

namespace {

std::uint64_t parse_u64(std::string_view v, int base, std::uint64_t line) {
    std::uint64_t out = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty())
        throw FormatError("bad numeric value '" + std::string(v) + "'", line);
    return out;
}

} // namespace

bool same_scan(const ScanConfig& a, const ScanConfig& b) noexcept {
    return a.lo == b.lo && a.hi == b.hi && a.threshold == b.threshold && a.block_size == b.block_size &&
           a.chunk == b.chunk && a.backend == b.backend && a.resolved_record_all() == b.resolved_record_all() &&
           a.records_path == b.records_path && a.records_format == b.records_format;
}

void write_checkpoint(const std::filesystem::path& path, const ScanCheckpoint& ck) {
    const ScanConfig& c = ck.config;
    std::string body;
    body += fmt::format("{}\n", kCheckpointMagic);
    body += fmt::format("lo={}\nhi={}\nthreshold={}\nblock_size={}\nchunk={}\nbackend={}\n", c.lo, c.hi,
                        c.threshold, c.block_size, c.chunk, to_string(c.backend));
    body += fmt::format("record_all={}\nrecords_path={}\nrecords_format={}\n", c.resolved_record_all() ? 1 : 0,
                        c.records_path.string(), to_string(c.records_format));
    body += fmt::format("next_block_index={:016x}\ncompleted={:016x}\ndigest={:016x}\n", ck.next_block_index,
                        ck.completed, ck.digest);
    body += fmt::format("complete={}\nprimes_tested={}\niterations={}\nrecords_bytes={}\nrecords_count={}\n",
                        ck.complete ? 1 : 0, ck.primes_tested, ck.iterations, ck.records_bytes, ck.records_count);
    for (std::uint64_t p : ck.counterexamples) body += fmt::format("counterexample={}\n", p);
    for (const auto& r : ck.small_residues) body += fmt::format("small={},{}\n", r.p, r.r_signed);
    body += "end\n";

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write checkpoint " + tmp.string());
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        out.flush();
        if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot install checkpoint " + path.string() + ": " + ec.message());
}

ScanCheckpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::string line;
    std::uint64_t line_no = 0;
    if (!std::getline(in, line) || line != kCheckpointMagic) throw FormatError("missing KSCAN1 magic", 1);
    ++line_no;

    ScanCheckpoint ck;
    std::map<std::string, std::string> kv;
    bool ended = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line == "end") {
            ended = true;
            break;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("expected key=value", line_no);
        const std::string key = line.substr(0, eq);
        const std::string_view val = std::string_view(line).substr(eq + 1);
        if (key == "small") {
            const auto comma = val.find(',');
            if (comma == std::string_view::npos) throw FormatError("bad small record", line_no);
            const std::uint64_t p = parse_u64(val.substr(0, comma), 10, line_no);
            std::int64_t r = 0;
            const auto rs = val.substr(comma + 1);
            auto [end, ec] = std::from_chars(rs.data(), rs.data() + rs.size(), r);
            if (ec != std::errc() || end != rs.data() + rs.size()) throw FormatError("bad small record", line_no);
            ck.small_residues.push_back(ResidueRecord::from_signed(p, r));
        } else if (key == "counterexample") {
            ck.counterexamples.push_back(parse_u64(val, 10, line_no));
        } else if (!kv.emplace(key, std::string(val)).second) {
            throw FormatError("duplicate key " + key, line_no);
        }
    }
    if (!ended) throw FormatError("checkpoint truncated (no end marker)", line_no);

    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) throw FormatError(std::string("missing key ") + key, line_no);
        return it->second;
    };
    ScanConfig& c = ck.config;
    c.lo = parse_u64(take("lo"), 10, line_no);
    c.hi = parse_u64(take("hi"), 10, line_no);
    c.threshold = parse_u64(take("threshold"), 10, line_no);
    c.block_size = parse_u64(take("block_size"), 10, line_no);
    c.chunk = parse_u64(take("chunk"), 10, line_no);
    try {
        c.backend = parse_backend(take("backend"));
        c.records_format = parse_record_format(take("records_format"));
    } catch (const ArgumentError& e) {
        throw FormatError(e.what(), line_no);
    }
    c.record_all = parse_u64(take("record_all"), 10, line_no) != 0;
    c.records_path = take("records_path");
    c.checkpoint_path = path;
    ck.next_block_index = parse_u64(take("next_block_index"), 16, line_no);
    ck.completed = parse_u64(take("completed"), 16, line_no);
    ck.digest = parse_u64(take("digest"), 16, line_no);
    ck.complete = parse_u64(take("complete"), 10, line_no) != 0;
    ck.primes_tested = parse_u64(take("primes_tested"), 10, line_no);
    ck.iterations = parse_u64(take("iterations"), 10, line_no);
    ck.records_bytes = parse_u64(take("records_bytes"), 10, line_no);
    ck.records_count = parse_u64(take("records_count"), 10, line_no);
    return ck;
}

} // namespace kurepa
