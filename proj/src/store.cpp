#include "kurepa/store.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <string>

#include "kurepa/errors.hpp"

namespace kurepa {

namespace {

void put_le(char* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t get_le(const char* in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i])) << (8 * i);
    return v;
}

bool in_signed_range(std::uint64_t p, std::int64_t r) {
    const std::uint64_t half = (p - 1) / 2;
    const std::uint64_t mag = r >= 0 ? static_cast<std::uint64_t>(r) : static_cast<std::uint64_t>(-(r + 1)) + 1;
    return mag <= half;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return data;
}

std::vector<ResidueRecord> parse_csv(std::string_view data) {
    std::vector<ResidueRecord> out;
    std::uint64_t line_no = 1;
    std::size_t pos = kCsvHeader.size();
    std::uint64_t prev = 0;
    while (pos < data.size()) {
        ++line_no;
        std::size_t eol = data.find('\n', pos);
        if (eol == std::string_view::npos) eol = data.size();
        const std::string_view line = data.substr(pos, eol - pos);
        pos = eol + 1;
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos) throw FormatError("missing comma", line_no);
        std::uint64_t p = 0;
        std::int64_t r = 0;
        const auto ps = line.substr(0, comma);
        const auto rs = line.substr(comma + 1);
        auto [pe, pec] = std::from_chars(ps.data(), ps.data() + ps.size(), p);
        if (pec != std::errc() || pe != ps.data() + ps.size() || ps.empty())
            throw FormatError("bad prime field", line_no);
        auto [re, rec] = std::from_chars(rs.data(), rs.data() + rs.size(), r);
        if (rec != std::errc() || re != rs.data() + rs.size() || rs.empty())
            throw FormatError("bad residue field", line_no);
        if (p < 2) throw FormatError("prime field below 2", line_no);
        if (p <= prev) throw FormatError("records not strictly ascending", line_no);
        if (!in_signed_range(p, r)) throw FormatError("residue outside [-(p-1)/2, (p-1)/2]", line_no);
        out.push_back(ResidueRecord::from_signed(p, r));
        prev = p;
    }
    return out;
}

std::vector<ResidueRecord> parse_packed(std::string_view data) {
    if (data.size() < kPackedHeaderBytes) throw FormatError("truncated packed header", data.size());
    const std::uint64_t count = get_le(data.data() + 5);
    const std::uint64_t body = data.size() - kPackedHeaderBytes;
    if (body % 16 != 0 || body / 16 < count)
        throw FormatError("truncated packed file", kPackedHeaderBytes + (body / 16) * 16);
    if (body / 16 > count) throw FormatError("trailing bytes after packed records", kPackedHeaderBytes + count * 16);
    std::vector<ResidueRecord> out;
    out.reserve(count);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t off = kPackedHeaderBytes + 16 * i;
        const std::uint64_t p = get_le(data.data() + off);
        const auto r = static_cast<std::int64_t>(get_le(data.data() + off + 8));
        if (p < 2) throw FormatError("prime field below 2", off);
        if (p <= prev) throw FormatError("records not strictly ascending", off);
        if (!in_signed_range(p, r)) throw FormatError("residue outside [-(p-1)/2, (p-1)/2]", off + 8);
        out.push_back(ResidueRecord::from_signed(p, r));
        prev = p;
    }
    return out;
}

} // namespace

std::string_view to_string(RecordFormat f) noexcept { return f == RecordFormat::csv ? "csv" : "packed"; }

RecordFormat parse_record_format(std::string_view s) {
    if (s == "csv") return RecordFormat::csv;
    if (s == "packed") return RecordFormat::packed;
    throw ArgumentError("unknown record format: " + std::string(s));
}

RecordFile write_records(std::span<const ResidueRecord> records, const std::filesystem::path& path,
                         RecordFormat format) {
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].p <= records[i - 1].p) throw ArgumentError("records must be strictly ascending by p");
    RecordWriter w = RecordWriter::create(path, format);
    w.append(records);
    w.flush();
    return {path, format, w.count()};
}

std::vector<ResidueRecord> read_records(const std::filesystem::path& path) {
    const std::string data = read_all(path);
    if (data.compare(0, kPackedMagic.size(), kPackedMagic) == 0) return parse_packed(data);
    if (data.compare(0, kCsvHeader.size(), kCsvHeader) == 0) return parse_csv(data);
    throw FormatError("unrecognized record file (no KREC1 magic or csv header)", 0);
}

RecordWriter::RecordWriter(std::filesystem::path path, RecordFormat format)
    : path_(std::move(path)), format_(format) {}

RecordWriter RecordWriter::create(const std::filesystem::path& path, RecordFormat format) {
    RecordWriter w(path, format);
    w.file_.open(path, std::ios::binary | std::ios::in | std::ios::out | std::ios::trunc);
    if (!w.file_) throw IoError("cannot create " + path.string());
    if (format == RecordFormat::csv) {
        w.file_.write(kCsvHeader.data(), static_cast<std::streamsize>(kCsvHeader.size()));
        w.bytes_ = kCsvHeader.size();
    } else {
        std::array<char, kPackedHeaderBytes> hdr{};
        std::memcpy(hdr.data(), kPackedMagic.data(), kPackedMagic.size());
        put_le(hdr.data() + 5, 0);
        w.file_.write(hdr.data(), hdr.size());
        w.bytes_ = kPackedHeaderBytes;
    }
    w.flush();
    return w;
}

RecordWriter RecordWriter::reopen(const std::filesystem::path& path, RecordFormat format, std::uint64_t bytes,
                                  std::uint64_t count) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec || size < bytes) throw IoError("record file shorter than checkpointed size: " + path.string());
    std::filesystem::resize_file(path, bytes, ec);
    if (ec) throw IoError("cannot truncate " + path.string() + ": " + ec.message());
    RecordWriter w(path, format);
    w.file_.open(path, std::ios::binary | std::ios::in | std::ios::out);
    if (!w.file_) throw IoError("cannot open " + path.string());
    w.bytes_ = bytes;
    w.count_ = count;
    if (count > 0) {
        // the last prime keeps the ascending check valid across sessions
        const std::uint64_t tail = std::min<std::uint64_t>(bytes, 64);
        std::string buf(tail, '\0');
        w.file_.seekg(static_cast<std::streamoff>(bytes - tail));
        w.file_.read(buf.data(), static_cast<std::streamsize>(tail));
        if (!w.file_) throw IoError("cannot read tail of " + path.string());
        if (format == RecordFormat::packed) {
            w.last_p_ = get_le(buf.data() + tail - 16);
        } else {
            const std::size_t end = buf.size() - 1;  // trailing LF
            const std::size_t start = buf.rfind('\n', end - 1) + 1;
            std::from_chars(buf.data() + start, buf.data() + end, w.last_p_);
        }
    }
    w.file_.seekp(static_cast<std::streamoff>(bytes));
    return w;
}

void RecordWriter::append(std::span<const ResidueRecord> records) {
    std::string buf;
    if (format_ == RecordFormat::csv) {
        for (const auto& r : records) {
            if (r.p <= last_p_) throw ArgumentError("records must be strictly ascending by p");
            last_p_ = r.p;
            buf += std::to_string(r.p);
            buf += ',';
            buf += std::to_string(r.r_signed);
            buf += '\n';
        }
    } else {
        buf.resize(records.size() * 16);
        char* out = buf.data();
        for (const auto& r : records) {
            if (r.p <= last_p_) throw ArgumentError("records must be strictly ascending by p");
            last_p_ = r.p;
            put_le(out, r.p);
            put_le(out + 8, static_cast<std::uint64_t>(r.r_signed));
            out += 16;
        }
    }
    file_.seekp(static_cast<std::streamoff>(bytes_));
    file_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!file_) throw IoError("write failed: " + path_.string());
    bytes_ += buf.size();
    count_ += records.size();
}

void RecordWriter::flush() {
    if (format_ == RecordFormat::packed) {
        char cnt[8];
        put_le(cnt, count_);
        file_.seekp(5);
        file_.write(cnt, 8);
        file_.seekp(static_cast<std::streamoff>(bytes_));
    }
    file_.flush();
    if (!file_) throw IoError("flush failed: " + path_.string());
}

} // namespace kurepa
