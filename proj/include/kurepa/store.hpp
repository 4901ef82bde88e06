#pragma once

// Residue record files.
//
// csv:    "p,r_signed\n" then one "p,r\n" per record, decimal, LF only.
// packed: magic "KREC1", u64 count, then count pairs (u64 p, i64 r_signed); little-endian.
//
// Records are strictly ascending by p and carry the signed residue; the canonical residue is
// recomputed on read.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string_view>
#include <vector>

#include "kurepa/kernels.hpp"

namespace kurepa {

enum class RecordFormat { csv, packed };

std::string_view to_string(RecordFormat f) noexcept;
RecordFormat parse_record_format(std::string_view s);  // throws ArgumentError

struct RecordFile {
    std::filesystem::path path;
    RecordFormat format = RecordFormat::csv;
    std::uint64_t count = 0;
};

inline constexpr std::string_view kCsvHeader = "p,r_signed\n";
inline constexpr std::string_view kPackedMagic = "KREC1";
inline constexpr std::uint64_t kPackedHeaderBytes = 5 + 8;

// Throws ArgumentError for unsorted input and IoError on write failure.
RecordFile write_records(std::span<const ResidueRecord> records, const std::filesystem::path& path,
                         RecordFormat format);

// Sniffs the format from the first bytes. Throws FormatError with the offending line (csv)
// or byte offset (packed), IoError if the file cannot be read.
std::vector<ResidueRecord> read_records(const std::filesystem::path& path);

// Append-only writer used by scans. The packed count field is patched on every flush so a
// flushed file is always readable.
class RecordWriter {
public:
    // Truncates or creates the file and writes the header.
    static RecordWriter create(const std::filesystem::path& path, RecordFormat format);
    // Reopens a file written earlier, discarding everything past `bytes` (an earlier
    // flushed size holding `count` records).
    static RecordWriter reopen(const std::filesystem::path& path, RecordFormat format, std::uint64_t bytes,
                               std::uint64_t count);

    void append(std::span<const ResidueRecord> records);
    void flush();

    std::uint64_t bytes() const noexcept { return bytes_; }
    std::uint64_t count() const noexcept { return count_; }
    RecordFormat format() const noexcept { return format_; }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    RecordWriter(std::filesystem::path path, RecordFormat format);

    std::filesystem::path path_;
    RecordFormat format_;
    std::fstream file_;
    std::uint64_t bytes_ = 0;
    std::uint64_t count_ = 0;
    std::uint64_t last_p_ = 0;
};

} // namespace kurepa
