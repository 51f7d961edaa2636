#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace readsort {

/// One 4-line FASTQ read. The separator keeps whatever followed '+' verbatim.
struct FastqRecord {
  std::string header;     // including the leading '@'
  std::string sequence;
  std::string separator;  // including the leading '+'
  std::string quality;

  /// Bytes the record occupies on disk, newlines included.
  [[nodiscard]] std::size_t byte_size() const noexcept {
    return header.size() + sequence.size() + separator.size() + quality.size() + 4;
  }

  friend bool operator==(const FastqRecord&, const FastqRecord&) = default;
};

/// Column-wise view of a record list; all four vectors have equal length.
struct ChannelTriple {
  std::vector<std::string> headers;
  std::vector<std::string> sequences;
  std::vector<std::string> qualities;
  std::vector<std::string> separators;

  [[nodiscard]] std::size_t size() const noexcept { return headers.size(); }
};

/// Streaming parser. Holds at most one record in memory at a time.
///
/// Only strict 4-line FASTQ is accepted: header '@...', sequence of uppercase
/// letters, separator '+...', quality of printable ASCII 33..126 with the same
/// length as the sequence. Every line, including the last, must end in '\n';
/// '\r' line endings are rejected instead of being rewritten. Errors raise
/// `Error(MalformedRecord)` naming the 1-based record index.
class FastqReader {
 public:
  explicit FastqReader(std::istream& in) : in_(&in) {}

  /// Next record, or nullopt at a clean end of stream.
  std::optional<FastqRecord> next();

  /// Number of records returned so far.
  [[nodiscard]] std::size_t records_read() const noexcept { return count_; }

 private:
  enum class LineStatus { Ok, Eof, Unterminated };
  LineStatus read_line(std::string& line);
  [[noreturn]] void fail(const std::string& what) const;

  std::istream* in_;
  std::size_t count_ = 0;
};

/// Validates a single record against the FASTQ invariants; `index` is 1-based
/// and only used for the error message.
void validate_record(const FastqRecord& rec, std::size_t index);

/// Reads the whole stream into memory.
std::vector<FastqRecord> parse_fastq(std::istream& in);
std::vector<FastqRecord> parse_fastq_string(const std::string& text);

/// Writes 4 newline-terminated lines per record; returns the byte count.
std::uint64_t write_fastq(std::span<const FastqRecord> records, std::ostream& out);
std::string to_fastq_string(std::span<const FastqRecord> records);

ChannelTriple split_channels(std::span<const FastqRecord> records);
std::vector<FastqRecord> zip_channels(const ChannelTriple& channels);

}  // namespace readsort
