#include "readsort/fastq.hpp"

#include <sstream>

#include "readsort/error.hpp"

namespace readsort {

namespace {

bool is_sequence_byte(unsigned char c) noexcept { return c >= 'A' && c <= 'Z'; }
bool is_quality_byte(unsigned char c) noexcept { return c >= 33 && c <= 126; }

[[noreturn]] void malformed(std::size_t index, const std::string& what) {
  throw Error(ErrorCode::MalformedRecord, "record " + std::to_string(index) + ": " + what);
}

}  // namespace

void validate_record(const FastqRecord& rec, std::size_t index) {
  if (rec.header.empty() || rec.header.front() != '@') malformed(index, "header must start with '@'");
  if (rec.separator.empty() || rec.separator.front() != '+')
    malformed(index, "separator must start with '+'");
  if (rec.sequence.size() != rec.quality.size())
    malformed(index, "sequence length " + std::to_string(rec.sequence.size()) +
                         " differs from quality length " + std::to_string(rec.quality.size()));
  for (unsigned char c : rec.sequence)
    if (!is_sequence_byte(c)) malformed(index, "invalid sequence byte " + std::to_string(c));
  for (unsigned char c : rec.quality)
    if (!is_quality_byte(c)) malformed(index, "invalid quality byte " + std::to_string(c));
  for (const std::string* line : {&rec.header, &rec.separator})
    for (char c : *line)
      if (c == '\n' || c == '\r') malformed(index, "embedded line break");
}

FastqReader::LineStatus FastqReader::read_line(std::string& line) {
  if (!std::getline(*in_, line)) {
    if (in_->bad()) throw Error(ErrorCode::IoFailure, "read error on FASTQ stream");
    return LineStatus::Eof;
  }
  // getline sets eof only when the delimiter was missing.
  if (in_->eof()) return LineStatus::Unterminated;
  return LineStatus::Ok;
}

void FastqReader::fail(const std::string& what) const { malformed(count_ + 1, what); }

std::optional<FastqRecord> FastqReader::next() {
  FastqRecord rec;
  std::string* lines[4] = {&rec.header, &rec.sequence, &rec.separator, &rec.quality};
  for (int i = 0; i < 4; ++i) {
    const LineStatus st = read_line(*lines[i]);
    if (st == LineStatus::Eof) {
      if (i == 0) return std::nullopt;
      fail("truncated record (" + std::to_string(i) + " of 4 lines)");
    }
    if (st == LineStatus::Unterminated) {
      if (i == 0 && lines[0]->empty()) return std::nullopt;
      fail("truncated record (missing final newline)");
    }
    if (!lines[i]->empty() && lines[i]->back() == '\r')
      fail("CRLF line endings are not supported");
  }
  validate_record(rec, count_ + 1);
  ++count_;
  return rec;
}

std::vector<FastqRecord> parse_fastq(std::istream& in) {
  FastqReader reader(in);
  std::vector<FastqRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

std::vector<FastqRecord> parse_fastq_string(const std::string& text) {
  std::istringstream in(text);
  return parse_fastq(in);
}

std::uint64_t write_fastq(std::span<const FastqRecord> records, std::ostream& out) {
  std::uint64_t bytes = 0;
  for (const auto& r : records) {
    out << r.header << '\n' << r.sequence << '\n' << r.separator << '\n' << r.quality << '\n';
    bytes += r.byte_size();
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write error on FASTQ stream");
  return bytes;
}

std::string to_fastq_string(std::span<const FastqRecord> records) {
  std::ostringstream out;
  write_fastq(records, out);
  return std::move(out).str();
}

ChannelTriple split_channels(std::span<const FastqRecord> records) {
  ChannelTriple ch;
  ch.headers.reserve(records.size());
  ch.sequences.reserve(records.size());
  ch.qualities.reserve(records.size());
  ch.separators.reserve(records.size());
  for (const auto& r : records) {
    ch.headers.push_back(r.header);
    ch.sequences.push_back(r.sequence);
    ch.qualities.push_back(r.quality);
    ch.separators.push_back(r.separator);
  }
  return ch;
}

std::vector<FastqRecord> zip_channels(const ChannelTriple& ch) {
  const std::size_t n = ch.headers.size();
  if (ch.sequences.size() != n || ch.qualities.size() != n || ch.separators.size() != n)
    throw Error(ErrorCode::InvalidPlan, "channel lists differ in length");
  std::vector<FastqRecord> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = FastqRecord{ch.headers[i], ch.sequences[i], ch.separators[i], ch.qualities[i]};
  return out;
}

}  // namespace readsort
