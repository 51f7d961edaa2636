#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "readsort/context_model.hpp"
#include "readsort/fastq.hpp"

namespace readsort {

/// Channel-separated FASTQ compressor.
///
/// Container layout (little-endian):
///   "RSQZ" | version u8 | (len u64, bytes) x 3 | FNV-1a u64 of the plaintext
/// with sections in the order headers, sequences, qualities. A section is
/// empty when the file has no records. Each non-empty section is a range-coded
/// stream that starts with the record count, so sections decode independently.
///
///  * headers: per-token match / numeric delta / literal against the previous
///    header; literal bytes through an order-3 byte model. Separator lines are
///    coded here as well.
///  * sequences: the DNA ensemble in adaptive mode (history reset per read,
///    weights carried over), two binary decisions per base. Non-ACGT bytes are
///    flagged per read and coded separately; the ensemble configuration is
///    stored at the start of the section.
///  * qualities: order-2 byte model over the quality string of each read.
struct CodecConfig {
  EnsembleConfig dna = default_dna_ensemble();
  int threads = 1;

  static EnsembleConfig default_dna_ensemble();
};

struct ContainerSizes {
  std::uint64_t headers = 0;
  std::uint64_t sequences = 0;
  std::uint64_t qualities = 0;
  std::uint64_t total = 0;
};

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerOverhead = 4 + 1 + 3 * 8 + 8;

std::vector<std::uint8_t> builtin_compress(std::span<const FastqRecord> records, const CodecConfig& cfg = {});
/// Raises CorruptContainer for malformed input (bad magic, unknown version,
/// truncation, checksum mismatch).
std::vector<FastqRecord> builtin_decompress(std::span<const std::uint8_t> blob, int threads = 1);

/// Section sizes of a container, validated structurally.
ContainerSizes inspect_container(std::span<const std::uint8_t> blob);

/// FNV-1a of the FASTQ serialization, computed without materializing it.
std::uint64_t fastq_checksum(std::span<const FastqRecord> records);

/// Individual channel coders, exposed for tests and benchmarks.
std::vector<std::uint8_t> encode_header_stream(std::span<const FastqRecord> records);
std::vector<std::uint8_t> encode_sequence_stream(std::span<const FastqRecord> records, const EnsembleConfig& dna);
std::vector<std::uint8_t> encode_quality_stream(std::span<const FastqRecord> records);

struct HeaderChannel {
  std::vector<std::string> headers;
  std::vector<std::string> separators;
};
HeaderChannel decode_header_stream(std::span<const std::uint8_t> bytes);
std::vector<std::string> decode_sequence_stream(std::span<const std::uint8_t> bytes);
std::vector<std::string> decode_quality_stream(std::span<const std::uint8_t> bytes);

}  // namespace readsort
