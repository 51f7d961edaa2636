#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include "readsort/builtin_codec.hpp"
#include "readsort/external_backend.hpp"
#include "readsort/fastq.hpp"

namespace readsort {

struct ChannelSizes {
  std::uint64_t original = 0;
  std::uint64_t sorted = 0;
  [[nodiscard]] std::int64_t gain() const noexcept {
    return static_cast<std::int64_t>(original) - static_cast<std::int64_t>(sorted);
  }
};

/// Compressed size of the original-order file against the sorted one under
/// the same backend.
struct GainReport {
  std::uint64_t original_compressed_bytes = 0;
  std::uint64_t sorted_compressed_bytes = 0;
  /// Per-channel section sizes; builtin backend only.
  std::optional<ChannelSizes> headers, sequences, qualities;
  std::uint64_t sidecar_bytes = 0;
  std::uint64_t reads = 0;
  double stirling_bits = 0.0;  // 0 when there are no reads
  std::int64_t gain_bytes = 0;
  double gain_percent = 0.0;   // 0 when the original compresses to 0 bytes
  /// gain_bytes minus the sidecar actually written.
  std::int64_t adjusted_gain_bytes = 0;
  /// gain_bytes minus the Stirling estimate of the order cost, in bytes.
  double stirling_adjusted_gain_bytes = 0.0;
};

/// Fills the derived fields from the two sizes.
GainReport make_gain_report(std::uint64_t original_bytes, std::uint64_t sorted_bytes, std::uint64_t sidecar_bytes,
                            std::uint64_t reads);

/// Both record lists through the builtin codec.
GainReport builtin_gain_report(std::span<const FastqRecord> original, std::span<const FastqRecord> sorted,
                               std::uint64_t sidecar_bytes, const CodecConfig& codec = {});

/// Same from precomputed containers (avoids compressing twice).
GainReport builtin_gain_report(std::span<const std::uint8_t> original_blob, std::span<const std::uint8_t> sorted_blob,
                               std::uint64_t sidecar_bytes, std::uint64_t reads);

/// Both FASTQ files through `spec`. Compressed outputs go to `work_dir`.
GainReport gain_report(const std::filesystem::path& original_path, const std::filesystem::path& sorted_path,
                       std::uint64_t sidecar_bytes, const BackendSpec& spec, const std::filesystem::path& work_dir,
                       const CodecConfig& codec = {});

}  // namespace readsort
