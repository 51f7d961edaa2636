#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "readsort/fastq.hpp"

namespace readsort {

/// Stored read order. `payload` bit-packs, LSB first, the original index of
/// the record at each sorted position using `index_width(n)` bits each.
///
/// File layout (little-endian):
///   "RSRT" | version u8 | n u64 | checksum u64 | payload
/// where checksum is the 64-bit FNV-1a of all headers in original order, each
/// followed by '\n'.
struct PermutationSidecar {
  std::uint64_t n = 0;
  std::uint64_t checksum = 0;
  std::vector<std::uint8_t> payload;

  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::size_t kHeaderBytes = 4 + 1 + 8 + 8;
};

/// ceil(log2(max(n, 2))).
int index_width(std::uint64_t n) noexcept;

PermutationSidecar encode_permutation(std::span<const std::size_t> perm, std::uint64_t checksum = 0);
/// Raises CorruptSidecar on truncated payloads or when the decoded indices are
/// not a permutation of 0..n-1.
std::vector<std::size_t> decode_permutation(const PermutationSidecar& sidecar);

std::vector<std::uint8_t> serialize_sidecar(const PermutationSidecar& sidecar);
PermutationSidecar parse_sidecar(std::span<const std::uint8_t> bytes);

/// Fingerprint of the original record order (FNV-1a over headers).
std::uint64_t order_checksum(std::span<const FastqRecord> records);

/// Undoes a sort: output[perm[k]] = sorted[k]. Raises CorruptSidecar if the
/// record count or the restored order's checksum does not match.
std::vector<FastqRecord> restore_order(std::span<const FastqRecord> sorted, const PermutationSidecar& sidecar);

/// n log2 n - n log2 e; raises DomainError for n == 0.
double stirling_order_bits(std::uint64_t n);

}  // namespace readsort
