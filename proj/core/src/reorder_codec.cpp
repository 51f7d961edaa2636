#include "readsort/reorder_codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "readsort/error.hpp"
#include "readsort/hash.hpp"

namespace readsort {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'R', 'T'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[at + i]} << (8 * i);
  return v;
}

std::size_t payload_bytes(std::uint64_t n) {
  const auto bits = static_cast<std::uint64_t>(index_width(n)) * n;
  return static_cast<std::size_t>((bits + 7) / 8);
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptSidecar, what); }

}  // namespace

int index_width(std::uint64_t n) noexcept {
  if (n <= 2) return 1;
  return static_cast<int>(std::bit_width(n - 1));
}

PermutationSidecar encode_permutation(std::span<const std::size_t> perm, std::uint64_t checksum) {
  PermutationSidecar sc;
  sc.n = perm.size();
  sc.checksum = checksum;
  sc.payload.assign(payload_bytes(sc.n), 0);
  const int width = index_width(sc.n);
  std::uint64_t bitpos = 0;
  for (std::size_t v : perm) {
    for (int b = 0; b < width; ++b, ++bitpos)
      if ((v >> b) & 1u) sc.payload[bitpos >> 3] |= static_cast<std::uint8_t>(1u << (bitpos & 7));
  }
  return sc;
}

std::vector<std::size_t> decode_permutation(const PermutationSidecar& sc) {
  if (sc.payload.size() != payload_bytes(sc.n))
    corrupt("payload holds " + std::to_string(sc.payload.size()) + " bytes, expected " +
            std::to_string(payload_bytes(sc.n)));
  const int width = index_width(sc.n);
  std::vector<std::size_t> perm(static_cast<std::size_t>(sc.n));
  std::vector<bool> seen(perm.size(), false);
  std::uint64_t bitpos = 0;
  for (auto& v : perm) {
    std::size_t x = 0;
    for (int b = 0; b < width; ++b, ++bitpos)
      if ((sc.payload[bitpos >> 3] >> (bitpos & 7)) & 1u) x |= std::size_t{1} << b;
    if (x >= perm.size() || seen[x]) corrupt("payload is not a permutation");
    seen[x] = true;
    v = x;
  }
  // Padding bits must be zero.
  for (; bitpos < sc.payload.size() * 8; ++bitpos)
    if ((sc.payload[bitpos >> 3] >> (bitpos & 7)) & 1u) corrupt("non-zero padding bits");
  return perm;
}

std::vector<std::uint8_t> serialize_sidecar(const PermutationSidecar& sc) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(PermutationSidecar::kVersion);
  put_u64(out, sc.n);
  put_u64(out, sc.checksum);
  out.insert(out.end(), sc.payload.begin(), sc.payload.end());
  return out;
}

PermutationSidecar parse_sidecar(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < PermutationSidecar::kHeaderBytes) corrupt("truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) corrupt("bad magic");
  if (bytes[4] != PermutationSidecar::kVersion) corrupt("unsupported version " + std::to_string(bytes[4]));
  PermutationSidecar sc;
  sc.n = get_u64(bytes, 5);
  sc.checksum = get_u64(bytes, 13);
  if (sc.n > (std::uint64_t{1} << 40)) corrupt("implausible record count");
  const std::size_t expected = payload_bytes(sc.n);
  if (bytes.size() - PermutationSidecar::kHeaderBytes != expected)
    corrupt("payload size " + std::to_string(bytes.size() - PermutationSidecar::kHeaderBytes) + ", expected " +
            std::to_string(expected));
  sc.payload.assign(bytes.begin() + PermutationSidecar::kHeaderBytes, bytes.end());
  return sc;
}

std::uint64_t order_checksum(std::span<const FastqRecord> records) {
  std::uint64_t h = kFnvOffset;
  for (const auto& r : records) {
    h = fnv1a(r.header, h);
    h = fnv1a(std::string_view("\n"), h);
  }
  return h;
}

std::vector<FastqRecord> restore_order(std::span<const FastqRecord> sorted, const PermutationSidecar& sc) {
  if (sc.n != sorted.size())
    corrupt("sidecar describes " + std::to_string(sc.n) + " records, archive holds " + std::to_string(sorted.size()));
  const auto perm = decode_permutation(sc);
  std::vector<FastqRecord> out(sorted.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out[perm[k]] = sorted[k];
  if (order_checksum(out) != sc.checksum) corrupt("checksum mismatch: sidecar belongs to a different file");
  return out;
}

double stirling_order_bits(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::DomainError, "order cost undefined for zero reads");
  const double x = static_cast<double>(n);
  return x * std::log2(x) - x * std::numbers::log2e;
}

}  // namespace readsort
