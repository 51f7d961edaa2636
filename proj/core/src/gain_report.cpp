#include "readsort/gain_report.hpp"

#include "readsort/input.hpp"
#include "readsort/reorder_codec.hpp"

namespace readsort {

namespace fs = std::filesystem;

GainReport make_gain_report(std::uint64_t original_bytes, std::uint64_t sorted_bytes, std::uint64_t sidecar_bytes,
                            std::uint64_t reads) {
  GainReport r;
  r.original_compressed_bytes = original_bytes;
  r.sorted_compressed_bytes = sorted_bytes;
  r.sidecar_bytes = sidecar_bytes;
  r.reads = reads;
  r.stirling_bits = reads > 0 ? stirling_order_bits(reads) : 0.0;
  r.gain_bytes = static_cast<std::int64_t>(original_bytes) - static_cast<std::int64_t>(sorted_bytes);
  r.gain_percent = original_bytes > 0
                       ? (1.0 - static_cast<double>(sorted_bytes) / static_cast<double>(original_bytes)) * 100.0
                       : 0.0;
  r.adjusted_gain_bytes = r.gain_bytes - static_cast<std::int64_t>(sidecar_bytes);
  r.stirling_adjusted_gain_bytes = static_cast<double>(r.gain_bytes) - r.stirling_bits / 8.0;
  return r;
}

GainReport builtin_gain_report(std::span<const std::uint8_t> original_blob, std::span<const std::uint8_t> sorted_blob,
                               std::uint64_t sidecar_bytes, std::uint64_t reads) {
  GainReport r = make_gain_report(original_blob.size(), sorted_blob.size(), sidecar_bytes, reads);
  const ContainerSizes a = inspect_container(original_blob);
  const ContainerSizes b = inspect_container(sorted_blob);
  r.headers = ChannelSizes{a.headers, b.headers};
  r.sequences = ChannelSizes{a.sequences, b.sequences};
  r.qualities = ChannelSizes{a.qualities, b.qualities};
  return r;
}

GainReport builtin_gain_report(std::span<const FastqRecord> original, std::span<const FastqRecord> sorted,
                               std::uint64_t sidecar_bytes, const CodecConfig& codec) {
  const auto a = builtin_compress(original, codec);
  const auto b = builtin_compress(sorted, codec);
  return builtin_gain_report(a, b, sidecar_bytes, original.size());
}

GainReport gain_report(const fs::path& original_path, const fs::path& sorted_path, std::uint64_t sidecar_bytes,
                       const BackendSpec& spec, const fs::path& work_dir, const CodecConfig& codec) {
  if (spec.kind == BackendKind::Builtin) {
    auto in_a = open_input(original_path);
    auto in_b = open_input(sorted_path);
    const auto a = parse_fastq(*in_a);
    const auto b = parse_fastq(*in_b);
    return builtin_gain_report(std::span<const FastqRecord>(a), std::span<const FastqRecord>(b), sidecar_bytes, codec);
  }
  std::uint64_t reads = 0;
  {
    auto in = open_input(original_path);
    FastqReader reader(*in);
    while (reader.next()) ++reads;
  }
  const std::uint64_t a = external_compress(spec, original_path, work_dir / "original.cmp");
  const std::uint64_t b = external_compress(spec, sorted_path, work_dir / "sorted.cmp");
  return make_gain_report(a, b, sidecar_bytes, reads);
}

}  // namespace readsort
