#include <gtest/gtest.h>

#include "fastq_fuzz.hpp"
#include "readsort/builtin_codec.hpp"
#include "readsort/error.hpp"
#include "readsort/hash.hpp"

using namespace readsort;

namespace {

ErrorCode decode_error(const std::vector<std::uint8_t>& blob) {
  try {
    builtin_decompress(blob);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoFailure;
}

}  // namespace

TEST(BuiltinCodec, FuzzRoundTrip) {
  for (std::size_t i = 0; i < 120; ++i) {
    const auto recs = fuzz::make_file(i, 3);
    const auto blob = builtin_compress(recs);
    ASSERT_EQ(builtin_decompress(blob), recs) << "file " << i;
  }
}

TEST(BuiltinCodec, ThreadCountDoesNotChangeBytes) {
  const auto recs = fuzz::make_file(17);
  CodecConfig one, four;
  four.threads = 4;
  EXPECT_EQ(builtin_compress(recs, one), builtin_compress(recs, four));
}

TEST(BuiltinCodec, EmptyFileHasFixedSize) {
  const auto blob = builtin_compress({});
  EXPECT_EQ(blob.size(), kContainerOverhead);
  const auto sizes = inspect_container(blob);
  EXPECT_EQ(sizes.headers + sizes.sequences + sizes.qualities, 0u);
  EXPECT_TRUE(builtin_decompress(blob).empty());
}

TEST(BuiltinCodec, IdenticalReadsAreNearlyFree) {
  std::mt19937_64 rng(1);
  const std::string seq = fuzz::random_sequence(rng, 150, false);
  std::vector<FastqRecord> recs(200, FastqRecord{"@r", seq, "+", std::string(150, 'I')});
  const auto stream = encode_sequence_stream(recs, CodecConfig::default_dna_ensemble());
  const double bits_per_base = 8.0 * stream.size() / (200.0 * 150.0);
  EXPECT_LT(bits_per_base, 0.2);
}

TEST(BuiltinCodec, ChannelStreamsDecodeIndependently) {
  const auto recs = fuzz::make_file(40);
  const auto tri = split_channels(recs);
  const auto h = decode_header_stream(encode_header_stream(recs));
  EXPECT_EQ(h.headers, tri.headers);
  EXPECT_EQ(h.separators, tri.separators);
  EXPECT_EQ(decode_sequence_stream(encode_sequence_stream(recs, CodecConfig::default_dna_ensemble())),
            tri.sequences);
  EXPECT_EQ(decode_quality_stream(encode_quality_stream(recs)), tri.qualities);
}

TEST(BuiltinCodec, StoresItsEnsemble) {
  const auto recs = fuzz::make_file(41);
  CodecConfig cfg;
  cfg.dna.models.clear();
  cfg.dna.models.emplace_back(FcmConfig::make(4));
  EXPECT_EQ(builtin_decompress(builtin_compress(recs, cfg)), recs);
}

TEST(BuiltinCodec, RejectsDamagedContainers) {
  const auto recs = fuzz::make_file(8);
  const auto blob = builtin_compress(recs);
  EXPECT_EQ(decode_error({blob.begin(), blob.begin() + blob.size() / 2}), ErrorCode::CorruptContainer);
  EXPECT_EQ(decode_error({blob.begin(), blob.begin() + 3}), ErrorCode::CorruptContainer);

  auto bad_magic = blob;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error(bad_magic), ErrorCode::CorruptContainer);

  auto version = blob;
  version[4] = 99;
  try {
    builtin_decompress(version);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorruptContainer);
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }

  auto flipped = blob;
  flipped[blob.size() / 2] ^= 0x40;
  const auto code = decode_error(flipped);
  EXPECT_TRUE(code == ErrorCode::CorruptContainer || code == ErrorCode::DesyncDetected);

  auto trailing = blob;
  trailing.push_back(0);
  EXPECT_EQ(decode_error(trailing), ErrorCode::CorruptContainer);
}

TEST(BuiltinCodec, ChecksumIsOverSerializedText) {
  const auto recs = fuzz::make_file(9);
  EXPECT_EQ(fastq_checksum(recs), fnv1a(to_fastq_string(recs)));
}
