#include "readsort/range_coder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "readsort/hash.hpp"

namespace readsort {

Prob16 quantize_probability(double p_one) noexcept {
  const double scaled = p_one * 65536.0 + 0.5;
  if (!(scaled >= 1.0)) return 1;
  if (scaled >= 65535.0) return 65535;
  return static_cast<Prob16>(scaled);
}

void RangeEncoder::carry() {
  for (auto it = out_.rbegin(); it != out_.rend(); ++it) {
    if (++*it != 0) return;
  }
}

void RangeEncoder::encode_bits(std::uint64_t value, int nbits) {
  for (int i = nbits - 1; i >= 0; --i) encode(static_cast<int>((value >> i) & 1u), 32768);
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 8; ++i) {
    out_.push_back(static_cast<std::uint8_t>(low_ >> 56));
    low_ <<= 8;
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> in) : in_(in) {
  for (int i = 0; i < 8; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint64_t RangeDecoder::decode_bits(int nbits) {
  std::uint64_t v = 0;
  for (int i = 0; i < nbits; ++i) v = (v << 1) | static_cast<std::uint64_t>(decode(32768));
  return v;
}

void encode_nucleotide(RangeEncoder& enc, int symbol, const std::array<double, 4>& p) {
  const double hi = p[2] + p[3];
  const int high = symbol >> 1;
  enc.encode(high, quantize_probability(hi));
  const double pair = high ? hi : p[0] + p[1];
  const double one = high ? p[3] : p[1];
  enc.encode(symbol & 1, quantize_probability(one / pair));
}

int decode_nucleotide(RangeDecoder& dec, const std::array<double, 4>& p) {
  const double hi = p[2] + p[3];
  const int high = dec.decode(quantize_probability(hi));
  const double pair = high ? hi : p[0] + p[1];
  const double one = high ? p[3] : p[1];
  const int low = dec.decode(quantize_probability(one / pair));
  return (high << 1) | low;
}

// ---------------------------------------------------------------------------

ByteModel::ByteModel(int table_bits) : table_(std::size_t{1} << table_bits), bits_(table_bits) {}

BitCounter& ByteModel::node(std::uint64_t context, unsigned n) noexcept {
  const std::uint64_t h = mix64(context * 0x100 + n);
  return table_[static_cast<std::size_t>(h >> (64 - bits_))];
}

void ByteModel::encode(RangeEncoder& enc, std::uint64_t context, std::uint8_t byte) {
  unsigned n = 1;
  for (int i = 7; i >= 0; --i) {
    const int bit = (byte >> i) & 1;
    encode_bit(enc, node(context, n), bit);
    n = (n << 1) | static_cast<unsigned>(bit);
  }
}

std::uint8_t ByteModel::decode(RangeDecoder& dec, std::uint64_t context) {
  unsigned n = 1;
  for (int i = 0; i < 8; ++i) n = (n << 1) | static_cast<unsigned>(decode_bit(dec, node(context, n)));
  return static_cast<std::uint8_t>(n & 0xFF);
}

void IntModel::encode(RangeEncoder& enc, std::uint64_t value) {
  const int width = std::bit_width(value);  // 0 for value 0
  for (int i = 0; i < width; ++i) encode_bit(enc, unary_[i], 1);
  if (width < 64) encode_bit(enc, unary_[width], 0);
  if (width > 1) enc.encode_bits(value, width - 1);  // leading 1 implied
}

std::uint64_t IntModel::decode(RangeDecoder& dec) {
  int width = 0;
  while (width < 64 && decode_bit(dec, unary_[width])) ++width;
  if (width == 0) return 0;
  std::uint64_t v = 1;
  if (width > 1) v = (v << (width - 1)) | dec.decode_bits(width - 1);
  return v;
}

}  // namespace readsort
