#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace readsort {

/// Probability of a 1 bit, scaled to 16 bits; valid range [1, 65535].
using Prob16 = std::uint32_t;

/// Quantizes a real probability of a 1 bit to the coder's 16-bit scale.
Prob16 quantize_probability(double p_one) noexcept;

/// Binary arithmetic coder with a 64-bit range and carry propagation into the
/// already emitted bytes. The range never drops below 2^56, so coding loss
/// per decision stays below 2^-40 relative.
namespace detail {
inline constexpr std::uint64_t kRangeTop = std::uint64_t{1} << 56;
}

class RangeEncoder {
 public:
  void encode(int bit, Prob16 p_one) {
    const std::uint64_t bound = (range_ >> 16) * p_one;
    if (bit) {
      range_ = bound;
    } else {
      const std::uint64_t before = low_;
      low_ += bound;
      if (low_ < before) carry();
      range_ -= bound;
    }
    while (range_ < detail::kRangeTop) {
      out_.push_back(static_cast<std::uint8_t>(low_ >> 56));
      low_ <<= 8;
      range_ <<= 8;
    }
  }
  /// `nbits` raw bits of `value`, most significant first, at p = 1/2.
  void encode_bits(std::uint64_t value, int nbits);
  /// Appends the final 8 bytes and returns the stream.
  std::vector<std::uint8_t> finish();
  [[nodiscard]] std::size_t bytes_so_far() const noexcept { return out_.size(); }

 private:
  void carry();
  std::uint64_t low_ = 0;
  std::uint64_t range_ = ~std::uint64_t{0};
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> in);
  int decode(Prob16 p_one) {
    const std::uint64_t bound = (range_ >> 16) * p_one;
    int bit;
    if (code_ < bound) {
      range_ = bound;
      bit = 1;
    } else {
      code_ -= bound;
      range_ -= bound;
      bit = 0;
    }
    while (range_ < detail::kRangeTop) {
      code_ = (code_ << 8) | next_byte();
      range_ <<= 8;
    }
    return bit;
  }
  std::uint64_t decode_bits(int nbits);
  /// True once the decoder has pulled bytes past the end of its input plus
  /// the encoder's 8-byte flush, which only happens when encoder and decoder
  /// models have diverged.
  [[nodiscard]] bool overrun() const noexcept { return pos_ > in_.size() + 8; }

 private:
  std::uint8_t next_byte() noexcept { return pos_ < in_.size() ? in_[pos_++] : (++pos_, std::uint8_t{0}); }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint64_t code_ = 0;
  std::uint64_t range_ = ~std::uint64_t{0};
};

/// Codes one nucleotide as two binary decisions (high bit, then low bit
/// conditioned on it) under a 4-ary distribution.
void encode_nucleotide(RangeEncoder& enc, int symbol, const std::array<double, 4>& probs);
int decode_nucleotide(RangeDecoder& dec, const std::array<double, 4>& probs);

/// Adaptive bit probability. The adaptation rate starts at 1/1.5 and slows
/// to 1/(kLimit + 1.5) as observations accumulate, so early estimates behave
/// like counts and later ones track drift.
struct BitCounter {
  static constexpr std::uint8_t kLimit = 60;
  std::uint16_t p = 32768;  // P(1) scaled by 2^16
  std::uint8_t n = 0;

  [[nodiscard]] Prob16 p_one() const noexcept { return p; }
  void update(int bit) noexcept {
    static constexpr auto rates = [] {
      std::array<std::int32_t, kLimit + 1> r{};
      for (int i = 0; i <= kLimit; ++i) r[i] = static_cast<std::int32_t>(65536.0 / (i + 1.5));
      return r;
    }();
    const std::int32_t target = bit ? 65535 : 0;
    std::int32_t next = p + static_cast<std::int32_t>((std::int64_t{target - p} * rates[n]) >> 16);
    next = std::clamp<std::int32_t>(next, 32, 65535 - 32);
    p = static_cast<std::uint16_t>(next);
    if (n < kLimit) ++n;
  }
};

inline void encode_bit(RangeEncoder& enc, BitCounter& c, int bit) {
  enc.encode(bit, c.p_one());
  c.update(bit);
}

inline int decode_bit(RangeDecoder& dec, BitCounter& c) {
  const int bit = dec.decode(c.p_one());
  c.update(bit);
  return bit;
}

/// Byte-level finite-context model in binary-decomposed form: each byte is
/// coded MSB first through a 255-node tree of BitCounters, selected by a hash
/// of (context, node). Collisions are tolerated.
class ByteModel {
 public:
  explicit ByteModel(int table_bits = 20);

  void encode(RangeEncoder& enc, std::uint64_t context, std::uint8_t byte);
  std::uint8_t decode(RangeDecoder& dec, std::uint64_t context);

 private:
  BitCounter& node(std::uint64_t context, unsigned node) noexcept;

  std::vector<BitCounter> table_;
  int bits_;
};

/// Unsigned integers via Elias-gamma-style adaptive coding: bucket (number of
/// significant bits) through counters, then the remaining bits raw.
class IntModel {
 public:
  void encode(RangeEncoder& enc, std::uint64_t value);
  std::uint64_t decode(RangeDecoder& dec);

 private:
  std::array<BitCounter, 65> unary_{};
};

}  // namespace readsort
