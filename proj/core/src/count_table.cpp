#include "readsort/count_table.hpp"

#include <algorithm>
#include <cstdint>
#include <new>

#include "readsort/error.hpp"
#include "readsort/hash.hpp"

namespace readsort {

namespace {
constexpr int kInitialBits = 10;
}

CountTable::CountTable(int order, bool hashed, int max_table_bits, std::uint32_t max_count)
    : hashed_(hashed),
      max_count_(std::clamp<std::uint32_t>(max_count, 2, 65535)),
      mask_(order <= 0 ? 0 : (std::uint64_t{1} << (2 * std::min(order, 31))) - 1) {
  if (order < 0 || order > 20) throw Error(ErrorCode::InvalidConfig, "context order must be in [0, 20]");
  if (!hashed_) {
    if (order > kMaxDenseOrder)
      throw Error(ErrorCode::InvalidConfig, "dense tables are limited to order " + std::to_string(kMaxDenseOrder));
    dense_ = ZeroedCounts(std::size_t{1} << (2 * order));
    return;
  }
  if (max_table_bits < 4 || max_table_bits > 30)
    throw Error(ErrorCode::InvalidConfig, "max_table_bits must be in [4, 30]");
  max_bits_ = max_table_bits;
  bits_ = std::min(kInitialBits, max_bits_);
  slots_.assign(std::size_t{1} << bits_, Slot{kEmpty, Counts{}});
}

CountTable::ZeroedCounts::ZeroedCounts(std::size_t n) : size_(n) {
  constexpr std::size_t kLine = 64;
  raw_ = std::calloc(n * sizeof(Counts) + kLine, 1);
  if (raw_ == nullptr) throw std::bad_alloc();
  const auto addr = reinterpret_cast<std::uintptr_t>(raw_);
  data_ = reinterpret_cast<Counts*>((addr + kLine - 1) & ~std::uintptr_t{kLine - 1});
}

std::size_t CountTable::capacity() const noexcept { return hashed_ ? slots_.size() : dense_.size(); }

std::size_t CountTable::home(std::uint64_t ctx) const noexcept {
  const auto group = static_cast<std::size_t>(mix64(ctx >> 2) >> (64 - bits_)) & ~std::size_t{3};
  return group | static_cast<std::size_t>(ctx & 3u);
}

const Counts* CountTable::find(std::uint64_t ctx) const noexcept {
  if (!hashed_) return &dense_[ctx];
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = home(ctx);
  for (int probe = 0; probe < kProbeWindow; ++probe, i = (i + 1) & mask) {
    const Slot& s = slots_[i];
    if (s.key == ctx) return &s.counts;
    if (s.key == kEmpty) return nullptr;
  }
  return nullptr;
}

void CountTable::bump(Counts& c, int symbol) const noexcept {
  if (c[symbol] >= max_count_)
    for (auto& v : c) v = static_cast<std::uint16_t>(v >> 1);
  ++c[symbol];
}

void CountTable::increment(std::uint64_t ctx, int symbol) {
  if (!hashed_) {
    bump(dense_[ctx], symbol);
    return;
  }
  for (;;) {
    const std::size_t mask = slots_.size() - 1;
    std::size_t i = home(ctx);
    std::size_t victim = i;
    unsigned victim_total = ~0u;
    for (int probe = 0; probe < kProbeWindow; ++probe, i = (i + 1) & mask) {
      Slot& s = slots_[i];
      if (s.key == ctx) {
        bump(s.counts, symbol);
        return;
      }
      if (s.key == kEmpty) {
        if (bits_ < max_bits_ && (used_ + 1) * 2 > slots_.size()) break;  // grow first
        s.key = ctx;
        s.counts = Counts{};
        bump(s.counts, symbol);
        ++used_;
        return;
      }
      const unsigned total = unsigned{s.counts[0]} + s.counts[1] + s.counts[2] + s.counts[3];
      if (total < victim_total) {
        victim_total = total;
        victim = i;
      }
    }
    if (bits_ < max_bits_) {
      grow();
      continue;
    }
    Slot& s = slots_[victim];
    s.key = ctx;
    s.counts = Counts{};
    bump(s.counts, symbol);
    ++evictions_;
    return;
  }
}

bool CountTable::place(Slot slot) {
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = home(slot.key);
  for (int probe = 0; probe < kProbeWindow; ++probe, i = (i + 1) & mask) {
    if (slots_[i].key == kEmpty) {
      slots_[i] = slot;
      return true;
    }
  }
  return false;
}

void CountTable::grow() {
  decltype(slots_) old;
  old.swap(slots_);
  for (;;) {
    ++bits_;
    slots_.assign(std::size_t{1} << bits_, Slot{kEmpty, Counts{}});
    const bool last = bits_ >= max_bits_;
    bool failed = false;
    std::size_t placed = 0;
    std::size_t dropped = 0;
    for (const Slot& s : old) {
      if (s.key == kEmpty) continue;
      if (place(s)) {
        ++placed;
      } else if (last) {
        ++dropped;  // no room within the probe window even at full size
      } else {
        failed = true;
        break;
      }
    }
    if (!failed) {
      used_ = placed;
      evictions_ += dropped;
      return;
    }
  }
}

}  // namespace readsort
