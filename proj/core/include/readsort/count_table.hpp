#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <new>
#include <vector>

namespace readsort {

/// Per-context symbol counts.
using Counts = std::array<std::uint16_t, 4>;

/// Context -> Counts storage for one finite-context model.
///
/// Dense tables index all 4^order contexts directly. Hashed tables use open
/// addressing keyed on the packed context (2 bits per symbol, so order <= 20
/// fits in 40 bits and keys are stored exactly). Contexts that differ only in
/// their newest symbol hash to the same aligned group of four slots, so the
/// successors of a context can be prefetched before the next symbol is known. A hashed table grows until it
/// holds `1 << max_table_bits` slots; past that, an insert that finds no free
/// slot within the probe window overwrites the least-counted entry in it.
class CountTable {
 public:
  CountTable(int order, bool hashed, int max_table_bits, std::uint32_t max_count);

  /// nullptr when the context was never seen.
  [[nodiscard]] const Counts* find(std::uint64_t ctx) const noexcept;
  void increment(std::uint64_t ctx, int symbol);
  /// increment() reusing the result of a find(ctx) made since the last
  /// modification of this table; `found` may be nullptr.
  void increment_found(const Counts* found, std::uint64_t ctx, int symbol) {
    if (found != nullptr)
      bump(const_cast<Counts&>(*found), symbol);
    else
      increment(ctx, symbol);
  }
  /// Hints the cache about an upcoming find/increment of `ctx`.
  void prefetch(std::uint64_t ctx) const noexcept {
    if (hashed_)
      __builtin_prefetch(&slots_[home(ctx)]);
    else
      __builtin_prefetch(&dense_[ctx]);
  }
  /// Same for the four contexts that can follow `ctx`. They share one cache
  /// line in both layouts, so this can be issued a symbol early.
  void prefetch_successors(std::uint64_t ctx) const noexcept { prefetch((ctx << 2) & mask_); }

  [[nodiscard]] bool hashed() const noexcept { return hashed_; }
  [[nodiscard]] std::size_t entries() const noexcept { return used_; }
  [[nodiscard]] std::size_t capacity() const noexcept;
  [[nodiscard]] std::size_t evictions() const noexcept { return evictions_; }

  static constexpr int kMaxDenseOrder = 12;
  static constexpr int kProbeWindow = 16;

 private:
  struct Slot {
    std::uint64_t key;
    Counts counts;
  };
  template <typename T>
  struct LineAllocator {
    using value_type = T;
    LineAllocator() = default;
    template <typename U>
    LineAllocator(const LineAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{64})); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{64}); }
    friend bool operator==(const LineAllocator&, const LineAllocator&) noexcept { return true; }
  };
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

  void bump(Counts& c, int symbol) const noexcept;
  [[nodiscard]] std::size_t home(std::uint64_t ctx) const noexcept;
  void grow();
  bool place(Slot slot);

  bool hashed_;
  std::uint32_t max_count_;
  std::uint64_t mask_;
  /// Zero-filled, line-aligned array obtained from calloc, so untouched
  /// pages of a large dense table are never materialized.
  class ZeroedCounts {
   public:
    ZeroedCounts() = default;
    explicit ZeroedCounts(std::size_t n);
    ZeroedCounts(ZeroedCounts&& o) noexcept : raw_(std::exchange(o.raw_, nullptr)), data_(o.data_), size_(o.size_) {}
    ZeroedCounts& operator=(ZeroedCounts&& o) noexcept {
      std::swap(raw_, o.raw_);
      std::swap(data_, o.data_);
      std::swap(size_, o.size_);
      return *this;
    }
    ~ZeroedCounts() { std::free(raw_); }
    Counts& operator[](std::size_t i) noexcept { return data_[i]; }
    const Counts& operator[](std::size_t i) const noexcept { return data_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }

   private:
    void* raw_ = nullptr;
    Counts* data_ = nullptr;
    std::size_t size_ = 0;
  };

  ZeroedCounts dense_;
  std::vector<Slot, LineAllocator<Slot>> slots_;
  int bits_ = 0;
  int max_bits_ = 0;
  std::size_t used_ = 0;
  std::size_t evictions_ = 0;
};

}  // namespace readsort
