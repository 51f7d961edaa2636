#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace readsort {

/// Nucleotide index: A=0, C=1, G=2, T=3.
using Symbol = std::uint8_t;
using SymbolString = std::vector<Symbol>;

struct Alphabet {
  static constexpr std::array<char, 4> symbols{'A', 'C', 'G', 'T'};
  static constexpr int size = 4;
  static constexpr double log2_size = 2.0;

  /// -1 for bytes outside {A,C,G,T}.
  static constexpr int index_of(char c) noexcept {
    switch (c) {
      case 'A': return 0;
      case 'C': return 1;
      case 'G': return 2;
      case 'T': return 3;
      default: return -1;
    }
  }
  static constexpr char letter(Symbol s) noexcept { return symbols[s & 3u]; }
  static constexpr Symbol complement(Symbol s) noexcept { return static_cast<Symbol>(3u - s); }
};

/// Maps one sequence byte into the analysis alphabet. Bytes outside {A,C,G,T}
/// become a symbol drawn from `rng`. Analysis only; emitted FASTQ is never
/// touched.
Symbol map_symbol(char byte, std::mt19937_64& rng);

/// Maps a whole sequence with a generator seeded by `seed`. The generator only
/// advances on non-ACGT bytes, so pure-ACGT input is seed-independent.
SymbolString map_sequence(std::string_view bytes, std::uint64_t seed);

/// Strict conversion for strings known to be ACGT (tests, simulator).
SymbolString to_symbols(std::string_view acgt);
std::string to_letters(const SymbolString& symbols);

std::string reverse_complement(std::string_view acgt);
SymbolString reverse_complement(const SymbolString& symbols);

}  // namespace readsort
