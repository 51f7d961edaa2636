#include "readsort/alphabet.hpp"

#include <algorithm>

#include "readsort/error.hpp"

namespace readsort {

Symbol map_symbol(char byte, std::mt19937_64& rng) {
  const int idx = Alphabet::index_of(byte);
  if (idx >= 0) return static_cast<Symbol>(idx);
  // Top two bits: portable across standard libraries, unlike the distributions.
  return static_cast<Symbol>(rng() >> 62);
}

SymbolString map_sequence(std::string_view bytes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SymbolString out(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) out[i] = map_symbol(bytes[i], rng);
  return out;
}

SymbolString to_symbols(std::string_view acgt) {
  SymbolString out(acgt.size());
  for (std::size_t i = 0; i < acgt.size(); ++i) {
    const int idx = Alphabet::index_of(acgt[i]);
    if (idx < 0) throw Error(ErrorCode::DomainError, std::string("not a nucleotide: ") + acgt[i]);
    out[i] = static_cast<Symbol>(idx);
  }
  return out;
}

std::string to_letters(const SymbolString& symbols) {
  std::string out(symbols.size(), 'A');
  std::transform(symbols.begin(), symbols.end(), out.begin(), [](Symbol s) { return Alphabet::letter(s); });
  return out;
}

std::string reverse_complement(std::string_view acgt) {
  std::string out(acgt.rbegin(), acgt.rend());
  for (char& c : out) {
    switch (c) {
      case 'A': c = 'T'; break;
      case 'C': c = 'G'; break;
      case 'G': c = 'C'; break;
      case 'T': c = 'A'; break;
      default: break;
    }
  }
  return out;
}

SymbolString reverse_complement(const SymbolString& symbols) {
  SymbolString out(symbols.rbegin(), symbols.rend());
  for (Symbol& s : out) s = Alphabet::complement(s);
  return out;
}

}  // namespace readsort
