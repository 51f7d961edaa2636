#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "readsort/alphabet.hpp"
#include "readsort/context_model.hpp"
#include "readsort/fastq.hpp"

namespace readsort {

struct ReferenceEntry {
  std::string id;
  std::string sequence;  // uppercased; non-ACGT bytes kept as-is
};

struct ReferenceDb {
  std::vector<ReferenceEntry> entries;
  std::uint64_t total_bases = 0;
};

/// Multi-FASTA reader. The id is the first whitespace-delimited token of the
/// '>' line. Raises MalformedFasta for empty sequences, duplicate ids or text
/// before the first '>', and EmptyDb when no record is present.
ReferenceDb parse_fasta(std::istream& in);
ReferenceDb load_db(const std::filesystem::path& path);
void write_fasta(const ReferenceDb& db, std::ostream& out, std::size_t line_width = 80);

/// Seed used to map reference `id` into the analysis alphabet; depends only
/// on the id so scores do not move when the database is reordered.
std::uint64_t reference_seed(std::uint64_t seed, std::string_view id) noexcept;
/// Seed for the read at 0-based position `index` of the input file.
std::uint64_t read_seed(std::uint64_t seed, std::size_t index) noexcept;

/// Maps every read sequence with its per-read seed.
std::vector<SymbolString> map_reads(std::span<const FastqRecord> records, std::uint64_t seed, int threads = 1);

/// C(x||Y): bits to encode `x` with an ensemble trained on Y and frozen.
double relative_compression(std::span<const Symbol> x, const ModelEnsemble& frozen);

/// Percentage of relative similarity, 100 (1 - bits / (2 |x|)). Not clamped
/// below zero. Raises EmptyReference when length == 0.
double similarity_from_bits(double bits, std::size_t length);
double similarity(std::span<const Symbol> x, const ModelEnsemble& frozen);

struct RankedReference {
  std::string ref_id;
  double similarity = 0.0;
  double bits = 0.0;
  std::size_t length = 0;
};

/// References sorted by similarity descending, ties by ascending id.
struct ClassificationResult {
  std::vector<RankedReference> ranked;
  double threshold_t1 = 50.0;
  std::size_t selected_count = 0;  // leading entries with similarity > t1

  [[nodiscard]] std::span<const RankedReference> selected() const noexcept {
    return std::span<const RankedReference>(ranked).first(selected_count);
  }
};

struct ClassifyConfig {
  EnsembleConfig ensemble = EnsembleConfig::analysis_default();
  double t1 = 50.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Trains one ensemble on all reads (context reset between reads), freezes
/// it and scores every reference. Raises EmptyDb for an empty database.
ClassificationResult classify(const ReferenceDb& db, std::span<const SymbolString> reads, const ClassifyConfig& cfg);
/// Streaming variant: reads are mapped and trained one at a time.
ClassificationResult classify(const ReferenceDb& db, std::istream& fastq, const ClassifyConfig& cfg);

/// Orders entries canonically and recomputes selected_count.
void rank(ClassificationResult& result);

/// "ref_id\tsimilarity\tbits" rows in ranked order, after a header row.
std::string to_tsv(const ClassificationResult& result);

}  // namespace readsort
