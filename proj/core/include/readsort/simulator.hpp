#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "readsort/classification.hpp"
#include "readsort/fastq.hpp"

namespace readsort {

/// Illumina-like read simulation: substitutions only, paired-end fragments
/// with a normally distributed insert size.
struct SimConfig {
  int read_len = 150;
  double coverage = 50.0;
  int insert_mean = 200;
  double insert_sd = 10.0;
  double sub_error_rate = 0.005;
  bool paired = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Random ACGT genome in which 10% of the 500-base blocks (never the first)
/// are copies of an earlier stretch.
std::string gen_genome(std::size_t length, std::uint64_t seed);

/// `count` genomes with ids "ref001", "ref002", ...
ReferenceDb gen_references(std::size_t count, std::size_t length, std::uint64_t seed);

struct SimulatedReads {
  std::vector<FastqRecord> records;
  std::vector<std::size_t> origin;  // index into the reference list, per record
};

/// Emits about coverage * |ref| / read_len reads per reference, then shuffles
/// all fragments with the master seed. Headers read
/// "@SIM:<serial>:<ref id>:<0-based fragment start>" plus "/1" or "/2" for
/// paired reads; serials follow the output order. Raises RefTooShort when a
/// reference is shorter than the insert (paired) or read (single) length.
SimulatedReads simulate_reads(std::span<const ReferenceEntry> refs, const SimConfig& cfg, int threads = 1);

/// "read_id\tref_id" rows (read id = header without '@'), after a header row.
std::string truth_tsv(const SimulatedReads& sim, std::span<const ReferenceEntry> refs);

}  // namespace readsort
