#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "readsort/builtin_codec.hpp"
#include "readsort/classification.hpp"
#include "readsort/error.hpp"
#include "readsort/external_backend.hpp"
#include "readsort/fastq.hpp"
#include "readsort/gain_report.hpp"
#include "readsort/read_filter.hpp"
#include "readsort/reorder_codec.hpp"
#include "readsort/simulator.hpp"

namespace readsort {

/// An Error raised inside a named pipeline stage ("input", "classification",
/// "filtering", "compression", ...). The message is "<stage>: <error>".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, ErrorCode code, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), code_(code) {}
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  std::string stage_;
  ErrorCode code_;
};

struct PipelineConfig {
  std::filesystem::path db_path;
  std::filesystem::path input_fastq;
  double t1 = 50.0;
  double t2 = 0.5;
  EnsembleConfig ensemble = EnsembleConfig::analysis_default();
  CodecConfig codec;
  BackendSpec backend;
  bool lossless_order = true;  // write the sidecar
  bool compute_gain = true;    // also compress the original order for the report
  bool dump_passes = false;    // keep per-pass filtered/unfiltered FASTQ in the work dir
  bool both_strands = true;
  int threads = 1;
  std::uint64_t seed = 0;
  /// Defaults to $READSORT_WORKDIR, then the system temp directory.
  std::filesystem::path work_dir;

  /// Raises InvalidConfig; returns warnings (t1 outside [0, 100]).
  std::vector<std::string> validate() const;
};

/// Work directory default: $READSORT_WORKDIR or the system temp directory.
std::filesystem::path default_work_dir();

struct StageTimes {
  double read = 0, classify = 0, filter = 0, compress = 0, gain = 0, total = 0;
};

/// Everything a pack run decides, independent of where it is written.
struct PackResult {
  ClassificationResult classification;
  SortPlan plan;
  std::vector<std::uint8_t> archive;   // builtin backend only; empty for external
  std::uint64_t archive_bytes = 0;
  std::optional<PermutationSidecar> sidecar;
  std::optional<GainReport> gain;
  std::uint64_t reads = 0;
  std::vector<std::string> notes;
  StageTimes seconds;
};

/// Classify, filter, sort and compress in memory with the builtin backend.
/// `db` may be empty (then no sorting happens). The archive is only produced
/// for the builtin backend.
PackResult pack_records(std::span<const FastqRecord> records, const ReferenceDb& db, const PipelineConfig& cfg,
                        const PassObserver& observer = {});

struct PackOutputs {
  std::filesystem::path archive;
  std::optional<std::filesystem::path> sidecar;  // required when lossless_order
  std::optional<std::filesystem::path> report;   // JSON
};

/// File-level pack. Raises StageError.
PackResult cmd_pack(const PipelineConfig& cfg, const PackOutputs& out);

/// JSON report text for a pack run.
std::string pack_report_json(const PackResult& result, const PipelineConfig& cfg);

struct UnpackConfig {
  std::filesystem::path archive;
  std::optional<std::filesystem::path> sidecar;
  std::filesystem::path output;
  BackendSpec backend;  // only consulted for non-builtin archives
  int threads = 1;
  std::filesystem::path work_dir;
};

/// Decompresses (and restores the original order when a sidecar is given).
/// Builtin containers are recognized by their magic whatever `backend` says.
/// Never opens the reference database. Raises StageError.
void cmd_unpack(const UnpackConfig& cfg);

/// Classification only; raises StageError.
ClassificationResult cmd_classify(const PipelineConfig& cfg);

enum class BenchAxis { Coverage, References };

struct BenchConfig {
  BenchAxis axis = BenchAxis::Coverage;
  std::vector<double> grid;
  std::size_t references = 20;     // fixed on the coverage axis
  double coverage = 50.0;          // fixed on the references axis
  std::size_t genome_length = 20000;
  std::vector<std::uint64_t> seeds{1};
  SimConfig sim;                   // read layout; coverage and seed are overridden
  PipelineConfig pipeline;         // thresholds, ensembles, threads
};

struct BenchRow {
  double value = 0;
  std::uint64_t seed = 0;
  std::size_t selected = 0;
  GainReport gain;
  double pack_seconds = 0;
  double unpack_seconds = 0;
};

/// Simulates, packs with and without sorting and measures one row per
/// (grid value, seed), in grid order.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);
std::string bench_csv(BenchAxis axis, std::span<const BenchRow> rows);
std::string cmd_bench(const BenchConfig& cfg);

}  // namespace readsort
